#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "mcucrypt/hopnet.hpp"
#include "test_util.hpp"

using namespace mcucrypt;
using testutil::random_bytes;

namespace {

const hopnet::delay_params kDefaults{}; // 449 / 456 / 10 / 0

// Re-derivation of the per-hop transform from public pieces only: the hop IV
// is the hop counter block (little-endian index, tag octet 0x01 at the end)
// encrypted under the pairwise key, and the digest is plain FNV-1a 64 of the
// ciphertext. Freezes the simulator's wire contract.
aes::block oracle_hop_iv(const hopnet::pair_key& key, std::size_t hop) {
    aes::block b{};
    for (std::size_t j = 0; j < 8; ++j) b[j] = static_cast<std::uint8_t>(hop >> (8 * j));
    b[15] = 0x01;
    return aes::encrypt_block(b, aes::key_schedule(aes::cipher_key(key)));
}

std::string oracle_digest(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    std::array<std::uint8_t, 8> bytes;
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(h >> (56 - 8 * i));
    return to_hex(bytes);
}

} // namespace

TEST_CASE("hop delay is the four-term sum") {
    CHECK(hopnet::hop_delay_ms(kDefaults) == 915.0);
    CHECK(hopnet::hop_delay_ms({0, 0, 0, 0}) == 0.0);
    CHECK(hopnet::hop_delay_ms({449, 456, 10, 85}) == 1000.0);
}

TEST_CASE("delay params are validated") {
    CHECK_THROWS_AS(hopnet::hop_delay_ms({-1, 456, 10, 0}), range_error);
    CHECK_THROWS_AS(hopnet::hop_delay_ms({449, 456, 10, -0.5}), range_error);
    // delta_t may not exceed the sum of the other three components
    CHECK_THROWS_AS(hopnet::hop_delay_ms({449, 456, 10, 916}), range_error);
    CHECK_NOTHROW(hopnet::hop_delay_ms({449, 456, 10, 915}));
}

TEST_CASE("total delay reproduces the headline figures") {
    CHECK(hopnet::total_delay_ms(kDefaults, 30) == 27'450.0);
    CHECK(hopnet::total_delay_ms(kDefaults, 180) == 164'700.0);
    CHECK(hopnet::total_delay_ms(kDefaults, 65'535) == 59'964'525.0);
}

TEST_CASE("total delay rejects zero hops") {
    CHECK_THROWS_AS(hopnet::total_delay_ms(kDefaults, 0), range_error);
    CHECK_THROWS_AS(hopnet::total_delay_ms(kDefaults, 0, hopnet::interpretation::summation),
                    range_error);
}

TEST_CASE("summation interpretation matches the closed form and the explicit sum") {
    CHECK(hopnet::total_delay_ms(kDefaults, 2, hopnet::interpretation::summation) == 2'745.0);

    std::mt19937_64 rng(31);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 1 + rng() % 300;
        const double t = hopnet::hop_delay_ms(kDefaults);
        double sum = 0;
        for (std::size_t k = 1; k <= n; ++k) sum += double(k) * t;
        CHECK(hopnet::total_delay_ms(kDefaults, n, hopnet::interpretation::summation) == sum);
        // summation = (n + 1) / 2 x linear
        CHECK(hopnet::total_delay_ms(kDefaults, n, hopnet::interpretation::summation) ==
              (double(n) + 1.0) / 2.0 * hopnet::total_delay_ms(kDefaults, n));
    }
}

TEST_CASE("linear total scales linearly in the hop count") {
    for (std::size_t n : {1, 2, 7, 30, 180, 1000})
        CHECK(hopnet::total_delay_ms(kDefaults, n) ==
              double(n) * hopnet::total_delay_ms(kDefaults, 1));
}

TEST_CASE("sweep emits one monotone row per hop count") {
    const auto rows = hopnet::sweep(kDefaults, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].hops == 1);
    CHECK(rows[0].total_ms == 915.0);
    CHECK(rows[1].total_ms == 1'830.0);
    CHECK(rows[2].total_ms == 2'745.0);

    const auto single = hopnet::sweep(kDefaults, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].total_ms == hopnet::hop_delay_ms(kDefaults));

    const auto many = hopnet::sweep(kDefaults, 50);
    for (std::size_t i = 1; i < many.size(); ++i)
        REQUIRE(many[i].total_ms > many[i - 1].total_ms);
    CHECK(many[29].total_ms == hopnet::total_delay_ms(kDefaults, 30));

    CHECK_THROWS_AS(hopnet::sweep(kDefaults, 0), range_error);
}

TEST_CASE("one-hop relay delivers the plaintext with a single-hop delay") {
    const auto chain = hopnet::hop_chain::with_hops(1, 7);
    const auto payload = std::vector<std::uint8_t>(16, 0x42);
    const auto rep = hopnet::relay(chain, payload, kDefaults);
    CHECK(rep.plaintext_intact);
    REQUIRE(rep.ledger.size() == 1);
    CHECK(rep.ledger[0].delay_ms == 915.0);
    CHECK(rep.ledger[0].cumulative_ms == 915.0);
    CHECK(rep.total_linear_ms == 915.0);
}

TEST_CASE("five-hop relay matches the hand-rolled per-hop composition") {
    const std::uint64_t seed = 99;
    const auto chain = hopnet::hop_chain::with_hops(5, seed);
    std::mt19937_64 rng(41);
    const auto payload = random_bytes(rng, 16);

    const auto rep = hopnet::relay(chain, payload, kDefaults);
    REQUIRE(rep.ledger.size() == 5);
    CHECK(rep.plaintext_intact);

    // each hop uses a different key, so all digests must differ
    std::set<std::string> digests;
    for (const auto& h : rep.ledger) digests.insert(h.message_digest);
    CHECK(digests.size() == 5);

    // compose the two-node transform five times by hand over the same keys
    const auto nodes = chain.nodes();
    std::vector<std::uint8_t> current = payload;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& key = nodes[i].keys.at(nodes[i + 1].id);
        const aes::block iv = oracle_hop_iv(key, i + 1);
        const cbc::context ctx{aes::key_schedule(aes::cipher_key(key)), iv};
        const auto msg_e = cbc::encrypt(ctx, current);
        REQUIRE(oracle_digest(msg_e) == rep.ledger[i].message_digest);
        current = cbc::decrypt(ctx, msg_e);
    }
    CHECK(current == payload);
}

TEST_CASE("relay accounts delays consistently with the closed form") {
    const hopnet::delay_params params{100, 200, 10, 5};
    const auto chain = hopnet::hop_chain::with_hops(7, 3);
    const auto rep = hopnet::relay(chain, std::vector<std::uint8_t>(32, 1), params);
    CHECK(rep.ledger.back().cumulative_ms == hopnet::total_delay_ms(params, 7));
    CHECK(rep.total_linear_ms == hopnet::total_delay_ms(params, 7));
    CHECK(rep.total_summation_ms ==
          hopnet::total_delay_ms(params, 7, hopnet::interpretation::summation));
}

TEST_CASE("chain construction rejects bad topologies") {
    using hopnet::node;
    CHECK_THROWS_AS(hopnet::hop_chain(std::vector<node>{}), topology_error);
    CHECK_THROWS_AS(hopnet::hop_chain(std::vector<node>{node{1, {}}}), topology_error);
    CHECK_THROWS_AS(hopnet::hop_chain::with_hops(0, 1), topology_error);

    // duplicate ids
    CHECK_THROWS_AS(hopnet::hop_chain(std::vector<node>{node{1, {}}, node{1, {}}}),
                    topology_error);

    // asymmetric key declaration: 1 declares a key for 2, 2 declares none
    hopnet::pair_key k{};
    k.fill(0x11);
    CHECK_THROWS_AS(hopnet::hop_chain(std::vector<node>{node{1, {{2, k}}}, node{2, {}}}),
                    topology_error);
}

TEST_CASE("a broken key link aborts the relay with no partial delivery") {
    using hopnet::node;
    hopnet::pair_key k{};
    k.fill(0x22);
    // 1-2 keyed, 2-3 unkeyed
    const hopnet::hop_chain chain(
        std::vector<node>{node{1, {{2, k}}}, node{2, {{1, k}}}, node{3, {}}});
    CHECK_THROWS_AS(hopnet::relay(chain, std::vector<std::uint8_t>(16, 9), kDefaults),
                    topology_error);
}

TEST_CASE("mismatched pairwise keys surface as an integrity error") {
    using hopnet::node;
    hopnet::pair_key k1{}, k2{};
    k1.fill(0x33);
    k2.fill(0x34); // present on both sides but different values
    const hopnet::hop_chain chain(std::vector<node>{node{1, {{2, k1}}}, node{2, {{1, k2}}}});
    CHECK_THROWS_AS(hopnet::relay(chain, std::vector<std::uint8_t>(16, 9), kDefaults),
                    integrity_error);
}

TEST_CASE("relay payload must be a positive multiple of 16") {
    const auto chain = hopnet::hop_chain::with_hops(1, 7);
    CHECK_THROWS_AS(hopnet::relay(chain, std::vector<std::uint8_t>{}, kDefaults), length_error);
    CHECK_THROWS_AS(hopnet::relay(chain, std::vector<std::uint8_t>(15), kDefaults), length_error);
}

TEST_CASE("chains are deterministic in the seed") {
    const auto payload = std::vector<std::uint8_t>(16, 0x77);
    const auto a = hopnet::relay(hopnet::hop_chain::with_hops(4, 123), payload, kDefaults);
    const auto b = hopnet::relay(hopnet::hop_chain::with_hops(4, 123), payload, kDefaults);
    const auto c = hopnet::relay(hopnet::hop_chain::with_hops(4, 124), payload, kDefaults);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.ledger[i].message_digest == b.ledger[i].message_digest);
        CHECK(a.ledger[i].message_digest != c.ledger[i].message_digest);
    }
}

TEST_CASE("end-to-end integrity across chain lengths and payload sizes") {
    std::mt19937_64 rng(51);
    for (std::size_t hops = 1; hops <= 50; ++hops) {
        const auto chain = hopnet::hop_chain::with_hops(hops, rng());
        const std::size_t size = 16 * (1 + rng() % 16); // 16..256 octets
        const auto payload = random_bytes(rng, size);
        const auto rep = hopnet::relay(chain, payload, kDefaults);
        REQUIRE(rep.plaintext_intact);
        REQUIRE(rep.ledger.size() == hops);
    }
}
