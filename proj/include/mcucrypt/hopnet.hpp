#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcucrypt/cbc.hpp"
#include "mcucrypt/errors.hpp"
#include "mcucrypt/text.hpp"

// Chain-relay simulation: N_1 .. N_n forward a message to the cluster head,
// each hop decrypting with the inbound pairwise key and re-encrypting with
// the outbound one (real CBC calls), while per-hop delays accumulate. A run
// is single-threaded and deterministic given (seed, params, hop count);
// independent runs may execute concurrently.

namespace mcucrypt::hopnet {

// Per-hop delay components in milliseconds. Defaults are the 16-octet
// AES-128 CBC figures of the modeled MCU: encrypt 449, decrypt 456, transfer
// 10. delta_t is the channel-access/allocation share; it is unmodeled, so
// only a fixed caller-supplied value is accepted, bounded by the sum of the
// other three components (the self-referential "between zero and the hop
// delay" phrasing pins down nothing tighter).
struct delay_params {
    double t_enc_ms = 449.0;
    double t_dec_ms = 456.0;
    double t_tx_ms = 10.0;
    double delta_t_ms = 0.0;
};

inline void validate(const delay_params& p) {
    if (p.t_enc_ms < 0 || p.t_dec_ms < 0 || p.t_tx_ms < 0 || p.delta_t_ms < 0)
        throw range_error("delay components must be non-negative");
    if (p.delta_t_ms > p.t_enc_ms + p.t_tx_ms + p.t_dec_ms)
        throw range_error("delta_t exceeds the sum of the other delay components");
}

// T_hop = t_enc + t_tx + t_dec + delta_t.
inline double hop_delay_ms(const delay_params& p) {
    validate(p);
    return p.t_enc_ms + p.t_tx_ms + p.t_dec_ms + p.delta_t_ms;
}

// linear: n * T_hop, the reading every reported figure satisfies.
// summation: sum_{i=1..n} i * T_hop = n(n+1)/2 * T_hop, the reading the
// total-delay formula spells out. Both are exposed; linear is the default.
enum class interpretation { linear, summation };

inline double total_delay_ms(const delay_params& p, std::size_t hops,
                             interpretation interp = interpretation::linear) {
    if (hops == 0) throw range_error("hop count must be at least 1");
    const double t = hop_delay_ms(p);
    const double n = static_cast<double>(hops);
    return interp == interpretation::linear ? n * t : n * (n + 1.0) / 2.0 * t;
}

struct sweep_row {
    std::size_t hops;
    double total_ms;
};

inline std::vector<sweep_row> sweep(const delay_params& p, std::size_t max_hops,
                                    interpretation interp = interpretation::linear) {
    if (max_hops == 0) throw range_error("sweep needs at least one hop");
    std::vector<sweep_row> rows;
    rows.reserve(max_hops);
    for (std::size_t n = 1; n <= max_hops; ++n)
        rows.push_back({n, total_delay_ms(p, n, interp)});
    return rows;
}

using pair_key = std::array<std::uint8_t, 16>;

struct node {
    std::uint32_t id;
    std::map<std::uint32_t, pair_key> keys; // neighbor id -> pre-deployed pairwise key
};

namespace detail {

// Pairwise keys stand in for an out-of-scope key-establishment protocol:
// derived from the run seed and the order-normalized node-pair ids through
// one block encryption, so a chain is reproducible from its seed alone.
inline pair_key derive_pair_key(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    std::mt19937_64 rng(seed);
    pair_key base{};
    for (std::size_t i = 0; i < 2; ++i) {
        std::uint64_t w = rng();
        for (std::size_t j = 0; j < 8; ++j) base[8 * i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    aes::block pair_block{};
    for (std::size_t j = 0; j < 4; ++j) {
        pair_block[j] = static_cast<std::uint8_t>(a >> (8 * j));
        pair_block[4 + j] = static_cast<std::uint8_t>(b >> (8 * j));
    }
    return aes::encrypt_block(pair_block, aes::key_schedule(aes::cipher_key(base)));
}

// The hop IV travels with the message; deriving it from the hop's key and
// index keeps runs reproducible without a transport-layer RNG.
inline aes::block derive_hop_iv(const pair_key& key, std::size_t hop) {
    aes::block b{};
    for (std::size_t j = 0; j < 8; ++j) b[j] = static_cast<std::uint8_t>(hop >> (8 * j));
    b[15] = 0x01;
    return aes::encrypt_block(b, aes::key_schedule(aes::cipher_key(key)));
}

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string digest_hex(std::span<const std::uint8_t> data) {
    const std::uint64_t h = fnv1a64(data);
    std::array<std::uint8_t, 8> bytes;
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(h >> (56 - 8 * i));
    return to_hex(bytes);
}

} // namespace detail

// Ordered node sequence ending at the cluster head; hops() == nodes - 1.
class hop_chain {
public:
    explicit hop_chain(std::vector<node> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2)
            throw topology_error("a chain needs at least two nodes (one hop)");
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (std::size_t j = i + 1; j < nodes_.size(); ++j)
                if (nodes_[i].id == nodes_[j].id)
                    throw topology_error("duplicate node id " + std::to_string(nodes_[i].id));
        // Key presence must be symmetric between declared neighbors.
        for (const node& n : nodes_)
            for (const auto& [neighbor_id, key] : n.keys)
                for (const node& m : nodes_)
                    if (m.id == neighbor_id && !m.keys.count(n.id))
                        throw topology_error("node " + std::to_string(neighbor_id) +
                                             " is missing the key node " + std::to_string(n.id) +
                                             " declares for it");
    }

    // n+1 nodes with ids 1..n+1 (the last is the cluster head), consecutive
    // pairs keyed from the seed.
    static hop_chain with_hops(std::size_t hops, std::uint64_t seed) {
        if (hops == 0) throw topology_error("hop count must be at least 1");
        std::vector<node> nodes(hops + 1);
        for (std::size_t i = 0; i <= hops; ++i) nodes[i].id = static_cast<std::uint32_t>(i + 1);
        for (std::size_t i = 0; i < hops; ++i) {
            const pair_key k = detail::derive_pair_key(seed, nodes[i].id, nodes[i + 1].id);
            nodes[i].keys[nodes[i + 1].id] = k;
            nodes[i + 1].keys[nodes[i].id] = k;
        }
        return hop_chain(std::move(nodes));
    }

    std::span<const node> nodes() const { return nodes_; }
    std::size_t hops() const { return nodes_.size() - 1; }

private:
    std::vector<node> nodes_;
};

struct hop_record {
    std::size_t hop;            // 1-based
    std::string message_digest; // FNV-1a of the hop's ciphertext
    double delay_ms;
    double cumulative_ms;
};

struct sim_report {
    std::size_t hops = 0;
    std::size_t payload_octets = 0;
    std::vector<hop_record> ledger;
    double total_linear_ms = 0.0;
    double total_summation_ms = 0.0;
    bool plaintext_intact = false;
};

// Runs the relay with real encryption: hop i encrypts under the (i, i+1)
// pairwise key, the receiver decrypts and must recover the original
// plaintext before forwarding. Throws topology_error before any crypto runs
// if a consecutive pair lacks a key (no partial delivery), integrity_error
// if any hop's decryption mismatches.
inline sim_report relay(const hop_chain& chain, std::span<const std::uint8_t> plaintext,
                        const delay_params& params = {}) {
    validate(params);
    if (plaintext.empty() || plaintext.size() % aes::block_size != 0)
        throw length_error("relay payload length must be a positive multiple of 16 octets");

    const auto nodes = chain.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!nodes[i].keys.count(nodes[i + 1].id) || !nodes[i + 1].keys.count(nodes[i].id))
            throw topology_error("nodes " + std::to_string(nodes[i].id) + " and " +
                                 std::to_string(nodes[i + 1].id) + " share no pairwise key");
    }

    const double t_hop = hop_delay_ms(params);
    sim_report rep;
    rep.hops = chain.hops();
    rep.payload_octets = plaintext.size();
    rep.ledger.reserve(rep.hops);

    const std::vector<std::uint8_t> original(plaintext.begin(), plaintext.end());
    std::vector<std::uint8_t> current = original;
    double cumulative = 0.0;

    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const std::size_t hop = i + 1;
        const pair_key& send_key = nodes[i].keys.at(nodes[i + 1].id);
        const pair_key& recv_key = nodes[i + 1].keys.at(nodes[i].id);
        const aes::block iv = detail::derive_hop_iv(send_key, hop);

        const cbc::context enc_ctx{aes::key_schedule(aes::cipher_key(send_key)), iv};
        const std::vector<std::uint8_t> msg_e = cbc::encrypt(enc_ctx, current);

        const cbc::context dec_ctx{aes::key_schedule(aes::cipher_key(recv_key)), iv};
        const std::vector<std::uint8_t> recovered = cbc::decrypt(dec_ctx, msg_e);
        if (recovered != original)
            throw integrity_error("hop " + std::to_string(hop) +
                                  ": decrypted message does not match the original plaintext");

        cumulative += t_hop;
        rep.ledger.push_back({hop, detail::digest_hex(msg_e), t_hop, cumulative});
        current = recovered;
    }

    rep.plaintext_intact = current == original;
    rep.total_linear_ms = total_delay_ms(params, rep.hops, interpretation::linear);
    rep.total_summation_ms = total_delay_ms(params, rep.hops, interpretation::summation);
    return rep;
}

} // namespace mcucrypt::hopnet
