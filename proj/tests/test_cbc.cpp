#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mcucrypt/cbc.hpp"
#include "mcucrypt/text.hpp"
#include "test_util.hpp"

using namespace mcucrypt;
using testutil::block_from_hex;
using testutil::random_bytes;

namespace {

cbc::context make_ctx(std::string_view key_hex, std::string_view iv_hex) {
    return {aes::key_schedule(aes::cipher_key(from_hex(key_hex))), block_from_hex(iv_hex)};
}

// The standard CBC-AES128 four-block vector, cross-checked against an
// independent CBC oracle before the build.
const char* const kKeyHex = "2b7e151628aed2a6abf7158809cf4f3c";
const char* const kIvHex = "000102030405060708090a0b0c0d0e0f";
const char* const kPlainHex =
    "6bc1bee22e409f96e93d7e117393172a"
    "ae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52ef"
    "f69f2445df4f9b17ad2b417be66c3710";
const char* const kCipherHex =
    "7649abac8119b246cee98e9b12e9197d"
    "5086cb9b507219ee95db113a917678b2"
    "73bed6b8e3c1743b7116e69e22229516"
    "3ff1caa1681fac09120eca307586e1a7";

} // namespace

TEST_CASE("CBC known-answer vector encrypts and decrypts") {
    const cbc::context ctx = make_ctx(kKeyHex, kIvHex);
    CHECK(to_hex(cbc::encrypt(ctx, from_hex(kPlainHex))) == kCipherHex);
    CHECK(to_hex(cbc::decrypt(ctx, from_hex(kCipherHex))) == kPlainHex);
}

TEST_CASE("single block under a zero IV equals the raw block cipher") {
    const cbc::context ctx = make_ctx(kKeyHex, "00000000000000000000000000000000");
    const aes::block p = block_from_hex("00112233445566778899aabbccddeeff");
    const auto chained = cbc::encrypt(ctx, p);
    const aes::block direct = aes::encrypt_block(p, ctx.schedule);
    REQUIRE(std::equal(chained.begin(), chained.end(), direct.begin()));
}

TEST_CASE("chaining breaks plaintext repetition") {
    const cbc::context ctx = make_ctx(kKeyHex, kIvHex);
    const auto block1 = from_hex("6bc1bee22e409f96e93d7e117393172a");
    std::vector<std::uint8_t> doubled = block1;
    doubled.insert(doubled.end(), block1.begin(), block1.end());
    const auto ct = cbc::encrypt(ctx, doubled);
    // frozen from the independent oracle
    CHECK(to_hex(std::span(ct).first(16)) == "7649abac8119b246cee98e9b12e9197d");
    CHECK(to_hex(std::span(ct).subspan(16)) == "4cbbc858756b358125529e9698a38f44");
}

TEST_CASE("round trip on random messages, both padding policies") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        const cbc::context ctx{aes::key_schedule(aes::cipher_key(random_bytes(rng, 16))),
                               testutil::random_block(rng)};

        const std::size_t blocks = 1 + rng() % 32; // 16..512 octets
        const auto message = random_bytes(rng, 16 * blocks);
        const auto ct = cbc::encrypt(ctx, message);
        CHECK(ct.size() == message.size()); // length preservation
        CHECK(cbc::decrypt(ctx, ct) == message);

        const auto padded_msg = random_bytes(rng, rng() % 49); // any length incl. 0
        const auto pct = cbc::encrypt(ctx, padded_msg, cbc::padding::pkcs7);
        CHECK(pct.size() % 16 == 0);
        CHECK(pct.size() >= padded_msg.size() + 1);
        CHECK(cbc::decrypt(ctx, pct, cbc::padding::pkcs7) == padded_msg);
    }
}

TEST_CASE("a single flipped ciphertext bit garbles one block and flips one bit in the next") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100; ++i) {
        const cbc::context ctx{aes::key_schedule(aes::cipher_key(random_bytes(rng, 16))),
                               testutil::random_block(rng)};
        const std::size_t blocks = 2 + rng() % 7;
        const auto message = random_bytes(rng, 16 * blocks);
        auto ct = cbc::encrypt(ctx, message);

        const std::size_t flip_block = rng() % (blocks - 1); // keep a following block
        const std::size_t flip_byte = rng() % 16;
        const std::uint8_t flip_mask = static_cast<std::uint8_t>(1u << (rng() % 8));
        ct[16 * flip_block + flip_byte] ^= flip_mask;

        const auto recovered = cbc::decrypt(ctx, ct);
        REQUIRE(recovered.size() == message.size());
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto orig = std::span(message).subspan(16 * b, 16);
            const auto got = std::span(recovered).subspan(16 * b, 16);
            if (b == flip_block) {
                REQUIRE(!std::equal(orig.begin(), orig.end(), got.begin()));
            } else if (b == flip_block + 1) {
                for (std::size_t j = 0; j < 16; ++j) {
                    const std::uint8_t expect_mask = j == flip_byte ? flip_mask : 0;
                    REQUIRE((orig[j] ^ got[j]) == expect_mask);
                }
            } else {
                REQUIRE(std::equal(orig.begin(), orig.end(), got.begin()));
            }
        }
    }
}

TEST_CASE("length errors without padding") {
    const cbc::context ctx = make_ctx(kKeyHex, kIvHex);
    CHECK_THROWS_AS(cbc::encrypt(ctx, std::vector<std::uint8_t>{}), length_error);
    CHECK_THROWS_AS(cbc::encrypt(ctx, std::vector<std::uint8_t>(15)), length_error);
    CHECK_THROWS_AS(cbc::encrypt(ctx, std::vector<std::uint8_t>(17)), length_error);
    CHECK_THROWS_AS(cbc::decrypt(ctx, std::vector<std::uint8_t>{}), length_error);
    CHECK_THROWS_AS(cbc::decrypt(ctx, std::vector<std::uint8_t>(31)), length_error);
}

TEST_CASE("malformed pkcs7 padding is rejected") {
    const cbc::context ctx = make_ctx(kKeyHex, kIvHex);

    auto cipher_of = [&](std::vector<std::uint8_t> plain) {
        return cbc::encrypt(ctx, plain); // no padding: craft the "padded" plaintext directly
    };

    std::vector<std::uint8_t> tail_zero(16, 0xaa);
    tail_zero[15] = 0x00; // pad length 0 is invalid
    CHECK_THROWS_AS(cbc::decrypt(ctx, cipher_of(tail_zero), cbc::padding::pkcs7), padding_error);

    std::vector<std::uint8_t> tail_large(16, 0xaa);
    tail_large[15] = 0x11; // 17 > block size
    CHECK_THROWS_AS(cbc::decrypt(ctx, cipher_of(tail_large), cbc::padding::pkcs7), padding_error);

    std::vector<std::uint8_t> inconsistent(16, 0xaa);
    inconsistent[14] = 0x05;
    inconsistent[15] = 0x02; // claims two pad octets but they disagree
    CHECK_THROWS_AS(cbc::decrypt(ctx, cipher_of(inconsistent), cbc::padding::pkcs7),
                    padding_error);

    // a well-formed full pad block strips to empty
    const std::vector<std::uint8_t> full_pad(16, 16);
    CHECK(cbc::decrypt(ctx, cipher_of(full_pad), cbc::padding::pkcs7).empty());
}

TEST_CASE("encrypt_into and decrypt_into match the allocating forms") {
    std::mt19937_64 rng(23);
    const cbc::context ctx = make_ctx(kKeyHex, kIvHex);
    const auto message = random_bytes(rng, 64);

    std::vector<std::uint8_t> ct(64), back(64);
    cbc::encrypt_into(ctx, message, ct);
    CHECK(ct == cbc::encrypt(ctx, message));
    cbc::decrypt_into(ctx, ct, back);
    CHECK(back == message);

    std::vector<std::uint8_t> wrong_size(48);
    CHECK_THROWS_AS(cbc::encrypt_into(ctx, message, wrong_size), length_error);
}
