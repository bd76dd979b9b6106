#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcucrypt/errors.hpp"

// Rijndael block cipher built from first principles: the S-box is generated
// from GF(2^8) arithmetic rather than pasted in, so tests can verify it
// against an independent construction. Table lookups are not constant-time;
// this library is a performance-model testbed, not production crypto.
//
// Everything here is a pure function of its inputs; key_schedule is immutable
// after construction, so all of it is safe to share across threads.

namespace mcucrypt::aes {

inline constexpr std::size_t block_size = 16;
using block = std::array<std::uint8_t, block_size>;

enum class variant { aes128, aes192, aes256 };

inline std::string variant_name(variant v) {
    switch (v) {
    case variant::aes128: return "AES-128";
    case variant::aes192: return "AES-192";
    default: return "AES-256";
    }
}

// Nk/Nb/Nr in 32-bit words; Nb is fixed at 4 (128-bit blocks).
struct params {
    std::size_t nk;
    std::size_t nb;
    std::size_t nr;
};

constexpr params params_for(variant v) {
    const std::size_t nk = v == variant::aes128 ? 4 : v == variant::aes192 ? 6 : 8;
    const std::size_t nb = 4;
    return {nk, nb, std::max(nk, nb) + 6};
}

namespace gf {

// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11b).
// Fixed eight iterations, mask arithmetic instead of branches: the cost must
// not depend on the operand values or benchmark cells would not be comparable
// (small payloads repeated many times let the branch predictor memorize
// data-dependent branch patterns that long payloads cannot).
constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    unsigned acc = 0;
    unsigned aa = a;
    unsigned bb = b;
    for (int i = 0; i < 8; ++i) {
        acc ^= aa & (0u - (bb & 1u));
        const unsigned carry = (aa >> 7) & 1u;
        aa = ((aa << 1) ^ (0x1bu & (0u - carry))) & 0xffu;
        bb >>= 1;
    }
    return static_cast<std::uint8_t>(acc);
}

// Product table for one fixed coefficient.
constexpr std::array<std::uint8_t, 256> mul_table(std::uint8_t c) {
    std::array<std::uint8_t, 256> t{};
    for (unsigned x = 0; x < 256; ++x) t[x] = mul(c, static_cast<std::uint8_t>(x));
    return t;
}

// a^254 = a^-1 for nonzero a; 0 maps to 0, the convention the S-box uses.
constexpr std::uint8_t inverse(std::uint8_t a) {
    std::uint8_t result = 1;
    std::uint8_t base = a;
    for (unsigned e = 254; e != 0; e >>= 1) {
        if (e & 1u) result = mul(result, base);
        base = mul(base, base);
    }
    return a == 0 ? std::uint8_t{0} : result;
}

} // namespace gf

struct sbox_tables {
    std::array<std::uint8_t, 256> forward{};
    std::array<std::uint8_t, 256> inverse{};
};

// forward[x] = affine(x^-1): XOR of the inverse with its four left rotations
// and the constant 0x63.
constexpr sbox_tables make_sbox_tables() {
    sbox_tables t{};
    for (unsigned x = 0; x < 256; ++x) {
        const std::uint8_t b = gf::inverse(static_cast<std::uint8_t>(x));
        unsigned s = 0x63;
        for (int i = 0; i < 5; ++i)
            s ^= ((static_cast<unsigned>(b) << i) | (static_cast<unsigned>(b) >> (8 - i))) & 0xffu;
        t.forward[x] = static_cast<std::uint8_t>(s);
    }
    for (unsigned x = 0; x < 256; ++x)
        t.inverse[t.forward[x]] = static_cast<std::uint8_t>(x);
    return t;
}

inline constexpr sbox_tables sbox = make_sbox_tables();

enum class direction { forward, inverse };

// The 4x4 octet matrix the round functions transform. Column-major mapping:
// block octet i sits at row i % 4, column i / 4, so the flat storage order
// coincides with the block order.
class state {
public:
    state() = default;

    static constexpr state from_block(const block& b) {
        state s;
        s.cells_ = b;
        return s;
    }

    constexpr block to_block() const { return cells_; }

    constexpr std::uint8_t at(std::size_t row, std::size_t col) const {
        return cells_[4 * col + row];
    }
    constexpr std::uint8_t& at(std::size_t row, std::size_t col) {
        return cells_[4 * col + row];
    }

    friend constexpr bool operator==(const state&, const state&) = default;

private:
    block cells_{};
};

class cipher_key {
public:
    explicit cipher_key(std::span<const std::uint8_t> octets)
        : octets_(octets.begin(), octets.end()) {
        switch (octets_.size()) {
        case 16: variant_ = variant::aes128; break;
        case 24: variant_ = variant::aes192; break;
        case 32: variant_ = variant::aes256; break;
        default:
            throw length_error("cipher key must be 16, 24, or 32 octets; got " +
                               std::to_string(octets_.size()));
        }
    }

    variant key_variant() const { return variant_; }
    std::span<const std::uint8_t> octets() const { return octets_; }

private:
    std::vector<std::uint8_t> octets_;
    variant variant_;
};

// Nr+1 round keys of 16 octets each, derived word-wise from the cipher key
// with RotWord/SubWord/Rcon. Each word is stored as four consecutive octets,
// so round key r occupies bytes [16r, 16r+16).
class key_schedule {
public:
    explicit key_schedule(const cipher_key& key) : variant_(key.key_variant()) {
        const params p = params_for(variant_);
        rounds_ = p.nr;
        const std::size_t nwords = p.nb * (p.nr + 1);
        bytes_.resize(4 * nwords);
        std::copy(key.octets().begin(), key.octets().end(), bytes_.begin());

        std::uint8_t rcon = 0x01;
        for (std::size_t i = p.nk; i < nwords; ++i) {
            std::array<std::uint8_t, 4> w;
            std::copy_n(bytes_.begin() + 4 * (i - 1), 4, w.begin());
            if (i % p.nk == 0) {
                std::rotate(w.begin(), w.begin() + 1, w.end());
                for (auto& b : w) b = sbox.forward[b];
                w[0] ^= rcon;
                rcon = gf::mul(rcon, 0x02);
            } else if (p.nk > 6 && i % p.nk == 4) {
                for (auto& b : w) b = sbox.forward[b];
            }
            for (std::size_t j = 0; j < 4; ++j)
                bytes_[4 * i + j] = bytes_[4 * (i - p.nk) + j] ^ w[j];
        }
    }

    variant key_variant() const { return variant_; }
    std::size_t rounds() const { return rounds_; }

    // Number of round keys held; rounds() + 1 for a well-formed schedule.
    std::size_t size() const { return bytes_.size() / 16; }

    std::span<const std::uint8_t, 16> round_key(std::size_t round) const {
        return std::span<const std::uint8_t, 16>(bytes_.data() + 16 * round, 16);
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t rounds_;
    variant variant_;
};

inline key_schedule expand_key(const cipher_key& key) { return key_schedule(key); }

constexpr state sub_bytes(state s, direction dir) {
    const auto& table = dir == direction::forward ? sbox.forward : sbox.inverse;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            s.at(r, c) = table[s.at(r, c)];
    return s;
}

// Row r rotates left by r positions (forward) or right by r (inverse).
constexpr state shift_rows(state s, direction dir) {
    state out = s;
    for (std::size_t r = 1; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            const std::size_t src = dir == direction::forward ? (c + r) % 4 : (c + 4 - r) % 4;
            out.at(r, c) = s.at(r, src);
        }
    return out;
}

namespace detail {

// Coefficient product tables for the two circulant matrices, generated from
// gf::mul at compile time.
inline constexpr auto mul_02 = gf::mul_table(0x02);
inline constexpr auto mul_03 = gf::mul_table(0x03);
inline constexpr auto mul_09 = gf::mul_table(0x09);
inline constexpr auto mul_0b = gf::mul_table(0x0b);
inline constexpr auto mul_0d = gf::mul_table(0x0d);
inline constexpr auto mul_0e = gf::mul_table(0x0e);

} // namespace detail

// Each column is multiplied by the circulant matrix over {02,03,01,01}
// (forward) or {0e,0b,0d,09} (inverse).
constexpr state mix_columns(state s, direction dir) {
    state out;
    for (std::size_t c = 0; c < 4; ++c) {
        const std::uint8_t a0 = s.at(0, c), a1 = s.at(1, c), a2 = s.at(2, c), a3 = s.at(3, c);
        if (dir == direction::forward) {
            using detail::mul_02, detail::mul_03;
            out.at(0, c) = mul_02[a0] ^ mul_03[a1] ^ a2 ^ a3;
            out.at(1, c) = a0 ^ mul_02[a1] ^ mul_03[a2] ^ a3;
            out.at(2, c) = a0 ^ a1 ^ mul_02[a2] ^ mul_03[a3];
            out.at(3, c) = mul_03[a0] ^ a1 ^ a2 ^ mul_02[a3];
        } else {
            using detail::mul_09, detail::mul_0b, detail::mul_0d, detail::mul_0e;
            out.at(0, c) = mul_0e[a0] ^ mul_0b[a1] ^ mul_0d[a2] ^ mul_09[a3];
            out.at(1, c) = mul_09[a0] ^ mul_0e[a1] ^ mul_0b[a2] ^ mul_0d[a3];
            out.at(2, c) = mul_0d[a0] ^ mul_09[a1] ^ mul_0e[a2] ^ mul_0b[a3];
            out.at(3, c) = mul_0b[a0] ^ mul_0d[a1] ^ mul_09[a2] ^ mul_0e[a3];
        }
    }
    return out;
}

// Round-key octet 4c + r pairs with cell (r, c): each schedule word is one
// state column.
constexpr state add_round_key(state s, std::span<const std::uint8_t, 16> round_key) {
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r)
            s.at(r, c) ^= round_key[4 * c + r];
    return s;
}

namespace detail {

inline void check_schedule(const key_schedule& ks) {
    if (ks.size() != params_for(ks.key_variant()).nr + 1)
        throw error("key schedule does not match its variant: " + variant_name(ks.key_variant()) +
                    " needs " + std::to_string(params_for(ks.key_variant()).nr + 1) +
                    " round keys, have " + std::to_string(ks.size()));
}

} // namespace detail

// Initial AddRoundKey, Nr-1 full rounds, final round without MixColumns.
inline block encrypt_block(const block& plaintext, const key_schedule& ks) {
    detail::check_schedule(ks);
    state s = state::from_block(plaintext);
    s = add_round_key(s, ks.round_key(0));
    for (std::size_t round = 1; round < ks.rounds(); ++round) {
        s = sub_bytes(s, direction::forward);
        s = shift_rows(s, direction::forward);
        s = mix_columns(s, direction::forward);
        s = add_round_key(s, ks.round_key(round));
    }
    s = sub_bytes(s, direction::forward);
    s = shift_rows(s, direction::forward);
    s = add_round_key(s, ks.round_key(ks.rounds()));
    return s.to_block();
}

// Inverse round transformations in reverse order; no equivalent-inverse-cipher
// rearrangement.
inline block decrypt_block(const block& ciphertext, const key_schedule& ks) {
    detail::check_schedule(ks);
    state s = state::from_block(ciphertext);
    s = add_round_key(s, ks.round_key(ks.rounds()));
    s = shift_rows(s, direction::inverse);
    s = sub_bytes(s, direction::inverse);
    for (std::size_t round = ks.rounds() - 1; round >= 1; --round) {
        s = add_round_key(s, ks.round_key(round));
        s = mix_columns(s, direction::inverse);
        s = shift_rows(s, direction::inverse);
        s = sub_bytes(s, direction::inverse);
    }
    s = add_round_key(s, ks.round_key(0));
    return s.to_block();
}

} // namespace mcucrypt::aes
