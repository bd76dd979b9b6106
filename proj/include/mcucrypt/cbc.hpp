#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcucrypt/aes.hpp"
#include "mcucrypt/errors.hpp"

// Cipher block chaining over the block cipher. A context is immutable and the
// calls are pure; blocks within one message are necessarily sequential (each
// block's input depends on the previous ciphertext block).

namespace mcucrypt::cbc {

// none: input length must already be a positive multiple of 16.
// pkcs7: 1..16 octets of padding are appended on encrypt, checked and
// stripped on decrypt.
enum class padding { none, pkcs7 };

struct context {
    aes::key_schedule schedule;
    aes::block iv;
};

namespace detail {

// c[i] = E(p[i] ^ c[i-1]), c[-1] = iv. in/out may alias.
inline void encrypt_blocks(const context& ctx, std::span<const std::uint8_t> in,
                           std::span<std::uint8_t> out) {
    aes::block prev = ctx.iv;
    for (std::size_t off = 0; off < in.size(); off += aes::block_size) {
        aes::block x;
        for (std::size_t j = 0; j < aes::block_size; ++j)
            x[j] = in[off + j] ^ prev[j];
        prev = aes::encrypt_block(x, ctx.schedule);
        std::copy(prev.begin(), prev.end(), out.begin() + off);
    }
}

// p[i] = D(c[i]) ^ c[i-1].
inline void decrypt_blocks(const context& ctx, std::span<const std::uint8_t> in,
                           std::span<std::uint8_t> out) {
    aes::block prev = ctx.iv;
    for (std::size_t off = 0; off < in.size(); off += aes::block_size) {
        aes::block c;
        std::copy_n(in.begin() + off, aes::block_size, c.begin());
        const aes::block d = aes::decrypt_block(c, ctx.schedule);
        for (std::size_t j = 0; j < aes::block_size; ++j)
            out[off + j] = d[j] ^ prev[j];
        prev = c;
    }
}

inline void check_block_multiple(std::size_t n, const char* what) {
    if (n == 0 || n % aes::block_size != 0)
        throw length_error(std::string(what) + " length must be a positive multiple of " +
                           std::to_string(aes::block_size) + " octets; got " + std::to_string(n));
}

} // namespace detail

// Allocation-free variant for already block-aligned data; out must be the
// same length as plaintext.
inline void encrypt_into(const context& ctx, std::span<const std::uint8_t> plaintext,
                         std::span<std::uint8_t> out) {
    detail::check_block_multiple(plaintext.size(), "plaintext");
    if (out.size() != plaintext.size())
        throw length_error("output buffer size does not match plaintext size");
    detail::encrypt_blocks(ctx, plaintext, out);
}

inline void decrypt_into(const context& ctx, std::span<const std::uint8_t> ciphertext,
                         std::span<std::uint8_t> out) {
    detail::check_block_multiple(ciphertext.size(), "ciphertext");
    if (out.size() != ciphertext.size())
        throw length_error("output buffer size does not match ciphertext size");
    detail::decrypt_blocks(ctx, ciphertext, out);
}

inline std::vector<std::uint8_t> encrypt(const context& ctx,
                                         std::span<const std::uint8_t> plaintext,
                                         padding pad = padding::none) {
    std::vector<std::uint8_t> buf(plaintext.begin(), plaintext.end());
    if (pad == padding::pkcs7) {
        const std::uint8_t n =
            static_cast<std::uint8_t>(aes::block_size - buf.size() % aes::block_size);
        buf.insert(buf.end(), n, n);
    } else {
        detail::check_block_multiple(buf.size(), "plaintext");
    }
    detail::encrypt_blocks(ctx, buf, buf);
    return buf;
}

inline std::vector<std::uint8_t> decrypt(const context& ctx,
                                         std::span<const std::uint8_t> ciphertext,
                                         padding pad = padding::none) {
    detail::check_block_multiple(ciphertext.size(), "ciphertext");
    std::vector<std::uint8_t> out(ciphertext.size());
    detail::decrypt_blocks(ctx, ciphertext, out);
    if (pad == padding::pkcs7) {
        const std::uint8_t n = out.back();
        if (n == 0 || n > aes::block_size)
            throw padding_error("malformed pkcs7 padding: pad length " + std::to_string(n));
        for (std::size_t i = out.size() - n; i < out.size(); ++i)
            if (out[i] != n)
                throw padding_error("malformed pkcs7 padding: inconsistent pad octets");
        out.resize(out.size() - n);
    }
    return out;
}

} // namespace mcucrypt::cbc
