#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcucrypt/errors.hpp"

namespace mcucrypt {

// Keys, blocks, and IVs cross the library boundary as lowercase hex.

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw length_error("hex string must have an even number of digits");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw error(std::string("invalid hex digit in \"") + std::string(hex) + "\"");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

// Integral values print as plain integers (never 2e+07), everything else as
// the shortest round-trip representation; deterministic either way, so
// reports stay byte-stable across runs.
inline std::string format_number(double value) {
    constexpr double two_53 = 9007199254740992.0;
    if (value == std::floor(value) && std::abs(value) < two_53)
        return std::to_string(static_cast<long long>(value));
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

inline std::string format_number(std::uint64_t value) {
    return std::to_string(value);
}

} // namespace mcucrypt
