#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcucrypt/cbc.hpp"
#include "mcucrypt/errors.hpp"
#include "mcucrypt/mcu_timing.hpp"
#include "mcucrypt/text.hpp"

// Host-side reproduction of the size-sweep experiment: CBC encrypt/decrypt
// over each data size, timed per repetition on this machine, reported next
// to the MCU model's numbers. Host measurements and modeled columns are kept
// strictly apart; the host is not an AVR and the report never pretends
// otherwise. Cells run sequentially on one thread so they cannot contaminate
// each other's timings.

namespace mcucrypt::bench {

// Fixed rather than auto-tuned so block_ops stays deterministic for a given
// config. Measured on the build host (~0.14 us per 16-octet repetition under
// the release optimizer), this keeps the smallest cell at or above 100 ms of
// wall time.
inline constexpr std::size_t default_repetitions = 1'000'000;

struct config {
    std::vector<std::size_t> data_sizes{16, 32, 64, 128, 256, 512};
    std::size_t repetitions = default_repetitions;
    std::array<std::uint8_t, 16> key{0x2b, 0x7e, 0x15, 0x16, 0x28, 0xae, 0xd2, 0xa6,
                                     0xab, 0xf7, 0x15, 0x88, 0x09, 0xcf, 0x4f, 0x3c};
    aes::block iv{0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
                  0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
    std::uint64_t seed = 1;
    mcu::unit_interpretation units = mcu::unit_interpretation::as_printed;
};

inline void validate(const config& cfg) {
    if (cfg.repetitions == 0) throw range_error("repetitions must be at least 1");
    for (std::size_t s : cfg.data_sizes)
        if (s == 0 || s % aes::block_size != 0)
            throw length_error("bench sizes must be positive multiples of 16; got " +
                               std::to_string(s));
}

struct cell_result {
    std::size_t data_size;
    mcu::op_direction direction;
    double host_ns; // median per-repetition wall time for one full-message op
    std::uint64_t block_ops;
    double model_ms;
    double model_cycles;
};

struct report {
    std::string timestamp;
    config cfg;
    std::vector<cell_result> cells;
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double median(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

// Back-to-back clock reads; the median gets subtracted from every sample so
// sub-microsecond cells are not dominated by the timer itself.
inline double clock_overhead_ns() {
    std::vector<double> samples(4096);
    for (double& s : samples) {
        const auto t0 = clock::now();
        const auto t1 = clock::now();
        s = std::chrono::duration<double, std::nano>(t1 - t0).count();
    }
    return median(samples);
}

template <typename Op>
inline void time_batch(std::size_t repetitions, double overhead_ns, std::vector<double>& samples,
                       Op&& op) {
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        op();
        const auto t1 = clock::now();
        const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
        samples.push_back(std::max(0.0, ns - overhead_ns));
    }
}

inline std::string iso8601_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

inline report run(const config& cfg,
                  const mcu::calibration_table& table = mcu::calibration_table::builtin()) {
    validate(cfg);
    const double overhead_ns = detail::clock_overhead_ns();
    const cbc::context ctx{aes::key_schedule(aes::cipher_key(cfg.key)), cfg.iv};
    std::mt19937_64 rng(cfg.seed);

    struct cell_state {
        std::size_t size;
        std::vector<std::uint8_t> payload;
        std::vector<std::uint8_t> ciphertext;
        std::vector<std::uint8_t> recovered;
        std::vector<double> enc_samples;
        std::vector<double> dec_samples;
    };
    std::vector<cell_state> cells;
    for (const std::size_t size : cfg.data_sizes) {
        cell_state c{size, {}, {}, {}, {}, {}};
        c.payload.resize(size);
        for (auto& b : c.payload) b = static_cast<std::uint8_t>(rng());
        c.ciphertext.resize(size);
        c.recovered.resize(size);
        cbc::encrypt_into(ctx, c.payload, c.ciphertext); // untimed warm-up fill
        c.enc_samples.reserve(cfg.repetitions);
        c.dec_samples.reserve(cfg.repetitions);
        cells.push_back(std::move(c));
    }

    // Cells are interleaved in round-robin batches: each batch visits every
    // cell once, so slow environment drift (frequency scaling, neighbor load)
    // hits all cells alike instead of whichever one ran last. Everything still
    // runs sequentially on this one thread.
    const std::size_t batches = std::min<std::size_t>(cfg.repetitions, 32);
    for (std::size_t batch = 0; batch < batches; ++batch) {
        const std::size_t reps =
            cfg.repetitions / batches + (batch < cfg.repetitions % batches ? 1 : 0);
        for (cell_state& c : cells) {
            detail::time_batch(reps, overhead_ns, c.enc_samples, [&] {
                cbc::encrypt_into(ctx, c.payload, c.ciphertext);
            });
            // A benchmark of broken crypto is meaningless: every decrypt
            // repetition must reproduce the payload.
            detail::time_batch(reps, overhead_ns, c.dec_samples, [&] {
                cbc::decrypt_into(ctx, c.ciphertext, c.recovered);
                if (c.recovered != c.payload)
                    throw integrity_error(
                        "bench: decrypt output does not match the input payload");
            });
        }
    }

    report rep;
    rep.cfg = cfg;
    rep.timestamp = detail::iso8601_utc_now();
    for (cell_state& c : cells) {
        const std::uint64_t block_ops =
            static_cast<std::uint64_t>(c.size / aes::block_size) * cfg.repetitions;
        const mcu::prediction enc_model =
            mcu::predict(table, c.size, mcu::op_direction::encrypt, cfg.units);
        rep.cells.push_back({c.size, mcu::op_direction::encrypt, detail::median(c.enc_samples),
                             block_ops, enc_model.time_ms, enc_model.cycles});
        const mcu::prediction dec_model =
            mcu::predict(table, c.size, mcu::op_direction::decrypt, cfg.units);
        rep.cells.push_back({c.size, mcu::op_direction::decrypt, detail::median(c.dec_samples),
                             block_ops, dec_model.time_ms, dec_model.cycles});
    }
    return rep;
}

enum class format { csv, json };

inline constexpr const char* csv_header = "size,direction,host_ns,block_ops,model_ms,model_cycles";

inline std::string emit(const report& rep, format fmt) {
    if (fmt == format::csv) {
        std::string out = csv_header;
        out += '\n';
        for (const cell_result& c : rep.cells) {
            out += std::to_string(c.data_size);
            out += ',';
            out += mcu::direction_name(c.direction);
            out += ',';
            out += format_number(c.host_ns);
            out += ',';
            out += std::to_string(c.block_ops);
            out += ',';
            out += format_number(c.model_ms);
            out += ',';
            out += format_number(c.model_cycles);
            out += '\n';
        }
        return out;
    }

    nlohmann::ordered_json j;
    j["timestamp"] = rep.timestamp;
    j["config"] = {
        {"data_sizes", rep.cfg.data_sizes},
        {"repetitions", rep.cfg.repetitions},
        {"key", to_hex(rep.cfg.key)},
        {"iv", to_hex(rep.cfg.iv)},
        {"seed", rep.cfg.seed},
        {"units",
         rep.cfg.units == mcu::unit_interpretation::as_printed ? "as_printed" : "physical"},
    };
    j["cells"] = nlohmann::ordered_json::array();
    for (const cell_result& c : rep.cells)
        j["cells"].push_back({{"size", c.data_size},
                              {"direction", mcu::direction_name(c.direction)},
                              {"host_ns", c.host_ns},
                              {"block_ops", c.block_ops},
                              {"model_ms", c.model_ms},
                              {"model_cycles", c.model_cycles}});
    return j.dump(2) + "\n";
}

} // namespace mcucrypt::bench
