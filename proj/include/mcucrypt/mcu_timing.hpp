#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mcucrypt/errors.hpp"
#include "mcucrypt/text.hpp"

// Timer arithmetic and a measured-performance model for an ATmega644P-class
// 8-bit MCU: system clock -> prescaler -> 8-bit CTC timer, plus a calibration
// table mapping AES-128 CBC payload sizes to operation time and CPU cycles.
// Pure arithmetic over immutable values; thread-safe throughout.

namespace mcucrypt::mcu {

using seconds = std::chrono::duration<double>;

class clock_config {
public:
    static constexpr std::array<unsigned, 4> allowed_prescalers{8, 64, 256, 1024};

    clock_config(double frequency_hz, unsigned prescaler)
        : frequency_hz_(frequency_hz), prescaler_(prescaler) {
        if (!(frequency_hz > 0.0))
            throw range_error("clock frequency must be positive; got " +
                              format_number(frequency_hz));
        bool ok = false;
        for (unsigned p : allowed_prescalers) ok = ok || p == prescaler;
        if (!ok)
            throw range_error("prescaler must be one of 8, 64, 256, 1024; got " +
                              std::to_string(prescaler));
    }

    // The modeled device: 20 MHz system clock, prescaler 8.
    clock_config() : clock_config(20'000'000.0, 8) {}

    double frequency_hz() const { return frequency_hz_; }
    unsigned prescaler() const { return prescaler_; }

private:
    double frequency_hz_;
    unsigned prescaler_;
};

// Operation time of one system clock: 1 / frequency.
inline seconds clock_period(const clock_config& cfg) {
    return seconds{1.0 / cfg.frequency_hz()};
}

// Prescale time per timer tick: prescaler * clock period.
inline seconds prescaled_period(const clock_config& cfg) {
    return clock_period(cfg) * cfg.prescaler();
}

// CTC bookkeeping as read off the device. P (compare interrupts per 1 ms) is
// carried for reporting; the OCR arithmetic below depends only on the clock
// config. OCR and TCNT are the timer's 8-bit compare and counter registers.
struct timer_ctc {
    double interrupts_per_ms = 0.0;
    std::uint8_t ocr = 0;
    std::uint8_t tcnt = 0;
};

namespace detail {

inline double ticks_for(const clock_config& cfg, seconds target) {
    return target / prescaled_period(cfg);
}

} // namespace detail

// Compare value for an interval of k prescaled ticks: the counter starts at
// zero and clears on match, so the compare fires at OCR = k - 1. Sub-tick
// remainders round to the nearest tick. Intervals outside the 8-bit range
// raise a range error naming the nearest prescaler that could represent them.
inline std::uint8_t ocr_for_interval(const clock_config& cfg, seconds target_interval) {
    const double ticks = std::round(detail::ticks_for(cfg, target_interval));
    if (ticks >= 1.0 && ticks <= 256.0)
        return static_cast<std::uint8_t>(ticks - 1.0);

    std::string msg = "interval of " + format_number(detail::ticks_for(cfg, target_interval)) +
                      " ticks at prescaler " + std::to_string(cfg.prescaler()) +
                      " is outside the 8-bit timer range [1, 256]";
    unsigned best = 0;
    unsigned best_dist = ~0u;
    for (unsigned p : clock_config::allowed_prescalers) {
        const double t = std::round(detail::ticks_for({cfg.frequency_hz(), p}, target_interval));
        if (t < 1.0 || t > 256.0) continue;
        const unsigned dist = p > cfg.prescaler() ? p - cfg.prescaler() : cfg.prescaler() - p;
        if (dist < best_dist) {
            best = p;
            best_dist = dist;
        }
    }
    if (best != 0)
        msg += "; nearest feasible prescaler is " + std::to_string(best);
    else
        msg += "; no prescaler can represent this interval";
    throw range_error(msg);
}

enum class op_direction { encrypt, decrypt };

inline std::string direction_name(op_direction d) {
    return d == op_direction::encrypt ? "enc" : "dec";
}

struct calibration_row {
    std::size_t data_size;
    double enc_time_ms;
    double enc_cycles;
    double dec_time_ms;
    double dec_cycles;
};

// Measured (size, time, cycles) rows for both directions. The bundled default
// is the ATmega644P AES-128 CBC measurement set at 20 MHz. Note the cycle
// column of that set equals time_ms * 20, i.e. it is consistent only if the
// cycle counts are kilocycles or the times are actually microseconds; see
// unit_interpretation below. The as-recorded ratio is an invariant of every
// table.
class calibration_table {
public:
    explicit calibration_table(std::vector<calibration_row> rows,
                               double frequency_hz = 20'000'000.0)
        : rows_(std::move(rows)), frequency_hz_(frequency_hz) {
        if (rows_.empty()) throw error("calibration table needs at least one row");
        if (!(frequency_hz > 0.0)) throw range_error("calibration frequency must be positive");
        const double cycles_per_ms = frequency_hz_ / 1e6;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const calibration_row& r = rows_[i];
            if (r.data_size == 0 || r.enc_time_ms <= 0 || r.enc_cycles <= 0 ||
                r.dec_time_ms <= 0 || r.dec_cycles <= 0)
                throw error("calibration row " + std::to_string(i) +
                            ": sizes and measurements must be positive");
            if (i > 0 && rows_[i - 1].data_size >= r.data_size)
                throw error("calibration sizes must be strictly increasing");
            for (auto [cycles, time_ms] : {std::pair{r.enc_cycles, r.enc_time_ms},
                                           std::pair{r.dec_cycles, r.dec_time_ms}})
                if (std::abs(cycles - time_ms * cycles_per_ms) > 1e-6 * cycles)
                    throw error("calibration row " + std::to_string(i) +
                                ": cycles must equal time_ms * " + format_number(cycles_per_ms));
        }
    }

    static const calibration_table& builtin() {
        static const calibration_table t{{
            {16, 449, 8'980, 456, 9'120},
            {32, 898, 17'960, 912, 18'240},
            {64, 1'796, 35'920, 1'825, 36'500},
            {128, 3'592, 71'840, 3'649, 72'980},
            {256, 7'184, 143'680, 7'297, 145'940},
            {512, 14'368, 287'360, 14'592, 291'840},
        }};
        return t;
    }

    std::span<const calibration_row> rows() const { return rows_; }
    double frequency_hz() const { return frequency_hz_; }

    const calibration_row* row_for(std::size_t data_size) const {
        for (const auto& r : rows_)
            if (r.data_size == data_size) return &r;
        return nullptr;
    }

    static constexpr const char* csv_header = "size,enc_ms,enc_cycles,dec_ms,dec_cycles";

    static calibration_table load_csv(std::istream& in, double frequency_hz = 20'000'000.0) {
        std::string line;
        if (!std::getline(in, line)) throw error("calibration csv: empty input");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != csv_header)
            throw error(std::string("calibration csv: header must be \"") + csv_header + "\"");
        std::vector<calibration_row> rows;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::array<double, 5> fields{};
            std::size_t pos = 0;
            for (std::size_t f = 0; f < 5; ++f) {
                const std::size_t next = f < 4 ? line.find(',', pos) : line.size();
                if (next == std::string::npos)
                    throw error("calibration csv line " + std::to_string(lineno) +
                                ": expected 5 comma-separated fields");
                try {
                    fields[f] = std::stod(line.substr(pos, next - pos));
                } catch (const std::exception&) {
                    throw error("calibration csv line " + std::to_string(lineno) +
                                ": bad number \"" + line.substr(pos, next - pos) + "\"");
                }
                pos = next + 1;
            }
            rows.push_back({static_cast<std::size_t>(fields[0]), fields[1], fields[2], fields[3],
                            fields[4]});
        }
        return calibration_table(std::move(rows), frequency_hz);
    }

    void save_csv(std::ostream& out) const {
        out << csv_header << '\n';
        for (const auto& r : rows_)
            out << r.data_size << ',' << format_number(r.enc_time_ms) << ','
                << format_number(r.enc_cycles) << ',' << format_number(r.dec_time_ms) << ','
                << format_number(r.dec_cycles) << '\n';
    }

private:
    std::vector<calibration_row> rows_;
    double frequency_hz_;
};

// as_printed reports the time column exactly as recorded. physical resolves
// the unit question in favor of the cycle counts: time = cycles / frequency,
// which reads the recorded values as microseconds at 20 MHz.
enum class unit_interpretation { as_printed, physical };

struct prediction {
    double time_ms;
    double cycles;
};

namespace detail {

inline void check_data_size(std::size_t n) {
    if (n == 0 || n % 16 != 0)
        throw length_error("data size must be a positive multiple of 16 octets; got " +
                           std::to_string(n));
}

inline prediction apply_units(prediction p, const calibration_table& t, unit_interpretation u) {
    if (u == unit_interpretation::physical) p.time_ms = p.cycles / t.frequency_hz() * 1e3;
    return p;
}

} // namespace detail

// Pure linear model anchored at the first table row: time(n) = time(anchor)
// * n / anchor, cycles via the table's cycles-per-time ratio. Satisfies
// time(2n) = 2 * time(n) exactly.
inline prediction predict_linear(const calibration_table& table, std::size_t data_size,
                                 op_direction dir,
                                 unit_interpretation units = unit_interpretation::as_printed) {
    detail::check_data_size(data_size);
    const calibration_row& a = table.rows().front();
    const double anchor_time = dir == op_direction::encrypt ? a.enc_time_ms : a.dec_time_ms;
    const double anchor_cycles = dir == op_direction::encrypt ? a.enc_cycles : a.dec_cycles;
    const double time = anchor_time * static_cast<double>(data_size) /
                        static_cast<double>(a.data_size);
    return detail::apply_units({time, time * (anchor_cycles / anchor_time)}, table, units);
}

// Measured rows are returned verbatim; sizes between rows fall back to the
// linear model.
inline prediction predict(const calibration_table& table, std::size_t data_size, op_direction dir,
                          unit_interpretation units = unit_interpretation::as_printed) {
    detail::check_data_size(data_size);
    if (const calibration_row* r = table.row_for(data_size)) {
        const prediction exact{dir == op_direction::encrypt ? r->enc_time_ms : r->dec_time_ms,
                               dir == op_direction::encrypt ? r->enc_cycles : r->dec_cycles};
        return detail::apply_units(exact, table, units);
    }
    return predict_linear(table, data_size, dir, units);
}

} // namespace mcucrypt::mcu
