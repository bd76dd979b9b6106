// Command-line front end: encrypt/decrypt files with CBC, run the benchmark
// harness, simulate relay chains, and work the MCU timer arithmetic.
// Exit status: 0 success, 1 usage error, 2 domain error. Machine output goes
// to stdout, diagnostics to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcucrypt/bench.hpp"
#include "mcucrypt/cbc.hpp"
#include "mcucrypt/hopnet.hpp"
#include "mcucrypt/mcu_timing.hpp"
#include "mcucrypt/text.hpp"

namespace {

using namespace mcucrypt;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw error("cannot open input file: " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> data) {
    if (path.empty()) {
        std::fwrite(data.data(), 1, data.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open output file: " + path);
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw error("cannot open output file: " + path);
    f << text;
}

aes::block block_from_hex(const std::string& hex, const char* what) {
    const std::vector<std::uint8_t> bytes = from_hex(hex);
    if (bytes.size() != aes::block_size)
        throw length_error(std::string(what) + " must be exactly 16 octets (32 hex digits); got " +
                           std::to_string(bytes.size()));
    aes::block b{};
    std::copy(bytes.begin(), bytes.end(), b.begin());
    return b;
}

// First column left-aligned, the rest right-aligned, two-space gutters.
std::string render_aligned(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == 0) {
                out += row[c];
                out.append(widths[c] - row[c].size(), ' ');
            } else {
                out.append(2 + widths[c] - row[c].size(), ' ');
                out += row[c];
            }
        }
        out += '\n';
    }
    return out;
}

struct cipher_args {
    std::string key_hex;
    std::string iv_hex;
    std::string in_path;
    std::string out_path;
    std::string pad = "none";
};

void add_cipher_options(CLI::App* cmd, cipher_args& a) {
    cmd->add_option("--key", a.key_hex, "cipher key as hex (16, 24, or 32 octets)")->required();
    cmd->add_option("--iv", a.iv_hex, "initialization vector as hex (16 octets)")->required();
    cmd->add_option("--in", a.in_path, "input file")->required();
    cmd->add_option("--out", a.out_path, "output file (default: standard out)");
    cmd->add_option("--pad", a.pad, "padding policy")
        ->check(CLI::IsMember({"none", "pkcs7"}))
        ->capture_default_str();
}

int run_cipher(const cipher_args& a, bool encrypting) {
    const cbc::context ctx{aes::key_schedule(aes::cipher_key(from_hex(a.key_hex))),
                           block_from_hex(a.iv_hex, "iv")};
    const cbc::padding pad = a.pad == "pkcs7" ? cbc::padding::pkcs7 : cbc::padding::none;
    const std::vector<std::uint8_t> input = read_file(a.in_path);
    const std::vector<std::uint8_t> output =
        encrypting ? cbc::encrypt(ctx, input, pad) : cbc::decrypt(ctx, input, pad);
    write_bytes(a.out_path, output);
    return 0;
}

std::string bench_table(const bench::report& rep) {
    std::vector<std::string> sizes;
    for (std::size_t s : rep.cfg.data_sizes) sizes.push_back(std::to_string(s));

    auto row_for = [&](mcu::op_direction dir, auto getter) {
        std::vector<std::string> row;
        for (std::size_t s : rep.cfg.data_sizes)
            for (const auto& c : rep.cells)
                if (c.data_size == s && c.direction == dir) row.push_back(getter(c));
        return row;
    };
    auto labeled = [](std::string label, std::vector<std::string> cells) {
        cells.insert(cells.begin(), std::move(label));
        return cells;
    };

    std::vector<std::vector<std::string>> rows;
    rows.push_back(labeled("data size (octets)", sizes));
    for (auto dir : {mcu::op_direction::encrypt, mcu::op_direction::decrypt}) {
        const std::string d = mcu::direction_name(dir);
        rows.push_back(labeled(d + " model time (ms)", row_for(dir, [](const auto& c) {
                                   return format_number(c.model_ms);
                               })));
        rows.push_back(labeled(d + " model cpu cycles", row_for(dir, [](const auto& c) {
                                   return format_number(c.model_cycles);
                               })));
        rows.push_back(labeled(d + " host median (ns)", row_for(dir, [](const auto& c) {
                                   return format_number(c.host_ns);
                               })));
    }
    rows.push_back(labeled("block ops per cell", row_for(mcu::op_direction::encrypt,
                                                         [](const auto& c) {
                                                             return std::to_string(c.block_ops);
                                                         })));
    return render_aligned(rows);
}

nlohmann::ordered_json params_json(const hopnet::delay_params& p) {
    return {{"t_enc_ms", p.t_enc_ms},
            {"t_dec_ms", p.t_dec_ms},
            {"t_tx_ms", p.t_tx_ms},
            {"delta_t_ms", p.delta_t_ms}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"from-scratch AES/CBC with an 8-bit MCU timing model and a hop-by-hop "
                 "encrypted-relay delay simulator"};
    app.require_subcommand(1);

    cipher_args enc_args;
    cipher_args dec_args;
    CLI::App* enc_cmd = app.add_subcommand("encrypt", "CBC-encrypt a file");
    add_cipher_options(enc_cmd, enc_args);
    CLI::App* dec_cmd = app.add_subcommand("decrypt", "CBC-decrypt a file");
    add_cipher_options(dec_cmd, dec_args);

    // bench
    bench::config bench_cfg;
    std::string bench_format = "table";
    std::string bench_out;
    std::string bench_calibration;
    std::string bench_units = "as-printed";
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "run the CBC size sweep and report host + model numbers");
    bench_cmd->add_option("--sizes", bench_cfg.data_sizes, "data sizes in octets")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--reps", bench_cfg.repetitions, "repetitions per cell")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench_cfg.seed, "payload RNG seed")->capture_default_str();
    bench_cmd->add_option("--format", bench_format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "output file (default: standard out)");
    bench_cmd->add_option("--calibration", bench_calibration,
                          "calibration CSV (default: built-in MCU measurements)");
    bench_cmd->add_option("--units", bench_units, "calibration time units reading")
        ->check(CLI::IsMember({"as-printed", "physical"}))
        ->capture_default_str();

    // simulate
    hopnet::delay_params sim_params;
    std::size_t sim_hops = 0;
    std::size_t sim_sweep = 0;
    std::size_t sim_payload = 16;
    std::uint64_t sim_seed = 1;
    std::string sim_interp = "linear";
    std::string sim_format = "table";
    std::string sim_out;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "relay a message hop by hop and account the delays");
    CLI::Option* hops_opt = sim_cmd->add_option("--hops", sim_hops, "chain length in hops");
    CLI::Option* sweep_opt =
        sim_cmd->add_option("--sweep", sim_sweep, "emit totals for every hop count 1..N");
    hops_opt->excludes(sweep_opt);
    sweep_opt->excludes(hops_opt);
    sim_cmd->add_option("--t-enc", sim_params.t_enc_ms, "per-hop encryption delay, ms")
        ->capture_default_str();
    sim_cmd->add_option("--t-dec", sim_params.t_dec_ms, "per-hop decryption delay, ms")
        ->capture_default_str();
    sim_cmd->add_option("--t-tx", sim_params.t_tx_ms, "per-hop transfer delay, ms")
        ->capture_default_str();
    sim_cmd->add_option("--dt", sim_params.delta_t_ms, "channel access/allocation delay, ms")
        ->capture_default_str();
    sim_cmd->add_option("--interpretation", sim_interp, "total-delay formula")
        ->check(CLI::IsMember({"linear", "summation"}))
        ->capture_default_str();
    sim_cmd->add_option("--payload-size", sim_payload, "relay payload size, octets")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed, "pairwise-key derivation seed")
        ->capture_default_str();
    sim_cmd->add_option("--format", sim_format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output file (default: standard out)");

    // timer
    double timer_freq = 20'000'000.0;
    unsigned timer_prescaler = 8;
    double timer_target_us = 0.0;
    std::string timer_format = "table";
    CLI::App* timer_cmd =
        app.add_subcommand("timer", "clock/prescaler/OCR arithmetic for the modeled MCU");
    timer_cmd->add_option("--freq-hz", timer_freq, "system clock frequency, Hz")
        ->capture_default_str();
    timer_cmd->add_option("--prescaler", timer_prescaler, "timer prescaler (8/64/256/1024)")
        ->capture_default_str();
    CLI::Option* target_opt =
        timer_cmd->add_option("--target-us", timer_target_us, "compare interval to solve, us");
    timer_cmd->add_option("--format", timer_format, "output format")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
    std::string timer_out;
    timer_cmd->add_option("--out", timer_out, "output file (default: standard out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (enc_cmd->parsed()) return run_cipher(enc_args, true);
        if (dec_cmd->parsed()) return run_cipher(dec_args, false);

        if (bench_cmd->parsed()) {
            bench_cfg.units = bench_units == "physical" ? mcu::unit_interpretation::physical
                                                        : mcu::unit_interpretation::as_printed;
            bench::report rep;
            if (!bench_calibration.empty()) {
                std::ifstream f(bench_calibration);
                if (!f) throw error("cannot open calibration file: " + bench_calibration);
                rep = bench::run(bench_cfg, mcu::calibration_table::load_csv(f));
            } else {
                rep = bench::run(bench_cfg);
            }
            if (bench_format == "table")
                write_text(bench_out, bench_table(rep));
            else
                write_text(bench_out, bench::emit(rep, bench_format == "csv"
                                                           ? bench::format::csv
                                                           : bench::format::json));
            return 0;
        }

        if (sim_cmd->parsed()) {
            const hopnet::interpretation interp = sim_interp == "summation"
                                                      ? hopnet::interpretation::summation
                                                      : hopnet::interpretation::linear;
            if (*sweep_opt) {
                const auto rows = hopnet::sweep(sim_params, sim_sweep, interp);
                if (sim_format == "csv") {
                    std::string out = "hops,total_delay_ms\n";
                    for (const auto& r : rows)
                        out += std::to_string(r.hops) + "," + format_number(r.total_ms) + "\n";
                    write_text(sim_out, out);
                } else if (sim_format == "json") {
                    nlohmann::ordered_json j;
                    j["params"] = params_json(sim_params);
                    j["interpretation"] = sim_interp;
                    j["rows"] = nlohmann::ordered_json::array();
                    for (const auto& r : rows)
                        j["rows"].push_back({{"hops", r.hops}, {"total_ms", r.total_ms}});
                    write_text(sim_out, j.dump(2) + "\n");
                } else {
                    std::vector<std::vector<std::string>> t{{"hops", "total delay (ms)"}};
                    for (const auto& r : rows)
                        t.push_back({std::to_string(r.hops), format_number(r.total_ms)});
                    write_text(sim_out, render_aligned(t));
                }
                return 0;
            }
            if (!*hops_opt) {
                std::cerr << "simulate: one of --hops or --sweep is required\n";
                return 1;
            }

            const hopnet::hop_chain chain = hopnet::hop_chain::with_hops(sim_hops, sim_seed);
            std::mt19937_64 rng(sim_seed);
            std::vector<std::uint8_t> payload(sim_payload);
            for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
            const hopnet::sim_report rep = hopnet::relay(chain, payload, sim_params);
            const double total = interp == hopnet::interpretation::linear
                                     ? rep.total_linear_ms
                                     : rep.total_summation_ms;

            if (sim_format == "csv") {
                std::string out = "hop,digest,delay_ms,cumulative_ms\n";
                for (const auto& h : rep.ledger)
                    out += std::to_string(h.hop) + "," + h.message_digest + "," +
                           format_number(h.delay_ms) + "," + format_number(h.cumulative_ms) + "\n";
                write_text(sim_out, out);
            } else if (sim_format == "json") {
                nlohmann::ordered_json j;
                j["params"] = params_json(sim_params);
                j["hops"] = rep.hops;
                j["payload_octets"] = rep.payload_octets;
                j["seed"] = sim_seed;
                j["interpretation"] = sim_interp;
                j["hop_delay_ms"] = hopnet::hop_delay_ms(sim_params);
                j["total_delay_ms"] = total;
                j["total_linear_ms"] = rep.total_linear_ms;
                j["total_summation_ms"] = rep.total_summation_ms;
                j["plaintext_intact"] = rep.plaintext_intact;
                j["ledger"] = nlohmann::ordered_json::array();
                for (const auto& h : rep.ledger)
                    j["ledger"].push_back({{"hop", h.hop},
                                           {"digest", h.message_digest},
                                           {"delay_ms", h.delay_ms},
                                           {"cumulative_ms", h.cumulative_ms}});
                write_text(sim_out, j.dump(2) + "\n");
            } else {
                std::vector<std::vector<std::string>> t;
                t.push_back({"hops", std::to_string(rep.hops)});
                t.push_back({"payload (octets)", std::to_string(rep.payload_octets)});
                t.push_back({"hop delay (ms)", format_number(hopnet::hop_delay_ms(sim_params))});
                t.push_back({"interpretation", sim_interp});
                t.push_back({"total delay (ms)", format_number(total)});
                t.push_back({"linear total (ms)", format_number(rep.total_linear_ms)});
                t.push_back({"summation total (ms)", format_number(rep.total_summation_ms)});
                t.push_back({"plaintext intact", rep.plaintext_intact ? "yes" : "no"});
                write_text(sim_out, render_aligned(t));
            }
            return 0;
        }

        if (timer_cmd->parsed()) {
            const mcu::clock_config cfg(timer_freq, timer_prescaler);
            const double clock_ns = mcu::clock_period(cfg).count() * 1e9;
            const double prescaled_ns = mcu::prescaled_period(cfg).count() * 1e9;
            if (timer_format == "json") {
                nlohmann::ordered_json j;
                j["frequency_hz"] = cfg.frequency_hz();
                j["prescaler"] = cfg.prescaler();
                j["clock_period_ns"] = clock_ns;
                j["prescaled_period_ns"] = prescaled_ns;
                if (*target_opt) {
                    const mcu::seconds target{timer_target_us * 1e-6};
                    j["target_us"] = timer_target_us;
                    j["ocr"] = mcu::ocr_for_interval(cfg, target);
                }
                write_text(timer_out, j.dump(2) + "\n");
            } else {
                std::vector<std::vector<std::string>> t;
                t.push_back({"clock frequency (hz)", format_number(cfg.frequency_hz())});
                t.push_back({"prescaler", std::to_string(cfg.prescaler())});
                t.push_back({"clock period (ns)", format_number(clock_ns)});
                t.push_back({"prescaled period (ns)", format_number(prescaled_ns)});
                if (*target_opt) {
                    const mcu::seconds target{timer_target_us * 1e-6};
                    const std::uint8_t ocr = mcu::ocr_for_interval(cfg, target);
                    t.push_back({"target (us)", format_number(timer_target_us)});
                    t.push_back({"ocr", std::to_string(ocr)});
                }
                write_text(timer_out, render_aligned(t));
            }
            return 0;
        }
    } catch (const mcucrypt::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
