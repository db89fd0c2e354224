// SPDX-License-Identifier: Apache-2.0
//
// Report and CSV emission. Every output artifact begins with the tool
// version and a full echo of the config text, so any file can be
// reproduced from itself plus the binary. Doubles are serialized in
// shortest round-trip form to keep reruns byte-identical.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgns/certify.hpp"
#include "sgns/config.hpp"
#include "sgns/estimators.hpp"
#include "sgns/inequalities.hpp"
#include "sgns/integrator.hpp"
#include "sgns/version.hpp"

namespace sgns {

using ordered_json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string format_double(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

inline ordered_json tool_block() {
    return ordered_json{{"name", kToolName}, {"version", kToolVersion}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

// '# '-prefixed preamble shared by all CSV outputs.
inline std::string csv_preamble(const RunConfig& cfg) {
    std::string out;
    out += std::string("# ") + kToolName + " " + kToolVersion + "\n";
    out += "# seed: " + std::to_string(cfg.integrator.seed) + "\n";
    std::istringstream is(cfg.source_text);
    std::string line;
    while (std::getline(is, line)) out += "# config: " + line + "\n";
    return out;
}

inline ordered_json to_json(const InequalityReport& r) {
    return ordered_json{{"name", r.name},
                        {"samples", r.samples},
                        {"worst_ratio", r.worst_ratio},
                        {"fitted_constant", r.fitted_constant},
                        {"passed", r.passed}};
}

inline ordered_json to_json(const HypothesisCertificate& c) {
    return ordered_json{
        {"which", c.which}, {"passed", c.passed}, {"margin", c.margin}, {"samples", c.samples}};
}

inline ordered_json to_json(const MomentCurve& mc) {
    return ordered_json{{"p", mc.p},
                        {"s", mc.s},
                        {"n_paths", mc.n_paths},
                        {"time_integral_mean", mc.time_integral_mean},
                        {"time_integral_std_err", mc.time_integral_std_err}};
}

inline ordered_json to_json(const BootstrapReport& br) {
    return ordered_json{{"eps", br.eps},
                        {"sup_mean_on_window", br.sup_mean_on_window},
                        {"theta_mean", br.theta_mean},
                        {"dissipation_mean", br.dissipation_mean},
                        {"dissipation_std_err", br.dissipation_std_err},
                        {"n_paths", br.curve.n_paths}};
}

inline ordered_json to_json(const DecayFit& df) {
    return ordered_json{{"kappa_hat", df.kappa_hat},
                        {"kappa_bound", df.kappa_bound},
                        {"passed", df.passed},
                        {"covered", df.covered},
                        {"mean_test_ok", df.mean_test_ok},
                        {"supermartingale_ok", df.supermartingale_ok},
                        {"check_times", df.check_times},
                        {"note", df.note}};
}

inline ordered_json to_json(const ContinuityReport& cr) {
    return ordered_json{{"deltas", cr.deltas},
                        {"median_sup", cr.median_sup},
                        {"median_integral", cr.median_integral},
                        {"stopped_fraction", cr.stopped_fraction},
                        {"passed", cr.passed},
                        {"stopping_dominated", cr.stopping_dominated}};
}

inline ordered_json to_json(const OccupationStats& os) {
    return ordered_json{{"horizon", os.horizon},
                        {"functional_mean", os.functional_mean},
                        {"functional_std_err", os.functional_std_err},
                        {"bin_edges", os.bin_edges},
                        {"hist_mean", os.hist_mean},
                        {"hist_std_err", os.hist_std_err},
                        {"n_paths", os.n_paths}};
}

inline std::string curve_csv(const RunConfig& cfg, const MomentCurve& mc) {
    std::string out = csv_preamble(cfg);
    out += "t,mean,std_err\n";
    for (std::size_t i = 0; i < mc.times.size(); ++i)
        out += format_double(mc.times[i]) + "," + format_double(mc.values[i]) + "," +
               format_double(mc.std_err[i]) + "\n";
    return out;
}

// The persisted trajectory table: the header carries the config echo, the
// seed, and the hash of the certificate report the run was gated on.
inline std::string trajectory_csv(const RunConfig& cfg, const TrajectoryRecord& rec,
                                  std::uint64_t certificates_hash) {
    std::string out = csv_preamble(cfg);
    out += "# certificates: fnv1a64:" + hex64(certificates_hash) + "\n";
    out += "# scheme: " + std::string(scheme_name(rec.cfg.scheme)) + "\n";
    out += "# gamma: " + format_double(rec.gamma) + "\n";
    out += "t,h_half_sq,h_one_sq,h_three_half_sq,decay_functional,stopped\n";
    for (const auto& row : rec.rows) {
        out += format_double(row.t) + "," + format_double(row.h_half_sq) + "," +
               format_double(row.h_one_sq) + "," + format_double(row.h_three_half_sq) + "," +
               format_double(row.decay_functional) + "," + (row.stopped ? "1" : "0") + "\n";
    }
    return out;
}

} // namespace sgns
