// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a flat, sectioned key-value text format. Parsing is
// strict (unknown sections, unknown keys, and duplicate scalar keys are
// errors) and every diagnostic carries the offending line number.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgns/integrator.hpp"
#include "sgns/transport_noise.hpp"

namespace sgns {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [truncation]
    int n_max = 2;
    // [integrator]
    IntegratorConfig integrator;
    // [noise]
    bool transport_none = false;   // transport = none: empty basis, zeta lines forbidden
    std::vector<CosineMode> zetas; // empty: use default_transport_basis()
    bool alpha_auto = true;        // alpha = auto N: derive rho from fitted constants
    int alpha_channels = 4;
    std::vector<double> alpha_list;
    double gamma = 1.5;
    // [experiment]
    std::string estimator = "moments"; // moments|bootstrap|decay|continuity|occupation
    int paths = 100;
    int threads = 1;
    std::vector<double> horizons{2.0, 4.0, 8.0};
    std::vector<double> deltas{0.1, 0.05, 0.025};
    std::vector<double> check_times{0.5, 1.0, 2.0, 4.0};
    double eps = 0.1;
    double p = 0.5;
    double s = 0.5;
    int fit_samples = 2000;
    int certify_samples = 1000;
    std::string x0_kind = "zero"; // zero | random | snapshot
    double x0_norm = 1.0;
    std::string x0_path;
    // [output]
    std::string out_dir = ".";

    std::string source_text; // full original text, echoed into outputs
};

namespace detail {

inline std::string config_trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> config_tokens(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] inline void config_fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

inline double config_double(const std::string& tok, int line, const char* key) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        config_fail(line, std::string("bad numeric value '") + tok + "' for " + key);
    return v;
}

inline long long config_int(const std::string& tok, int line, const char* key) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        config_fail(line, std::string("bad integer value '") + tok + "' for " + key);
    return v;
}

inline std::uint64_t config_u64(const std::string& tok, int line, const char* key) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        config_fail(line, std::string("bad seed value '") + tok + "' for " + key);
    return v;
}

inline std::vector<double> config_doubles(const std::string& val, int line, const char* key) {
    std::vector<double> out;
    for (const auto& tok : config_tokens(val)) out.push_back(config_double(tok, line, key));
    if (out.empty()) config_fail(line, std::string("empty list for ") + key);
    return out;
}

// zeta = kx ky kz | tx ty tz | c
inline CosineMode config_zeta(const std::string& val, int line) {
    std::string flat = val;
    int bars = 0;
    for (char& ch : flat)
        if (ch == '|') {
            ch = ' ';
            ++bars;
        }
    const auto toks = config_tokens(flat);
    if (bars != 2 || toks.size() != 7)
        config_fail(line, "zeta expects 'kx ky kz | tx ty tz | c'");
    CosineMode zm;
    for (int i = 0; i < 3; ++i)
        zm.k[i] = static_cast<int>(config_int(toks[static_cast<std::size_t>(i)], line, "zeta"));
    for (int i = 0; i < 3; ++i)
        zm.theta[static_cast<std::size_t>(i)] =
            config_double(toks[static_cast<std::size_t>(i) + 3], line, "zeta");
    zm.c = config_double(toks[6], line, "zeta");
    return zm;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.source_text = text;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    std::map<std::string, int> seen; // section.key -> first line, duplicate guard
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = detail::config_trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') detail::config_fail(line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "truncation" && section != "integrator" && section != "noise" &&
                section != "experiment" && section != "output")
                detail::config_fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) detail::config_fail(line, "expected 'key = value'");
        const std::string key = detail::config_trim(s.substr(0, eq));
        const std::string val = detail::config_trim(s.substr(eq + 1));
        if (key.empty() || val.empty()) detail::config_fail(line, "expected 'key = value'");
        if (section.empty()) detail::config_fail(line, "key before any [section]");
        const std::string qual = section + "." + key;
        if (key != "zeta" && !seen.emplace(qual, line).second)
            detail::config_fail(line, "duplicate key '" + qual + "'");

        if (section == "truncation") {
            if (key == "n_max")
                cfg.n_max = static_cast<int>(detail::config_int(val, line, "n_max"));
            else
                detail::config_fail(line, "unknown key '" + qual + "'");
        } else if (section == "integrator") {
            if (key == "dt") cfg.integrator.dt = detail::config_double(val, line, "dt");
            else if (key == "t_end")
                cfg.integrator.t_end = detail::config_double(val, line, "t_end");
            else if (key == "scheme") {
                if (val == "exponential_em") cfg.integrator.scheme = Scheme::exponential_em;
                else if (val == "semi_implicit_em")
                    cfg.integrator.scheme = Scheme::semi_implicit_em;
                else detail::config_fail(line, "unknown scheme '" + val + "'");
            } else if (key == "snapshot_stride")
                cfg.integrator.snapshot_stride =
                    static_cast<int>(detail::config_int(val, line, "snapshot_stride"));
            else if (key == "r_threshold")
                cfg.integrator.r_threshold = detail::config_double(val, line, "r_threshold");
            else if (key == "seed") cfg.integrator.seed = detail::config_u64(val, line, "seed");
            else detail::config_fail(line, "unknown key '" + qual + "'");
        } else if (section == "noise") {
            if (key == "zeta") cfg.zetas.push_back(detail::config_zeta(val, line));
            else if (key == "transport") {
                if (val == "none") cfg.transport_none = true;
                else if (val != "default")
                    detail::config_fail(line, "transport expects 'default' or 'none'");
            } else if (key == "alpha") {
                const auto toks = detail::config_tokens(val);
                if (!toks.empty() && toks[0] == "auto") {
                    if (toks.size() != 2) detail::config_fail(line, "alpha = auto N");
                    cfg.alpha_auto = true;
                    cfg.alpha_channels =
                        static_cast<int>(detail::config_int(toks[1], line, "alpha"));
                } else {
                    cfg.alpha_auto = false;
                    cfg.alpha_list = detail::config_doubles(val, line, "alpha");
                }
            } else if (key == "gamma") cfg.gamma = detail::config_double(val, line, "gamma");
            else detail::config_fail(line, "unknown key '" + qual + "'");
        } else if (section == "experiment") {
            if (key == "estimator") {
                if (val != "moments" && val != "bootstrap" && val != "decay" &&
                    val != "continuity" && val != "occupation")
                    detail::config_fail(line, "unknown estimator '" + val + "'");
                cfg.estimator = val;
            } else if (key == "paths")
                cfg.paths = static_cast<int>(detail::config_int(val, line, "paths"));
            else if (key == "threads")
                cfg.threads = static_cast<int>(detail::config_int(val, line, "threads"));
            else if (key == "horizons")
                cfg.horizons = detail::config_doubles(val, line, "horizons");
            else if (key == "deltas") cfg.deltas = detail::config_doubles(val, line, "deltas");
            else if (key == "check_times")
                cfg.check_times = detail::config_doubles(val, line, "check_times");
            else if (key == "eps") cfg.eps = detail::config_double(val, line, "eps");
            else if (key == "p") cfg.p = detail::config_double(val, line, "p");
            else if (key == "s") cfg.s = detail::config_double(val, line, "s");
            else if (key == "fit_samples")
                cfg.fit_samples = static_cast<int>(detail::config_int(val, line, "fit_samples"));
            else if (key == "certify_samples")
                cfg.certify_samples =
                    static_cast<int>(detail::config_int(val, line, "certify_samples"));
            else if (key == "x0") {
                const auto toks = detail::config_tokens(val);
                if (toks[0] == "zero" && toks.size() == 1) cfg.x0_kind = "zero";
                else if (toks[0] == "random" && toks.size() == 2) {
                    cfg.x0_kind = "random";
                    cfg.x0_norm = detail::config_double(toks[1], line, "x0");
                } else if (toks[0] == "snapshot" && toks.size() == 2) {
                    cfg.x0_kind = "snapshot";
                    cfg.x0_path = toks[1];
                } else
                    detail::config_fail(line, "x0 expects 'zero', 'random NORM', or "
                                              "'snapshot PATH'");
            } else
                detail::config_fail(line, "unknown key '" + qual + "'");
        } else { // output
            if (key == "dir") cfg.out_dir = val;
            else detail::config_fail(line, "unknown key '" + qual + "'");
        }
    }
    if (cfg.n_max < 1) throw ConfigError("config: n_max must be >= 1");
    if (!(cfg.integrator.dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (!(cfg.gamma > 1.0 && cfg.gamma < 2.0)) throw ConfigError("config: gamma outside (1,2)");
    if (cfg.paths < 1) throw ConfigError("config: paths must be >= 1");
    if (cfg.transport_none && !cfg.zetas.empty())
        throw ConfigError("config: zeta lines conflict with transport = none");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

} // namespace sgns
