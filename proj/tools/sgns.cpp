// SPDX-License-Identifier: Apache-2.0
//
// Command line entry point. Subcommands:
//   certify   fit inequality constants and certify the noise hypotheses
//   simulate  integrate one path and write the trajectory table
//   estimate  run a Monte-Carlo estimator and write its report
//
// simulate and estimate are gated on a passing certificate report; the gate
// can be bypassed with --allow-uncertified, in which case results are marked
// as not covered. Exit codes: 0 pass, 1 verdict fail, 2 usage, 3 runtime
// fault.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgns/sgns.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFault = 3;

// A run whose gate or statistical verdict failed; maps to exit code 1.
class VerdictError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Stream purposes, disjoint from the estimator-internal ones.
constexpr std::uint64_t kPurposeFit = 0x66697401;
constexpr std::uint64_t kPurposeCertify = 0x63657201;
constexpr std::uint64_t kPurposeX0 = 0x78300001;
constexpr std::uint64_t kPurposePath = 0x70617401;
constexpr std::uint64_t kPurposeEnsemble = 0x656e7301;

struct Options {
    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> paths_override;
    std::string estimator_override;
    bool allow_uncertified = false;
};

std::string out_path(const sgns::RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

sgns::TransportNoiseBasis build_basis(const sgns::RunConfig& cfg) {
    if (cfg.transport_none) return sgns::TransportNoiseBasis({});
    if (cfg.zetas.empty()) return sgns::default_transport_basis();
    return sgns::TransportNoiseBasis(cfg.zetas);
}

// Raw N0 of the configured zeta list, computable without constructing the
// basis; used to report an Hsigma2 failure instead of crashing on it.
double raw_n0(const sgns::RunConfig& cfg) {
    if (cfg.transport_none) return 0.0;
    const auto& zs = cfg.zetas.empty() ? sgns::default_transport_basis().modes() : cfg.zetas;
    double n0 = 0.0;
    for (const auto& z : zs) {
        const double t =
            std::sqrt(z.theta[0] * z.theta[0] + z.theta[1] * z.theta[1] + z.theta[2] * z.theta[2]);
        n0 += (z.c * t) * (z.c * t);
    }
    return n0;
}

// Zeta entries that make the basis ill-formed regardless of hypotheses are
// config errors, not failed certificates.
void validate_zetas(const sgns::RunConfig& cfg) {
    for (const auto& z : cfg.zetas) {
        if (z.k.is_zero()) throw sgns::ConfigError("config: zeta with zero wavevector");
        if (!(z.c >= 0.0)) throw sgns::ConfigError("config: zeta with negative coefficient");
    }
    if (!cfg.alpha_auto)
        for (double a : cfg.alpha_list)
            if (!std::isfinite(a)) throw sgns::ConfigError("config: non-finite alpha");
    if (cfg.alpha_auto && cfg.alpha_channels < 1)
        throw sgns::ConfigError("config: alpha = auto N requires N >= 1");
}

struct Certification {
    sgns::Bes12Result bes;
    sgns::InequalityReport bminus1;
    std::vector<sgns::HypothesisCertificate> certs;
    double delta1 = 0.0, delta2 = 0.0;
    bool passed = false; // every inequality and certificate
    std::string text;    // serialized report, as written to disk
};

sgns::KirchhoffNoise build_noise(const sgns::RunConfig& cfg, const sgns::TransportNoiseBasis& basis,
                                 double delta1, double delta2) {
    if (cfg.alpha_auto)
        return sgns::make_kirchhoff(basis, delta1, delta2, cfg.gamma, cfg.alpha_channels);
    const double k1 = sgns::derive_kappa1(basis, delta1);
    const double k2 = sgns::derive_kappa2(delta2);
    return sgns::KirchhoffNoise(cfg.alpha_list, cfg.gamma, k1, k2);
}

sgns::ordered_json certification_json(const sgns::RunConfig& cfg,
                                      const sgns::TransportNoiseBasis& basis,
                                      const sgns::KirchhoffNoise& noise, const Certification& c) {
    sgns::ordered_json j;
    j["tool"] = sgns::tool_block();
    j["seed"] = cfg.integrator.seed;
    j["config"] = cfg.source_text;
    j["fitted"] = sgns::ordered_json{{"delta1", c.delta1},
                                     {"delta2", c.delta2},
                                     {"fit_samples", cfg.fit_samples},
                                     {"certify_samples", cfg.certify_samples}};
    j["inequalities"] = sgns::ordered_json::array(
        {sgns::to_json(c.bes.bes1), sgns::to_json(c.bes.bes2), sgns::to_json(c.bminus1)});
    j["noise"] = sgns::ordered_json{{"gamma", noise.gamma()},   {"rho", noise.rho()},
                                    {"kappa1", noise.kappa1()}, {"kappa2", noise.kappa2()},
                                    {"alphas", noise.alphas()}, {"M0", basis.M0()},
                                    {"N0", basis.N0()},         {"channels", basis.size()}};
    j["sufficient_conditions"] =
        sgns::ordered_json{{"rho_min_hg2star", noise.kappa1() / (noise.gamma() - 1.0)},
                           {"rho_min_hg3", noise.kappa2()},
                           {"admissible", noise.admissible()}};
    auto certs = sgns::ordered_json::array();
    for (const auto& cert : c.certs) certs.push_back(sgns::to_json(cert));
    j["certificates"] = certs;
    j["hg1_note"] = sgns::kHg1Note;
    j["all_passed"] = c.passed;
    return j;
}

// Fits the inequality constants, builds the noise they imply, and evaluates
// the hypothesis certificates. Writes nothing.
Certification run_certification(const sgns::RunConfig& cfg, const sgns::TransportNoiseBasis& basis,
                                sgns::KirchhoffNoise* noise_out) {
    auto table = sgns::ModeTable::get(cfg.n_max);
    Certification c;
    auto rng_fit = sgns::make_stream(cfg.integrator.seed, 0, kPurposeFit);
    c.bes = sgns::verify_bes12(cfg.fit_samples, table->trunc(), rng_fit);
    c.bminus1 = sgns::fit_b_minus1(cfg.fit_samples, table->trunc(), rng_fit);
    c.delta1 = c.bes.bes1.fitted_constant;
    c.delta2 = c.bes.bes2.fitted_constant;
    sgns::KirchhoffNoise noise = build_noise(cfg, basis, c.delta1, c.delta2);
    auto rng_cert = sgns::make_stream(cfg.integrator.seed, 0, kPurposeCertify);
    c.certs = sgns::certify_hypotheses(basis, noise, c.delta1, c.delta2, cfg.certify_samples,
                                       table, rng_cert);
    c.passed = c.bes.bes1.passed && c.bes.bes2.passed && c.bminus1.passed &&
               sgns::all_passed(c.certs);
    c.text = certification_json(cfg, basis, noise, c).dump(2) + "\n";
    if (noise_out) *noise_out = noise;
    return c;
}

int cmd_certify(const sgns::RunConfig& cfg) {
    validate_zetas(cfg);
    std::filesystem::create_directories(cfg.out_dir);

    // A basis violating Hsigma2 cannot even be constructed; report the
    // failed certificate rather than propagate the construction error.
    const double n0 = raw_n0(cfg);
    if (n0 >= 0.125) {
        sgns::ordered_json j;
        j["tool"] = sgns::tool_block();
        j["seed"] = cfg.integrator.seed;
        j["config"] = cfg.source_text;
        j["certificates"] = sgns::ordered_json::array(
            {sgns::to_json(sgns::HypothesisCertificate{"Hsigma2", false, 0.125 - n0, 0})});
        j["all_passed"] = false;
        sgns::write_text_file(out_path(cfg, "certificates.json"), j.dump(2) + "\n");
        std::fprintf(stderr, "certify: transport basis rejected, N0 = %s >= 1/8\n",
                     sgns::format_double(n0).c_str());
        std::printf("Hsigma2 FAIL (margin %s)\n", sgns::format_double(0.125 - n0).c_str());
        return kExitVerdict;
    }

    const sgns::TransportNoiseBasis basis = build_basis(cfg);
    sgns::KirchhoffNoise noise({}, cfg.gamma, 0.0, 0.0);
    const Certification c = run_certification(cfg, basis, &noise);
    sgns::write_text_file(out_path(cfg, "certificates.json"), c.text);

    for (const auto& r : {c.bes.bes1, c.bes.bes2, c.bminus1})
        std::printf("%-8s %s (fitted %s, worst ratio %s)\n", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", sgns::format_double(r.fitted_constant).c_str(),
                    sgns::format_double(r.worst_ratio).c_str());
    for (const auto& cert : c.certs)
        std::printf("%-8s %s (margin %s)\n", cert.which.c_str(), cert.passed ? "PASS" : "FAIL",
                    sgns::format_double(cert.margin).c_str());
    std::printf("certificates: %s\n", c.passed ? "all passed" : "FAILED");
    return c.passed ? kExitPass : kExitVerdict;
}

struct Gate {
    sgns::TransportNoiseBasis basis;
    sgns::KirchhoffNoise noise;
    bool certified = false;
    std::uint64_t cert_hash = 0;
};

// Loads certificates.json from the output directory, or produces and writes
// it when absent. The fitted constants always come from the report so that
// a rerun against an existing report reproduces the same noise.
Gate certification_gate(const sgns::RunConfig& cfg, bool allow_uncertified) {
    validate_zetas(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    if (raw_n0(cfg) >= 0.125)
        throw sgns::ConfigError("transport basis violates Hsigma2 (N0 >= 1/8); "
                                "run certify for the report");
    const sgns::TransportNoiseBasis basis = build_basis(cfg);

    const std::string cert_path = out_path(cfg, "certificates.json");
    std::string text;
    double delta1 = 0.0, delta2 = 0.0;
    bool passed = false;
    if (std::ifstream is(cert_path, std::ios::binary); is) {
        std::stringstream buf;
        buf << is.rdbuf();
        text = buf.str();
        try {
            const auto j = sgns::ordered_json::parse(text);
            delta1 = j.at("fitted").at("delta1").get<double>();
            delta2 = j.at("fitted").at("delta2").get<double>();
            passed = j.at("all_passed").get<bool>();
        } catch (const std::exception& e) {
            throw std::runtime_error("unreadable certificate report '" + cert_path +
                                     "': " + e.what());
        }
    } else {
        sgns::KirchhoffNoise noise({}, cfg.gamma, 0.0, 0.0);
        const Certification c = run_certification(cfg, basis, &noise);
        sgns::write_text_file(cert_path, c.text);
        text = c.text;
        delta1 = c.delta1;
        delta2 = c.delta2;
        passed = c.passed;
    }
    if (!passed && !allow_uncertified)
        throw VerdictError("certificates not passed; rerun certify or pass "
                                 "--allow-uncertified");
    return Gate{basis, build_noise(cfg, basis, delta1, delta2), passed, sgns::fnv1a64(text)};
}

sgns::SpectralField resolve_x0(const sgns::RunConfig& cfg,
                               const std::shared_ptr<const sgns::ModeTable>& table) {
    if (cfg.x0_kind == "zero") return sgns::SpectralField::zero(table);
    if (cfg.x0_kind == "random") {
        auto rng = sgns::make_stream(cfg.integrator.seed, 0, kPurposeX0);
        return sgns::random_field(table, 0.5, cfg.x0_norm, rng);
    }
    sgns::SnapshotMeta meta{};
    sgns::SpectralField f = sgns::load_snapshot(cfg.x0_path, &meta);
    if (meta.n_max != cfg.n_max)
        throw sgns::ConfigError("snapshot '" + cfg.x0_path + "' has n_max " +
                                std::to_string(meta.n_max) + ", config wants " +
                                std::to_string(cfg.n_max));
    return f;
}

int cmd_simulate(const sgns::RunConfig& cfg, bool allow_uncertified) {
    const Gate gate = certification_gate(cfg, allow_uncertified);
    auto table = sgns::ModeTable::get(cfg.n_max);
    const sgns::SpectralField x0 = resolve_x0(cfg, table);
    if (auto note = sgns::stability_note(cfg.integrator, cfg.n_max))
        std::fprintf(stderr, "note: %s\n", note->c_str());

    auto rng = sgns::make_stream(cfg.integrator.seed, 0, kPurposePath);
    auto emit = [&](const sgns::TrajectoryRecord& rec) {
        sgns::write_text_file(out_path(cfg, "trajectory.csv"),
                              sgns::trajectory_csv(cfg, rec, gate.cert_hash));
        int index = 0;
        for (const auto& [t, field] : rec.snapshots)
            sgns::save_snapshot(out_path(cfg, "snapshot_" + std::to_string(index++) + ".snap"),
                                field, {cfg.n_max, cfg.integrator.seed, t},
                                sgns::SnapshotFormat::text);
    };
    try {
        const sgns::TrajectoryRecord rec =
            sgns::run_path(x0, cfg.integrator, gate.basis, gate.noise, rng);
        emit(rec);
        sgns::save_snapshot(out_path(cfg, "final.snap"), rec.final_state,
                            {cfg.n_max, cfg.integrator.seed, rec.rows.back().t},
                            sgns::SnapshotFormat::text);
        if (rec.stopped)
            std::printf("stopped at t = %s (%s)\n", sgns::format_double(rec.stop_time).c_str(),
                        sgns::stop_reason_name(rec.stop_reason));
        std::printf("trajectory: %zu rows%s\n", rec.rows.size(),
                    gate.certified ? "" : " (uncertified)");
        return kExitPass;
    } catch (const sgns::RunFault& f) {
        emit(f.partial_record());
        sgns::save_snapshot(out_path(cfg, "fault.snap"), f.state(),
                            {cfg.n_max, cfg.integrator.seed, f.t()}, sgns::SnapshotFormat::text);
        std::fprintf(stderr, "integrator fault at t = %s: %s\n",
                     sgns::format_double(f.t()).c_str(), f.what());
        return kExitFault;
    }
}

void write_report(const sgns::RunConfig& cfg, const Gate& gate, const std::string& stem,
                  sgns::ordered_json payload) {
    sgns::ordered_json j;
    j["tool"] = sgns::tool_block();
    j["seed"] = cfg.integrator.seed;
    j["config"] = cfg.source_text;
    j["certificates_hash"] = sgns::hex64(gate.cert_hash);
    j["covered"] = gate.certified;
    j["report"] = std::move(payload);
    sgns::write_text_file(out_path(cfg, stem + ".json"), j.dump(2) + "\n");
}

int cmd_estimate(const sgns::RunConfig& cfg, const std::string& estimator,
                 bool allow_uncertified) {
    const Gate gate = certification_gate(cfg, allow_uncertified);
    auto table = sgns::ModeTable::get(cfg.n_max);
    if (estimator == "occupation" && cfg.x0_kind != "zero")
        throw sgns::ConfigError("occupation requires x0 = zero (the measure starts from the "
                                "zero field)");
    if (estimator == "decay")
        for (double t : cfg.check_times)
            if (t > cfg.integrator.t_end + 1e-12)
                throw sgns::ConfigError("config: check time " + sgns::format_double(t) +
                                        " is past t_end");
    if (estimator == "bootstrap" && !(cfg.eps < cfg.integrator.t_end))
        throw sgns::ConfigError("config: eps must lie inside (0, t_end)");
    const sgns::SpectralField x0 = resolve_x0(cfg, table);
    sgns::EnsembleParams par{cfg.integrator, gate.basis, gate.noise, x0,
                             cfg.paths,      cfg.threads, kPurposeEnsemble};

    if (estimator == "moments") {
        const sgns::MomentCurve mc = sgns::moment_curve(par, cfg.p, cfg.s);
        write_report(cfg, gate, "moments", sgns::to_json(mc));
        sgns::write_text_file(out_path(cfg, "moments.csv"), sgns::curve_csv(cfg, mc));
        std::printf("moments: sup mean %s over %d paths\n",
                    sgns::format_double(*std::max_element(mc.values.begin(), mc.values.end()))
                        .c_str(),
                    mc.n_paths);
        return kExitPass;
    }
    if (estimator == "bootstrap") {
        const sgns::BootstrapReport br = sgns::bootstrap_curve(par, cfg.eps);
        write_report(cfg, gate, "bootstrap", sgns::to_json(br));
        sgns::write_text_file(out_path(cfg, "bootstrap.csv"), sgns::curve_csv(cfg, br.curve));
        std::printf("bootstrap: sup mean log(1+|u|_1^2) = %s on [%s, T]\n",
                    sgns::format_double(br.sup_mean_on_window).c_str(),
                    sgns::format_double(br.eps).c_str());
        return kExitPass;
    }
    if (estimator == "decay") {
        bool hg2star = gate.certified;
        const sgns::DecayFit df =
            sgns::decay_test(par, cfg.check_times, hg2star, allow_uncertified);
        write_report(cfg, gate, "decay", sgns::to_json(df));
        std::string csv = sgns::csv_preamble(cfg);
        csv += "t,mean,std_err,bound\n";
        const double x0_val = df.curve.values.empty() ? 0.0 : df.curve.values.front();
        for (std::size_t i = 0; i < df.curve.times.size(); ++i)
            csv += sgns::format_double(df.curve.times[i]) + "," +
                   sgns::format_double(df.curve.values[i]) + "," +
                   sgns::format_double(df.curve.std_err[i]) + "," +
                   sgns::format_double(std::exp(-df.kappa_bound * df.curve.times[i]) * x0_val) +
                   "\n";
        sgns::write_text_file(out_path(cfg, "decay.csv"), csv);
        std::printf("decay: kappa_hat = %s vs bound %s, %s%s\n",
                    sgns::format_double(df.kappa_hat).c_str(),
                    sgns::format_double(df.kappa_bound).c_str(),
                    df.passed ? "passed" : "FAILED", df.covered ? "" : " (not covered)");
        return df.passed ? kExitPass : kExitVerdict;
    }
    if (estimator == "continuity") {
        const sgns::ContinuityReport cr = sgns::continuity_test(x0, cfg.deltas, par);
        write_report(cfg, gate, "continuity", sgns::to_json(cr));
        std::string csv = sgns::csv_preamble(cfg);
        csv += "delta,median_sup,median_integral,stopped_fraction\n";
        for (std::size_t i = 0; i < cr.deltas.size(); ++i)
            csv += sgns::format_double(cr.deltas[i]) + "," +
                   sgns::format_double(cr.median_sup[i]) + "," +
                   sgns::format_double(cr.median_integral[i]) + "," +
                   sgns::format_double(cr.stopped_fraction[i]) + "\n";
        sgns::write_text_file(out_path(cfg, "continuity.csv"), csv);
        std::printf("continuity: medians %s%s\n",
                    cr.passed ? "non-increasing" : "NOT monotone",
                    cr.stopping_dominated ? " (stopping-dominated)" : "");
        return cr.passed ? kExitPass : kExitVerdict;
    }
    // occupation
    const std::vector<sgns::OccupationStats> stats = sgns::occupation_measure(cfg.horizons, par);
    auto arr = sgns::ordered_json::array();
    for (const auto& os : stats) arr.push_back(sgns::to_json(os));
    // No growth of the occupation functional across horizons, within noise.
    bool passed = true;
    for (std::size_t i = 1; i < stats.size(); ++i) {
        const double tol = 3.0 * std::sqrt(stats[i].functional_std_err *
                                               stats[i].functional_std_err +
                                           stats[0].functional_std_err *
                                               stats[0].functional_std_err);
        if (stats[i].functional_mean > stats[0].functional_mean + tol) passed = false;
    }
    write_report(cfg, gate, "occupation",
                 sgns::ordered_json{{"horizons", arr}, {"bounded", passed}});
    std::string csv = sgns::csv_preamble(cfg);
    csv += "horizon,functional_mean,functional_std_err\n";
    for (const auto& os : stats)
        csv += sgns::format_double(os.horizon) + "," + sgns::format_double(os.functional_mean) +
               "," + sgns::format_double(os.functional_std_err) + "\n";
    sgns::write_text_file(out_path(cfg, "occupation.csv"), csv);
    std::printf("occupation: functional %s across %zu horizons\n",
                passed ? "bounded" : "GREW", stats.size());
    return passed ? kExitPass : kExitVerdict;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(sgns::kToolName) +
                 " - spectral Galerkin certification, simulation, and estimation for "
                 "stochastically forced Navier-Stokes on the torus"};
    app.set_version_flag("--version",
                         std::string(sgns::kToolName) + " " + sgns::kToolVersion);
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sc, bool gated) {
        sc->add_option("--config", opt.config_path, "configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sc->add_option("--out", opt.out_override, "output directory override");
        sc->add_option("--seed", opt.seed_override, "master seed override");
        if (gated)
            sc->add_flag("--allow-uncertified", opt.allow_uncertified,
                         "run even when certificates are missing or failed");
    };
    CLI::App* certify = app.add_subcommand("certify", "fit constants, certify hypotheses");
    add_common(certify, false);
    CLI::App* simulate = app.add_subcommand("simulate", "integrate one path");
    add_common(simulate, true);
    CLI::App* estimate = app.add_subcommand("estimate", "run a Monte-Carlo estimator");
    add_common(estimate, true);
    estimate->add_option("--paths", opt.paths_override, "path count override");
    estimate->add_option("--estimator", opt.estimator_override, "estimator override")
        ->check(CLI::IsMember({"moments", "bootstrap", "decay", "continuity", "occupation"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    sgns::RunConfig cfg;
    try {
        cfg = sgns::load_config(opt.config_path);
    } catch (const sgns::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    }
    if (opt.seed_override) cfg.integrator.seed = *opt.seed_override;
    if (opt.paths_override) cfg.paths = *opt.paths_override;
    if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
    if (!opt.estimator_override.empty()) cfg.estimator = opt.estimator_override;

    try {
        if (certify->parsed()) return cmd_certify(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg, opt.allow_uncertified);
        return cmd_estimate(cfg, cfg.estimator, opt.allow_uncertified);
    } catch (const sgns::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const VerdictError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitVerdict;
    } catch (const sgns::EstimatorError& e) {
        std::fprintf(stderr, "estimator refused: %s\n", e.what());
        return kExitFault;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fault: %s\n", e.what());
        return kExitFault;
    }
}
