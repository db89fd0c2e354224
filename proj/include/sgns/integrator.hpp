// SPDX-License-Identifier: Apache-2.0
//
// Euler-Maruyama time stepping for the Galerkin SDE
//   du = -[Au + PB(u)]dt + sum_i sigma_i(u) dW_i + sum_i g_i(u) dWhat_i
// with nu = 1. The exponential scheme applies e^{-|k|^2 dt} to the
// explicit-update result, treating the Stokes part exactly; the
// semi-implicit scheme divides by (1 + |k|^2 dt). All noise coefficients
// are evaluated at the left endpoint (Ito), as are the running integrals
// used by the stopping times.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgns/convection.hpp"
#include "sgns/kirchhoff.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/transport_noise.hpp"

namespace sgns {

enum class Scheme { exponential_em, semi_implicit_em };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::exponential_em ? "exponential_em" : "semi_implicit_em";
}

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::exponential_em;
    int snapshot_stride = 0; // 0: keep no snapshots
    double r_threshold = std::numeric_limits<double>::infinity(); // stopping radius R
    std::uint64_t seed = 0;
};

struct NoiseIncrement {
    std::vector<double> dW;    // transport channels, basis order
    std::vector<double> dWhat; // Kirchhoff channels, alpha order
};

enum class StopReason { none, h_half_radius, integral_radius };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::h_half_radius: return "h_half_radius";
        case StopReason::integral_radius: return "integral_radius";
        default: return "none";
    }
}

struct SdeRun {
    SpectralField state;
    double t = 0.0;
    bool stopped = false;
    StopReason stop_reason = StopReason::none;
    int wiener_dim_transport = 0;
    int wiener_dim_kirchhoff = 0;
    double acc_h32 = 0.0;      // int_0^t |u|_{3/2}^2 ds
    double acc_weighted = 0.0; // int_0^t |u|_{3/2}^2 / (1+|u|_{1/2}^2)^{gamma/2} ds
};

// Raised when a state goes non-finite or past the hard |u|_{1/2} <= 1e6
// overflow cap (a numerical guard, distinct from the stopping radius R).
// Carries the offending time and state for diagnostics.
class IntegratorFault : public std::runtime_error {
  public:
    IntegratorFault(std::string msg, double t, SpectralField state)
        : std::runtime_error(std::move(msg)), t_(t), state_(std::move(state)) {}
    double t() const { return t_; }
    const SpectralField& state() const { return state_; }

  private:
    double t_;
    SpectralField state_;
};

inline std::optional<std::string> stability_note(const IntegratorConfig& cfg, int n_max) {
    const double h = cfg.dt * std::pow(static_cast<double>(n_max), 4.0);
    if (cfg.scheme != Scheme::exponential_em && h > 1.0)
        return "dt * n_max^4 = " + std::to_string(h) +
               " > 1; semi-implicit accuracy degrades at the truncation edge";
    return std::nullopt;
}

// Draws one step's increments, transport channels first. N(0, dt) each.
inline NoiseIncrement draw_increment(std::mt19937_64& rng, std::size_t n_transport,
                                     std::size_t n_kirchhoff, double dt) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double root = std::sqrt(dt);
    NoiseIncrement inc;
    inc.dW.resize(n_transport);
    for (auto& w : inc.dW) w = root * gauss(rng);
    inc.dWhat.resize(n_kirchhoff);
    for (auto& w : inc.dWhat) w = root * gauss(rng);
    return inc;
}

namespace detail {

struct StepScratch {
    std::vector<Vec3c> incr;
    std::vector<double> fac;
    double fac_dt = -1.0;
    Scheme fac_scheme = Scheme::exponential_em;
};

// One update of the coefficient vector in place. The caller supplies the
// pre-step norms (it needs them for the accumulators anyway) and performs
// all post-step checks.
inline void step_in_place(const ModeTable& t, std::vector<Vec3c>& u, StepScratch& ws,
                          const IntegratorConfig& cfg, const TransportNoiseBasis& basis,
                          const KirchhoffNoise& noise, const NoiseIncrement& inc,
                          const NormTriple& pre) {
    if (inc.dW.size() != basis.size() || inc.dWhat.size() != noise.size())
        throw std::invalid_argument("step: noise increment dimensions do not match channels");
    const std::size_t m = u.size();
    if (ws.fac.size() != m || ws.fac_dt != cfg.dt || ws.fac_scheme != cfg.scheme) {
        ws.fac.resize(m);
        for (int i = 0; i < t.half_count(); ++i) {
            const double k2 = t.mode_norm_sq(i);
            ws.fac[static_cast<std::size_t>(i)] = cfg.scheme == Scheme::exponential_em
                                                      ? std::exp(-k2 * cfg.dt)
                                                      : 1.0 / (1.0 + k2 * cfg.dt);
        }
        ws.fac_dt = cfg.dt;
        ws.fac_scheme = cfg.scheme;
    }
    ws.incr.resize(m);
    convect_raw(t, u, u, ws.incr);
    for (auto& v : ws.incr)
        for (auto& z : v) z *= -cfg.dt;
    for (std::size_t i = 0; i < basis.size(); ++i)
        add_scaled_sigma_raw(t, basis.mode(i), inc.dW[i], u, ws.incr);
    // Kirchhoff channels are scalar multiples of u; their combined increment
    // is (1+|u|_1^2)(sum_i alpha_i dWhat_i) u and needs no projection.
    double eta = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) eta += noise.alpha(i) * inc.dWhat[i];
    const double kscale = (1.0 + pre.h_one_sq) * eta;
    for (int i = 0; i < t.half_count(); ++i) {
        Vec3c& d = ws.incr[static_cast<std::size_t>(i)];
        project_mode(t.half_mode(i), d);
        const double f = ws.fac[static_cast<std::size_t>(i)];
        Vec3c& v = u[static_cast<std::size_t>(i)];
        for (int j = 0; j < 3; ++j) {
            auto& z = v[static_cast<std::size_t>(j)];
            z = f * ((1.0 + kscale) * z + d[static_cast<std::size_t>(j)]);
        }
        // Re-projection of the state: u entered divergence-free, so this
        // only clears accumulated roundoff.
        project_mode(t.half_mode(i), v);
    }
}

inline bool blown_up(const NormTriple& nt) {
    return !(nt.h_half_sq <= 1e12) || !std::isfinite(nt.h_one_sq) ||
           !std::isfinite(nt.h_three_half_sq);
}

} // namespace detail

// Single transition, pure. Accumulators advance by left-endpoint quadrature
// before the state moves; stopping is checked on the post-step state and
// post-step accumulators, so a stopped run records the first grid time past
// the threshold.
inline SdeRun step(SdeRun run, const IntegratorConfig& cfg, const TransportNoiseBasis& basis,
                   const KirchhoffNoise& noise, const NoiseIncrement& inc) {
    if (run.stopped) throw std::invalid_argument("step: run already stopped");
    const ModeTable& t = run.state.table();
    std::vector<Vec3c> u(run.state.coeffs().begin(), run.state.coeffs().end());
    detail::StepScratch ws;
    const NormTriple pre = norm_triple(run.state);
    run.acc_h32 += cfg.dt * pre.h_three_half_sq;
    run.acc_weighted += cfg.dt * pre.h_three_half_sq /
                        std::pow(1.0 + pre.h_half_sq, 0.5 * noise.gamma());
    detail::step_in_place(t, u, ws, cfg, basis, noise, inc, pre);
    run.t += cfg.dt;
    run.state = SpectralField::from_coeffs(run.state.table_ptr(), std::move(u));
    const NormTriple post = norm_triple(run.state);
    if (detail::blown_up(post))
        throw IntegratorFault("integrator fault: non-finite state or |u|_{1/2} past 1e6",
                              run.t, run.state);
    const double r2 = cfg.r_threshold * cfg.r_threshold;
    if (post.h_half_sq >= r2) {
        run.stopped = true;
        run.stop_reason = StopReason::h_half_radius;
    } else if (run.acc_weighted >= cfg.r_threshold) {
        run.stopped = true;
        run.stop_reason = StopReason::integral_radius;
    }
    run.wiener_dim_transport = static_cast<int>(basis.size());
    run.wiener_dim_kirchhoff = static_cast<int>(noise.size());
    return run;
}

struct TrajectoryRow {
    double t = 0.0;
    double h_half_sq = 0.0;
    double h_one_sq = 0.0;
    double h_three_half_sq = 0.0;
    double decay_functional = 0.0; // |u|_{1/2}^{2-gamma}
    double log1p_h_one = 0.0;      // log(1 + |u|_1^2)
    bool stopped = false;
};

struct TrajectoryRecord {
    IntegratorConfig cfg;
    std::uint64_t stream_seed = 0;
    double gamma = 1.5;
    int wiener_dim_transport = 0;
    int wiener_dim_kirchhoff = 0;
    std::vector<TrajectoryRow> rows; // one per grid time, t = 0 included
    bool stopped = false;
    StopReason stop_reason = StopReason::none;
    double stop_time = -1.0;
    double acc_h32 = 0.0;
    double acc_weighted = 0.0;
    std::vector<std::pair<double, SpectralField>> snapshots;
    SpectralField final_state;
};

namespace detail {

struct PathSummary {
    bool stopped = false;
    StopReason stop_reason = StopReason::none;
    double stop_time = -1.0;
    double acc_h32 = 0.0;
    double acc_weighted = 0.0;
    double t_last = 0.0;
};

// Core loop shared by run_path and the estimators. The observer is invoked
// once for the initial state (step 0) and once after every completed step:
//   obs(step_index, t, norms, coefficient span, stopped_now)
// The loop stops at t_end, the first threshold crossing, or a fault.
template <class Obs>
PathSummary run_path_observe(const SpectralField& x0, const IntegratorConfig& cfg,
                             const TransportNoiseBasis& basis, const KirchhoffNoise& noise,
                             std::mt19937_64& rng, Obs&& obs) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("run_path: dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("run_path: t_end must be >= 0");
    const ModeTable& t = x0.table();
    std::vector<Vec3c> u(x0.coeffs().begin(), x0.coeffs().end());
    StepScratch ws;
    PathSummary s;
    const double r2 = cfg.r_threshold * cfg.r_threshold;
    NormTriple nt = norm_triple(t, u);
    if (nt.h_half_sq >= r2) {
        s.stopped = true;
        s.stop_reason = StopReason::h_half_radius;
        s.stop_time = 0.0;
    }
    obs(0, 0.0, nt, std::span<const Vec3c>(u), s.stopped);
    if (s.stopped) return s;
    const long long steps = std::llround(cfg.t_end / cfg.dt);
    for (long long j = 1; j <= steps; ++j) {
        const NoiseIncrement inc = draw_increment(rng, basis.size(), noise.size(), cfg.dt);
        s.acc_h32 += cfg.dt * nt.h_three_half_sq;
        s.acc_weighted += cfg.dt * nt.h_three_half_sq /
                          std::pow(1.0 + nt.h_half_sq, 0.5 * noise.gamma());
        step_in_place(t, u, ws, cfg, basis, noise, inc, nt);
        const double tj = static_cast<double>(j) * cfg.dt;
        s.t_last = tj;
        nt = norm_triple(t, u);
        if (blown_up(nt))
            throw IntegratorFault("integrator fault: non-finite state or |u|_{1/2} past 1e6", tj,
                                  SpectralField::from_coeffs(x0.table_ptr(), std::move(u)));
        if (nt.h_half_sq >= r2) {
            s.stopped = true;
            s.stop_reason = StopReason::h_half_radius;
            s.stop_time = tj;
        } else if (s.acc_weighted >= cfg.r_threshold) {
            s.stopped = true;
            s.stop_reason = StopReason::integral_radius;
            s.stop_time = tj;
        }
        obs(j, tj, nt, std::span<const Vec3c>(u), s.stopped);
        if (s.stopped) break;
    }
    return s;
}

} // namespace detail

// Fault thrown by run_path: the underlying IntegratorFault plus whatever
// part of the record had been assembled when the state went bad.
class RunFault : public IntegratorFault {
  public:
    RunFault(const IntegratorFault& f, TrajectoryRecord partial)
        : IntegratorFault(f), partial_(std::make_shared<TrajectoryRecord>(std::move(partial))) {}
    const TrajectoryRecord& partial_record() const { return *partial_; }

  private:
    std::shared_ptr<const TrajectoryRecord> partial_;
};

// Full-record driver: integrates to t_end or the first stopping time and
// keeps per-step functionals plus optional strided snapshots.
inline TrajectoryRecord run_path(const SpectralField& x0, const IntegratorConfig& cfg,
                                 const TransportNoiseBasis& basis, const KirchhoffNoise& noise,
                                 std::mt19937_64& rng) {
    TrajectoryRecord rec;
    rec.cfg = cfg;
    rec.stream_seed = cfg.seed;
    rec.gamma = noise.gamma();
    rec.wiener_dim_transport = static_cast<int>(basis.size());
    rec.wiener_dim_kirchhoff = static_cast<int>(noise.size());
    const double ex = 0.5 * (2.0 - noise.gamma());
    auto observe = [&](long long j, double tj, const NormTriple& nt,
                       std::span<const Vec3c> coeffs, bool stopped_now) {
        rec.rows.push_back({tj, nt.h_half_sq, nt.h_one_sq, nt.h_three_half_sq,
                            std::pow(nt.h_half_sq, ex), std::log1p(nt.h_one_sq), stopped_now});
        if (cfg.snapshot_stride > 0 && j > 0 && j % cfg.snapshot_stride == 0)
            rec.snapshots.emplace_back(
                tj, SpectralField::from_coeffs(x0.table_ptr(),
                                               std::vector<Vec3c>(coeffs.begin(), coeffs.end())));
        rec.final_state = SpectralField::from_coeffs(
            x0.table_ptr(), std::vector<Vec3c>(coeffs.begin(), coeffs.end()));
    };
    detail::PathSummary s;
    try {
        s = detail::run_path_observe(x0, cfg, basis, noise, rng, observe);
    } catch (const IntegratorFault& f) {
        throw RunFault(f, std::move(rec));
    }
    rec.stopped = s.stopped;
    rec.stop_reason = s.stop_reason;
    rec.stop_time = s.stop_time;
    rec.acc_h32 = s.acc_h32;
    rec.acc_weighted = s.acc_weighted;
    return rec;
}

struct CoupledSummary {
    detail::PathSummary a, b;
};

// Lockstep shared-noise coupling: both states see identical increments.
// A stopped member freezes while the other continues; the observer sees
// both coefficient spans after every step (step 0 = initial states).
template <class Obs>
CoupledSummary run_coupled_pair(const SpectralField& xa, const SpectralField& xb,
                                const IntegratorConfig& cfg, const TransportNoiseBasis& basis,
                                const KirchhoffNoise& noise, std::mt19937_64& rng, Obs&& obs) {
    detail::require_same_table(xa, xb, "run_coupled_pair");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("run_coupled_pair: dt must be positive");
    const ModeTable& t = xa.table();
    std::vector<Vec3c> a(xa.coeffs().begin(), xa.coeffs().end());
    std::vector<Vec3c> b(xb.coeffs().begin(), xb.coeffs().end());
    detail::StepScratch wa, wb;
    CoupledSummary s;
    const double r2 = cfg.r_threshold * cfg.r_threshold;
    NormTriple na = norm_triple(t, a), nb = norm_triple(t, b);
    auto check_stop = [&](detail::PathSummary& ps, const NormTriple& nt, double tj) {
        if (ps.stopped) return;
        if (nt.h_half_sq >= r2) {
            ps.stopped = true;
            ps.stop_reason = StopReason::h_half_radius;
            ps.stop_time = tj;
        } else if (ps.acc_weighted >= cfg.r_threshold) {
            ps.stopped = true;
            ps.stop_reason = StopReason::integral_radius;
            ps.stop_time = tj;
        }
    };
    check_stop(s.a, na, 0.0);
    check_stop(s.b, nb, 0.0);
    obs(static_cast<long long>(0), 0.0, std::span<const Vec3c>(a), std::span<const Vec3c>(b),
        s.a.stopped, s.b.stopped);
    const long long steps = std::llround(cfg.t_end / cfg.dt);
    for (long long j = 1; j <= steps && !(s.a.stopped && s.b.stopped); ++j) {
        const NoiseIncrement inc = draw_increment(rng, basis.size(), noise.size(), cfg.dt);
        const double tj = static_cast<double>(j) * cfg.dt;
        if (!s.a.stopped) {
            s.a.acc_h32 += cfg.dt * na.h_three_half_sq;
            s.a.acc_weighted += cfg.dt * na.h_three_half_sq /
                                std::pow(1.0 + na.h_half_sq, 0.5 * noise.gamma());
            detail::step_in_place(t, a, wa, cfg, basis, noise, inc, na);
            na = norm_triple(t, a);
            if (detail::blown_up(na))
                throw IntegratorFault("integrator fault in coupled run", tj,
                                      SpectralField::from_coeffs(xa.table_ptr(), std::move(a)));
            s.a.t_last = tj;
            check_stop(s.a, na, tj);
        }
        if (!s.b.stopped) {
            s.b.acc_h32 += cfg.dt * nb.h_three_half_sq;
            s.b.acc_weighted += cfg.dt * nb.h_three_half_sq /
                                std::pow(1.0 + nb.h_half_sq, 0.5 * noise.gamma());
            detail::step_in_place(t, b, wb, cfg, basis, noise, inc, nb);
            nb = norm_triple(t, b);
            if (detail::blown_up(nb))
                throw IntegratorFault("integrator fault in coupled run", tj,
                                      SpectralField::from_coeffs(xb.table_ptr(), std::move(b)));
            s.b.t_last = tj;
            check_stop(s.b, nb, tj);
        }
        obs(j, tj, std::span<const Vec3c>(a), std::span<const Vec3c>(b), s.a.stopped,
            s.b.stopped);
    }
    return s;
}

} // namespace sgns
