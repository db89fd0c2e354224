// SPDX-License-Identifier: Apache-2.0
//
// Empirical inequality certificates at a fixed truncation. Constants are
// fitted on one sample draw and verified with a 10% safety margin on an
// independent draw; reports carry both the fitted constant and the worst
// verified ratio.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sgns/convection.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/truncation.hpp"

namespace sgns {

struct InequalityReport {
    std::string name;
    int samples = 0;          // verified samples per phase
    double worst_ratio = 0;   // max lhs/rhs over the verify draw, margin included
    double fitted_constant = 0;
    bool passed = false;      // worst_ratio <= 1
};

struct Bes12Result {
    InequalityReport bes1; // (B(u),Lambda u)   <= 1/2|u|_{3/2}^2 + delta1 |u|_1^4 |u|_{1/2}^2
    InequalityReport bes2; // (B(u),Lambda^2 u) <= 1/2|u|_2^2     + delta2 |u|_1^6
};

namespace detail {

// Sample shapes across spectral slopes; amplitudes are handled analytically
// by the fit (see below) and drawn log-uniform by the verify phase.
inline SpectralField random_shape(const std::shared_ptr<const ModeTable>& table,
                                  std::mt19937_64& rng) {
    std::uniform_real_distribution<double> slope(0.25, 2.0);
    return random_field(table, slope(rng), 1.0, rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> e(std::log(lo), std::log(hi));
    return std::exp(e(rng));
}

// Both estimates share the homogeneity lhs ~ a^3, parabolic term ~ a^2,
// delta term ~ a^6 under u -> a u, so the ratio (lhs - par)/term attains its
// supremum over amplitudes at a* = 4 par / (3 lhs), where it equals
// 27 lhs^4 / (256 par^3 term). Fitting that supremum makes the fitted
// constant independent of the amplitude distribution (and an upper bound for
// the ratio at any single amplitude).
inline double amplitude_sup_ratio(double lhs, double par, double term) {
    if (!(lhs > 0.0)) return 0.0;
    const double l2 = lhs * lhs;
    return (27.0 / 256.0) * (l2 * l2) / (par * par * par * term);
}

struct BesSample {
    double lhs1, par1, term1;
    double lhs2, par2, term2;
};

inline BesSample bes_sample(const SpectralField& u) {
    const SpectralField bu = convect(u, u).field;
    const double x = sobolev_norm_sq(u, 0.5);
    const double y = sobolev_norm_sq(u, 1.0);
    BesSample s{};
    // (B(u), Lambda^{2s} u)_{L^2} = (B(u), u)_s
    s.lhs1 = sobolev_inner(bu, u, 0.5);
    s.par1 = 0.5 * sobolev_norm_sq(u, 1.5);
    s.term1 = y * y * x;
    s.lhs2 = sobolev_inner(bu, u, 1.0);
    s.par2 = 0.5 * sobolev_norm_sq(u, 2.0);
    s.term2 = y * y * y;
    return s;
}

// Ratio of the inequality sides at the drawn amplitude under the margined
// constant.
inline double margined_ratio(double a, double lhs, double par, double term, double delta) {
    const double a2 = a * a, a3 = a2 * a, a6 = a3 * a3;
    return a3 * lhs / (a2 * par + delta * a6 * term);
}

} // namespace detail

// Fits delta1, delta2 of the dissipation-vs-convection estimates on one draw
// and verifies the inequalities with 1.1x the fitted constants on a fresh
// draw of equal size.
inline Bes12Result verify_bes12(int samples, TruncationSpec trunc, std::mt19937_64& rng) {
    if (samples < 1) throw std::invalid_argument("verify_bes12: samples must be >= 1");
    auto table = ModeTable::get(trunc.n_max);
    double d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const detail::BesSample s = detail::bes_sample(detail::random_shape(table, rng));
        d1 = std::max(d1, detail::amplitude_sup_ratio(s.lhs1, s.par1, s.term1));
        d2 = std::max(d2, detail::amplitude_sup_ratio(s.lhs2, s.par2, s.term2));
    }
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const SpectralField u = detail::random_shape(table, rng);
        const double a = detail::log_uniform(rng, 0.05, 5.0);
        const detail::BesSample s = detail::bes_sample(u);
        worst1 = std::max(worst1, detail::margined_ratio(a, s.lhs1, s.par1, s.term1, 1.1 * d1));
        worst2 = std::max(worst2, detail::margined_ratio(a, s.lhs2, s.par2, s.term2, 1.1 * d2));
    }
    Bes12Result r;
    r.bes1 = {"bes1", samples, worst1, d1, worst1 <= 1.0};
    r.bes2 = {"bes2", samples, worst2, d2, worst2 <= 1.0};
    return r;
}

// |B(u,v)|_{-1} <= C |u|_1 |v|_1, same two-phase protocol. The ratio is
// scale-invariant in each argument, so no amplitude handling is needed.
inline InequalityReport fit_b_minus1(int samples, TruncationSpec trunc, std::mt19937_64& rng) {
    if (samples < 1) throw std::invalid_argument("fit_b_minus1: samples must be >= 1");
    auto table = ModeTable::get(trunc.n_max);
    auto ratio = [&](const SpectralField& u, const SpectralField& v) {
        const SpectralField buv = convect(u, v).field;
        return sobolev_norm(buv, -1.0) / (sobolev_norm(u, 1.0) * sobolev_norm(v, 1.0));
    };
    double c = 0.0;
    for (int i = 0; i < samples; ++i) {
        const SpectralField u = detail::random_shape(table, rng);
        const SpectralField v = detail::random_shape(table, rng);
        c = std::max(c, ratio(u, v));
    }
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const SpectralField u = detail::random_shape(table, rng);
        const SpectralField v = detail::random_shape(table, rng);
        worst = std::max(worst, ratio(u, v) / (1.1 * c));
    }
    return {"b_minus1", samples, worst, c, worst <= 1.0};
}

} // namespace sgns
