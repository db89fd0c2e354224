// SPDX-License-Identifier: Apache-2.0
//
// Nonlocal Kirchhoff-type noise g_i(u) = alpha_i (1 + |u|_1^2) u. Because
// every channel is the same scalar multiple of u, all Hilbert-Schmidt and
// diagonal quantities have closed forms in rho = sum alpha_i^2; the summed
// definitions are still evaluated and cross-checked against them.

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgns/spectral_field.hpp"

namespace sgns {

class KirchhoffNoise {
  public:
    KirchhoffNoise(std::vector<double> alphas, double gamma, double kappa1, double kappa2)
        : alphas_(std::move(alphas)), gamma_(gamma), kappa1_(kappa1), kappa2_(kappa2) {
        if (!(gamma > 1.0 && gamma < 2.0))
            throw std::invalid_argument("KirchhoffNoise: gamma must lie in (1,2)");
        rho_ = 0.0;
        for (double a : alphas_) {
            if (!std::isfinite(a)) throw std::invalid_argument("KirchhoffNoise: non-finite alpha");
            rho_ += a * a;
        }
    }

    std::size_t size() const { return alphas_.size(); }
    double alpha(std::size_t i) const { return alphas_.at(i); }
    const std::vector<double>& alphas() const { return alphas_; }
    double rho() const { return rho_; }
    double gamma() const { return gamma_; }
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }

    // rho >= max(kappa1/(gamma-1), kappa2), the sufficient condition for the
    // growth hypotheses. Deliberately not a construction precondition: the
    // certifier must be able to represent an inadmissible noise (rho too
    // small) and report it as a failed certificate.
    bool admissible() const {
        return rho_ >= std::max(kappa1_ / (gamma_ - 1.0), kappa2_);
    }

  private:
    std::vector<double> alphas_;
    double rho_ = 0.0;
    double gamma_ = 1.5;
    double kappa1_ = 0.0;
    double kappa2_ = 0.0;
};

// g_i(u) = alpha_i (1 + |u|_1^2) u.
inline SpectralField kirchhoff_apply(const KirchhoffNoise& noise, const SpectralField& u,
                                     std::size_t i) {
    const double y = sobolev_norm_sq(u, 1.0);
    return (noise.alpha(i) * (1.0 + y)) * u;
}

struct KirchhoffIdentities {
    double hs_half = 0;   // ||g(u)||^2_{L2(l2;H^{1/2})}
    double diag_half = 0; // ||(g(u).,u)_{1/2}||^2_{L2(l2;R)}
    double hs_one = 0;    // ||g(u)||^2_{L2(l2;H^1)}
    double diag_one = 0;  // ||(g(u).,u)_1||^2_{L2(l2;R)}
};

// Closed forms, with X = |u|_{1/2}^2 and Y = |u|_1^2:
//   hs_half = rho (1+Y)^2 X      diag_half = rho (1+Y)^2 X^2
//   hs_one  = rho (1+Y)^2 Y      diag_one  = rho (1+Y)^2 Y^2
inline KirchhoffIdentities kirchhoff_closed_forms(double rho, double x, double y) {
    const double f = rho * (1.0 + y) * (1.0 + y);
    return {f * x, f * x * x, f * y, f * y * y};
}

// Evaluates the channel sums literally and cross-checks them against the
// closed forms to relative 1e-12; disagreement means the scalar structure of
// g has been broken somewhere and is a logic error, not an input error.
inline KirchhoffIdentities kirchhoff_identities(const KirchhoffNoise& noise,
                                                const SpectralField& u) {
    const double x = sobolev_norm_sq(u, 0.5);
    const double y = sobolev_norm_sq(u, 1.0);
    KirchhoffIdentities summed;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const SpectralField gi = kirchhoff_apply(noise, u, i);
        summed.hs_half += sobolev_norm_sq(gi, 0.5);
        summed.hs_one += sobolev_norm_sq(gi, 1.0);
        const double dh = sobolev_inner(gi, u, 0.5);
        const double d1 = sobolev_inner(gi, u, 1.0);
        summed.diag_half += dh * dh;
        summed.diag_one += d1 * d1;
    }
    const KirchhoffIdentities closed = kirchhoff_closed_forms(noise.rho(), x, y);
    const auto check = [](double a, double b, const char* what) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        if (std::abs(a - b) > 1e-12 * scale)
            throw std::logic_error(std::string("kirchhoff_identities: summed and closed ") +
                                   what + " disagree");
    };
    check(summed.hs_half, closed.hs_half, "hs_half");
    check(summed.diag_half, closed.diag_half, "diag_half");
    check(summed.hs_one, closed.hs_one, "hs_one");
    check(summed.diag_one, closed.diag_one, "diag_one");
    return summed;
}

} // namespace sgns
