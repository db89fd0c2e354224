// SPDX-License-Identifier: Apache-2.0
//
// Transport noise basis {zeta_i} of single-cosine vector fields and the
// channel maps sigma_i(u) = P((zeta_i.grad)u). The basis precomputes the
// sup-norm constants N0 = sum |zeta_i|_{Linf}^2 and M0 = sum |Lambda
// zeta_i|_{Linf}^2 and refuses construction when N0 >= 1/8.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgns/grid.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/truncation.hpp"

namespace sgns {

// zeta(xi) = c * theta * cos(k . xi). theta need not be a unit vector and
// need not be orthogonal to k; the field is not necessarily divergence-free.
struct CosineMode {
    WaveVector k;
    std::array<double, 3> theta;
    double c = 0.0;
};

class TransportNoiseBasis {
  public:
    explicit TransportNoiseBasis(std::vector<CosineMode> modes) : modes_(std::move(modes)) {
        n0_ = 0.0;
        m0_ = 0.0;
        for (const CosineMode& zm : modes_) {
            if (zm.k.is_zero())
                throw std::invalid_argument("TransportNoiseBasis: zero wave vector in zeta");
            if (!(zm.c >= 0.0) || !std::isfinite(zm.c))
                throw std::invalid_argument("TransportNoiseBasis: amplitude must be >= 0");
            const double theta_norm = std::sqrt(zm.theta[0] * zm.theta[0] +
                                                zm.theta[1] * zm.theta[1] +
                                                zm.theta[2] * zm.theta[2]);
            // |zeta|_Linf = c|theta| exactly for a single cosine.
            const double linf = zm.c * theta_norm;
            n0_ += linf * linf;
            // |Lambda zeta|_Linf via grid maximization at 8x oversampling
            // with a 1.05 safety factor, keeping downstream constants
            // conservative.
            const int nz = zm.k.norm_inf();
            auto table = ModeTable::get(nz);
            const SpectralField lz = lambda_pow(zeta_on(zm, table), 1.0);
            const double lz_linf = 1.05 * linf_norm(lz, 8 * (2 * nz + 1));
            m0_ += lz_linf * lz_linf;
        }
        if (!std::isfinite(m0_))
            throw std::invalid_argument("TransportNoiseBasis: M0 not finite");
        if (!(n0_ < 0.125))
            throw std::invalid_argument("TransportNoiseBasis: N0 >= 1/8, hypothesis violated");
    }

    std::size_t size() const { return modes_.size(); }
    const CosineMode& mode(std::size_t i) const { return modes_.at(i); }
    const std::vector<CosineMode>& modes() const { return modes_; }
    double M0() const { return m0_; }
    double N0() const { return n0_; }

    // Materialize zeta_i on a given truncation (coefficients (c/2) theta at
    // +-k). Throws if the truncation cannot hold the mode.
    SpectralField zeta_field(std::size_t i, std::shared_ptr<const ModeTable> table) const {
        const CosineMode& zm = mode(i);
        if (zm.k.norm_inf() > table->n_max())
            throw std::invalid_argument("zeta_field: wave vector outside truncation");
        return zeta_on(zm, std::move(table));
    }

  private:
    static SpectralField zeta_on(const CosineMode& zm, std::shared_ptr<const ModeTable> table) {
        std::vector<Vec3c> coeffs(static_cast<std::size_t>(table->half_count()));
        const WaveVector rep = lex_positive(zm.k) ? zm.k : -zm.k;
        const ModeRef r = table->find(rep);
        const double h = 0.5 * zm.c;
        coeffs[static_cast<std::size_t>(r.index)] = {std::complex<double>(h * zm.theta[0], 0.0),
                                                     std::complex<double>(h * zm.theta[1], 0.0),
                                                     std::complex<double>(h * zm.theta[2], 0.0)};
        return SpectralField::from_coeffs(std::move(table), std::move(coeffs));
    }

    std::vector<CosineMode> modes_;
    double m0_ = 0.0;
    double n0_ = 0.0;
};

namespace detail {

// out += scale * (zeta.grad)u, unprojected, cube-truncated. For a single
// cosine the convolution is the two-shift stencil
//   out_k += scale (c/2) [ i(theta.(k-k0)) u_{k-k0} + i(theta.(k+k0)) u_{k+k0} ].
inline void add_scaled_sigma_raw(const ModeTable& t, const CosineMode& zm, double scale,
                                 std::span<const Vec3c> u, std::span<Vec3c> out) {
    const double w = scale * 0.5 * zm.c;
    if (w == 0.0) return;
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        Vec3c& o = out[static_cast<std::size_t>(i)];
        for (int shift = 0; shift < 2; ++shift) {
            const WaveVector q = shift == 0 ? k - zm.k : k + zm.k;
            const ModeRef r = t.find(q);
            if (!r.valid()) continue;
            const Vec3c& uq = u[static_cast<std::size_t>(r.index)];
            const double qs = r.conjugate ? -1.0 : 1.0;
            const double dot = zm.theta[0] * static_cast<double>(q[0]) +
                               zm.theta[1] * static_cast<double>(q[1]) +
                               zm.theta[2] * static_cast<double>(q[2]);
            // f = i * w * dot applied to (re, qs*im)
            const double f = w * dot;
            for (int j = 0; j < 3; ++j) {
                const double ur = uq[static_cast<std::size_t>(j)].real();
                const double ui = qs * uq[static_cast<std::size_t>(j)].imag();
                o[static_cast<std::size_t>(j)] += std::complex<double>(-f * ui, f * ur);
            }
        }
    }
}

} // namespace detail

// sigma_i(u) = P((zeta_i.grad)u), truncated to u's cube.
inline SpectralField sigma_apply(const TransportNoiseBasis& basis, const SpectralField& u,
                                 std::size_t i) {
    const CosineMode& zm = basis.mode(i);
    const ModeTable& t = u.table();
    std::vector<Vec3c> out(static_cast<std::size_t>(t.half_count()));
    detail::add_scaled_sigma_raw(t, zm, 1.0, u.coeffs(), out);
    for (int m = 0; m < t.half_count(); ++m)
        detail::project_mode(t.half_mode(m), out[static_cast<std::size_t>(m)]);
    return SpectralField::from_coeffs(u.table_ptr(), std::move(out));
}

// ||sigma(u)||^2_{L2(l2;H^s)} = sum_i |sigma_i(u)|_s^2 over the stored
// channels. Only the exponents the estimates use are supported.
inline double sigma_hs_norm_sq(const TransportNoiseBasis& basis, const SpectralField& u,
                               double s) {
    if (s != -1.0 && s != -0.5 && s != 0.5 && s != 1.0)
        throw std::domain_error("sigma_hs_norm_sq: unsupported Sobolev index");
    double acc = 0.0;
    const ModeTable& t = u.table();
    std::vector<Vec3c> scratch(static_cast<std::size_t>(t.half_count()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (auto& c : scratch) c = Vec3c{};
        detail::add_scaled_sigma_raw(t, basis.mode(i), 1.0, u.coeffs(), scratch);
        double sum = 0.0;
        for (int m = 0; m < t.half_count(); ++m) {
            detail::project_mode(t.half_mode(m), scratch[static_cast<std::size_t>(m)]);
            const double w = std::pow(t.mode_norm_sq(m), s);
            sum += w * detail::abs_sq(scratch[static_cast<std::size_t>(m)]);
        }
        acc += 2.0 * sum;
    }
    return acc;
}

// Four unit-wavenumber cosines with orthogonal polarizations and
// c_i = sqrt(0.025), giving N0 = 0.1 < 1/8 with margin.
inline TransportNoiseBasis default_transport_basis() {
    const double c = std::sqrt(0.025);
    std::vector<CosineMode> modes = {
        {{1, 0, 0}, {0.0, 1.0, 0.0}, c},
        {{0, 1, 0}, {0.0, 0.0, 1.0}, c},
        {{0, 0, 1}, {1.0, 0.0, 0.0}, c},
        {{1, 0, 0}, {0.0, 0.0, 1.0}, c},
    };
    return TransportNoiseBasis(std::move(modes));
}

} // namespace sgns
