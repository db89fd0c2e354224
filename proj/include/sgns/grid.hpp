// SPDX-License-Identifier: Apache-2.0
//
// Uniform-grid evaluation of spectral fields and grid-quadrature Lp norms.
// All physical-space integrals use the normalized measure d(xi)/(2*pi)^3, so
// Parseval reads (1/G^3) sum |u(xi)|^2 = sum_k |u_k|^2 with no volume factor.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sgns/spectral_field.hpp"

namespace sgns {

// Point-major samples of a real vector field on the G^3 grid
// xi = 2*pi*(ix,iy,iz)/G; component c of point (ix,iy,iz) sits at
// v[3*((ix*G + iy)*G + iz) + c].
struct GridSamples {
    int g = 0;
    std::vector<double> v;

    double at(int ix, int iy, int iz, int c) const {
        return v[static_cast<std::size_t>(3 * ((ix * g + iy) * g + iz) + c)];
    }
};

namespace detail {

// Twiddle table e^{i k x_j} for k in [-n, n], j in [0, G).
inline std::vector<std::complex<double>> twiddles(int n_max, int g) {
    std::vector<std::complex<double>> t(static_cast<std::size_t>(2 * n_max + 1) *
                                        static_cast<std::size_t>(g));
    for (int k = -n_max; k <= n_max; ++k)
        for (int j = 0; j < g; ++j) {
            const double phase = 2.0 * std::numbers::pi * k * j / g;
            t[static_cast<std::size_t>(k + n_max) * static_cast<std::size_t>(g) +
              static_cast<std::size_t>(j)] = {std::cos(phase), std::sin(phase)};
        }
    return t;
}

} // namespace detail

inline GridSamples evaluate_on_grid(const SpectralField& f, int g) {
    const ModeTable& t = f.table();
    const int n = t.n_max();
    if (g < 2 * n + 1)
        throw std::invalid_argument("evaluate_on_grid: grid must resolve the truncation");
    const auto tw = detail::twiddles(n, g);
    auto tref = [&](int k, int j) {
        return tw[static_cast<std::size_t>(k + n) * static_cast<std::size_t>(g) +
                  static_cast<std::size_t>(j)];
    };
    GridSamples out;
    out.g = g;
    out.v.assign(static_cast<std::size_t>(3) * g * g * g, 0.0);
    // u(xi) = 2 Re sum_{half} u_k e^{i k.xi}
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        const Vec3c& c = f.coeffs()[static_cast<std::size_t>(i)];
        for (int ix = 0; ix < g; ++ix) {
            const std::complex<double> ex = tref(k[0], ix);
            for (int iy = 0; iy < g; ++iy) {
                const std::complex<double> exy = ex * tref(k[1], iy);
                double* row = &out.v[static_cast<std::size_t>(3) *
                                     (static_cast<std::size_t>(ix * g + iy) *
                                      static_cast<std::size_t>(g))];
                for (int iz = 0; iz < g; ++iz) {
                    const std::complex<double> e = exy * tref(k[2], iz);
                    row[3 * iz + 0] += 2.0 * (c[0].real() * e.real() - c[0].imag() * e.imag());
                    row[3 * iz + 1] += 2.0 * (c[1].real() * e.real() - c[1].imag() * e.imag());
                    row[3 * iz + 2] += 2.0 * (c[2].real() * e.real() - c[2].imag() * e.imag());
                }
            }
        }
    }
    return out;
}

// |f|_{L^p} by grid quadrature of the pointwise Euclidean magnitude.
inline double lp_norm(const SpectralField& f, double p, int g) {
    const GridSamples s = evaluate_on_grid(f, g);
    double acc = 0.0;
    const std::size_t pts = static_cast<std::size_t>(g) * g * g;
    for (std::size_t i = 0; i < pts; ++i) {
        const double m2 = s.v[3 * i] * s.v[3 * i] + s.v[3 * i + 1] * s.v[3 * i + 1] +
                          s.v[3 * i + 2] * s.v[3 * i + 2];
        acc += std::pow(m2, 0.5 * p);
    }
    return std::pow(acc / static_cast<double>(pts), 1.0 / p);
}

inline double linf_norm(const SpectralField& f, int g) {
    const GridSamples s = evaluate_on_grid(f, g);
    double worst = 0.0;
    const std::size_t pts = static_cast<std::size_t>(g) * g * g;
    for (std::size_t i = 0; i < pts; ++i) {
        const double m2 = s.v[3 * i] * s.v[3 * i] + s.v[3 * i + 1] * s.v[3 * i + 1] +
                          s.v[3 * i + 2] * s.v[3 * i + 2];
        worst = std::max(worst, m2);
    }
    return std::sqrt(worst);
}

// Component-wise partial derivative: (d_axis u)_k = i k_axis u_k.
inline SpectralField derivative(const SpectralField& f, int axis) {
    const ModeTable& t = f.table();
    std::vector<Vec3c> c(f.coeffs().begin(), f.coeffs().end());
    for (int i = 0; i < t.half_count(); ++i) {
        const double ka = t.half_mode(i)[axis];
        for (auto& z : c[static_cast<std::size_t>(i)])
            z *= std::complex<double>(0.0, ka);
    }
    return SpectralField::from_coeffs(f.table_ptr(), std::move(c));
}

} // namespace sgns
