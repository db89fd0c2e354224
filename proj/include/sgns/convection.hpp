// SPDX-License-Identifier: Apache-2.0
//
// Convective structure of the equations: the bilinear operator
// B(u,v) = P((u.grad)v) as an exact spectral convolution over the cube, the
// trilinear form b, the Kato-Ponce-style convection commutator, and a
// pseudo-spectral evaluation path kept as an oracle behind an explicit call.

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgns/grid.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/truncation.hpp"

namespace sgns {

struct ConvectionResult {
    SpectralField field;     // P((u.grad)v), truncated to the cube
    double residual_div = 0; // max |k . coefficient| before projection
};

namespace detail {

// Unprojected convolution: out_k = sum_{p+q=k} i (u_p . q) v_q for every
// stored half mode k, cube-truncated. Runs off the precomputed pair table.
inline void convect_raw(const ModeTable& t, std::span<const Vec3c> u, std::span<const Vec3c> v,
                        std::span<Vec3c> out) {
    const auto& pairs = t.pairs();
    const int half = t.half_count();
    for (int k = 0; k < half; ++k) {
        double o0r = 0, o0i = 0, o1r = 0, o1i = 0, o2r = 0, o2i = 0;
        const std::size_t begin = t.pair_offset(k);
        const std::size_t end = t.pair_offset(k + 1);
        for (std::size_t e = begin; e < end; ++e) {
            const auto& pe = pairs[e];
            const Vec3c& up = u[static_cast<std::size_t>(pe.p)];
            const Vec3c& vq = v[static_cast<std::size_t>(pe.q)];
            const double q0 = pe.qv[0], q1 = pe.qv[1], q2 = pe.qv[2];
            const double ps = pe.p_sign, qs = pe.q_sign;
            // d = u_p . q with the stored coefficient's conjugation folded in
            const double dre = up[0].real() * q0 + up[1].real() * q1 + up[2].real() * q2;
            const double dim = ps * (up[0].imag() * q0 + up[1].imag() * q1 + up[2].imag() * q2);
            // f = i * d
            const double fre = -dim, fim = dre;
            const double v0r = vq[0].real(), v0i = qs * vq[0].imag();
            const double v1r = vq[1].real(), v1i = qs * vq[1].imag();
            const double v2r = vq[2].real(), v2i = qs * vq[2].imag();
            o0r += fre * v0r - fim * v0i;
            o0i += fre * v0i + fim * v0r;
            o1r += fre * v1r - fim * v1i;
            o1i += fre * v1i + fim * v1r;
            o2r += fre * v2r - fim * v2i;
            o2i += fre * v2i + fim * v2r;
        }
        out[static_cast<std::size_t>(k)] = {std::complex<double>(o0r, o0i),
                                            std::complex<double>(o1r, o1i),
                                            std::complex<double>(o2r, o2i)};
    }
}

} // namespace detail

// B(u,v): exact mode-pair convolution, Leray-projected. The direct O(M^2)
// sum is the primary path; convect_pseudospectral below is the oracle.
inline ConvectionResult convect(const SpectralField& u, const SpectralField& v) {
    detail::require_same_table(u, v, "convect");
    const ModeTable& t = u.table();
    std::vector<Vec3c> out(static_cast<std::size_t>(t.half_count()));
    detail::convect_raw(t, u.coeffs(), v.coeffs(), out);
    double residual = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        auto& c = out[static_cast<std::size_t>(i)];
        const std::complex<double> div = static_cast<double>(k[0]) * c[0] +
                                         static_cast<double>(k[1]) * c[1] +
                                         static_cast<double>(k[2]) * c[2];
        residual = std::max(residual, std::abs(div));
        detail::project_mode(k, c);
    }
    return {SpectralField::from_coeffs(u.table_ptr(), std::move(out)), residual};
}

// b(u,v,w) = integral (u.grad)v . w under the normalized measure, evaluated
// as the L2 pairing of the unprojected convolution with w.
inline double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    detail::require_same_table(u, v, "trilinear");
    detail::require_same_table(u, w, "trilinear");
    const ModeTable& t = u.table();
    std::vector<Vec3c> conv(static_cast<std::size_t>(t.half_count()));
    detail::convect_raw(t, u.coeffs(), v.coeffs(), conv);
    double acc = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const auto& a = conv[static_cast<std::size_t>(i)];
        const auto& b = w.coeffs()[static_cast<std::size_t>(i)];
        acc += a[0].real() * b[0].real() + a[0].imag() * b[0].imag() +
               a[1].real() * b[1].real() + a[1].imag() * b[1].imag() +
               a[2].real() * b[2].real() + a[2].imag() * b[2].imag();
    }
    return 2.0 * acc;
}

// Convection commutator norm |[Lambda^s, (f.grad)] g|_{L^2} with
// [Lambda^s, (f.grad)] g = Lambda^s((f.grad)g) - (f.grad)(Lambda^s g),
// products cube-truncated, no projection. Requires s > 0.
inline double commutator_norm(const SpectralField& f, const SpectralField& g, double s) {
    if (!(s > 0.0)) throw std::domain_error("commutator_norm: requires s > 0");
    detail::require_same_table(f, g, "commutator_norm");
    const ModeTable& t = f.table();
    const std::size_t m = static_cast<std::size_t>(t.half_count());
    std::vector<Vec3c> a(m), b(m);
    detail::convect_raw(t, f.coeffs(), g.coeffs(), a);
    const SpectralField gs = lambda_pow(g, s);
    detail::convect_raw(t, f.coeffs(), gs.coeffs(), b);
    double acc = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const double w = std::pow(t.mode_norm(i), s);
        const auto& ai = a[static_cast<std::size_t>(i)];
        const auto& bi = b[static_cast<std::size_t>(i)];
        for (int j = 0; j < 3; ++j) {
            const std::complex<double> d =
                w * ai[static_cast<std::size_t>(j)] - bi[static_cast<std::size_t>(j)];
            acc += std::norm(d);
        }
    }
    return std::sqrt(2.0 * acc);
}

// Pseudo-spectral evaluation of B(u,v) on a grid with g >= 3*n_max + 1
// points per axis (alias-free for the retained cube). Oracle path only.
inline ConvectionResult convect_pseudospectral(const SpectralField& u, const SpectralField& v,
                                               int g) {
    detail::require_same_table(u, v, "convect_pseudospectral");
    const ModeTable& t = u.table();
    const int n = t.n_max();
    if (g < 3 * n + 1)
        throw std::invalid_argument("convect_pseudospectral: grid must be >= 3*n_max+1 per axis");
    const GridSamples us = evaluate_on_grid(u, g);
    const GridSamples dv0 = evaluate_on_grid(derivative(v, 0), g);
    const GridSamples dv1 = evaluate_on_grid(derivative(v, 1), g);
    const GridSamples dv2 = evaluate_on_grid(derivative(v, 2), g);
    const std::size_t pts = static_cast<std::size_t>(g) * g * g;
    std::vector<double> w(3 * pts);
    for (std::size_t i = 0; i < pts; ++i)
        for (std::size_t c = 0; c < 3; ++c)
            w[3 * i + c] = us.v[3 * i + 0] * dv0.v[3 * i + c] +
                           us.v[3 * i + 1] * dv1.v[3 * i + c] +
                           us.v[3 * i + 2] * dv2.v[3 * i + c];
    // Inverse transform at the retained half modes.
    const auto tw = detail::twiddles(n, g);
    auto tref = [&](int k, int j) {
        return tw[static_cast<std::size_t>(k + n) * static_cast<std::size_t>(g) +
                  static_cast<std::size_t>(j)];
    };
    std::vector<Vec3c> out(static_cast<std::size_t>(t.half_count()));
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        std::complex<double> acc[3] = {};
        for (int ix = 0; ix < g; ++ix) {
            const std::complex<double> ex = std::conj(tref(k[0], ix));
            for (int iy = 0; iy < g; ++iy) {
                const std::complex<double> exy = ex * std::conj(tref(k[1], iy));
                const double* row = &w[static_cast<std::size_t>(3) *
                                       (static_cast<std::size_t>(ix * g + iy) *
                                        static_cast<std::size_t>(g))];
                for (int iz = 0; iz < g; ++iz) {
                    const std::complex<double> e = exy * std::conj(tref(k[2], iz));
                    acc[0] += row[3 * iz + 0] * e;
                    acc[1] += row[3 * iz + 1] * e;
                    acc[2] += row[3 * iz + 2] * e;
                }
            }
        }
        const double inv = 1.0 / static_cast<double>(pts);
        out[static_cast<std::size_t>(i)] = {acc[0] * inv, acc[1] * inv, acc[2] * inv};
    }
    double residual = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        auto& c = out[static_cast<std::size_t>(i)];
        const std::complex<double> div = static_cast<double>(k[0]) * c[0] +
                                         static_cast<double>(k[1]) * c[1] +
                                         static_cast<double>(k[2]) * c[2];
        residual = std::max(residual, std::abs(div));
        detail::project_mode(k, c);
    }
    return {SpectralField::from_coeffs(u.table_ptr(), std::move(out)), residual};
}

} // namespace sgns
