// SPDX-License-Identifier: Apache-2.0
//
// Truncated Fourier representation of zero-mean real vector fields on the
// 3-torus, plus the linear spectral operators: Leray projection, fractional
// Laplacian powers, Sobolev norms and inner products, Galerkin truncation,
// and the seeded random-field sampler.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgns/truncation.hpp"

namespace sgns {

// Velocity field u stored as one coefficient triple per half-space mode.
// Reality (u_{-k} = conj(u_k)) and zero mean are structural: the negative
// half is never stored and k = 0 does not exist in the mode table.
// Divergence-freeness is an analytic invariant maintained by the factories
// and operations that promise it (leray_project, random_field, the
// integrator), not by the raw constructor; is_divergence_free() checks it.
class SpectralField {
  public:
    SpectralField() = default;

    static SpectralField zero(std::shared_ptr<const ModeTable> table) {
        SpectralField f;
        f.coeffs_.assign(static_cast<std::size_t>(table->half_count()), Vec3c{});
        f.table_ = std::move(table);
        return f;
    }

    // Raw factory: takes coefficients for the half-space modes in table
    // order. No projection is applied.
    static SpectralField from_coeffs(std::shared_ptr<const ModeTable> table,
                                     std::vector<Vec3c> coeffs) {
        if (static_cast<int>(coeffs.size()) != table->half_count())
            throw std::invalid_argument("SpectralField: coefficient count does not match truncation");
        SpectralField f;
        f.table_ = std::move(table);
        f.coeffs_ = std::move(coeffs);
        return f;
    }

    const ModeTable& table() const { return *table_; }
    const std::shared_ptr<const ModeTable>& table_ptr() const { return table_; }
    int n_max() const { return table_->n_max(); }
    TruncationSpec trunc() const { return table_->trunc(); }

    std::span<const Vec3c> coeffs() const { return coeffs_; }

    // Coefficient at an arbitrary wave vector; conjugate reconstructed for
    // the unstored half, zero outside the cube and at k = 0.
    Vec3c coeff(const WaveVector& k) const {
        const ModeRef r = table_->find(k);
        if (!r.valid()) return Vec3c{};
        const Vec3c& v = coeffs_[static_cast<std::size_t>(r.index)];
        if (!r.conjugate) return v;
        return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])};
    }

    bool empty() const { return !table_; }

  private:
    friend SpectralField leray_project(const SpectralField&);
    friend SpectralField lambda_pow(const SpectralField&, double);
    friend SpectralField galerkin_project(const SpectralField&, TruncationSpec);
    friend SpectralField random_field(const std::shared_ptr<const ModeTable>&, double, double,
                                      std::mt19937_64&);
    friend SpectralField operator+(const SpectralField&, const SpectralField&);
    friend SpectralField operator-(const SpectralField&, const SpectralField&);
    friend SpectralField operator*(double, const SpectralField&);

    std::shared_ptr<const ModeTable> table_;
    std::vector<Vec3c> coeffs_;
};

namespace detail {

inline void require_same_table(const SpectralField& a, const SpectralField& b,
                               const char* what) {
    if (&a.table() != &b.table() && a.trunc() != b.trunc())
        throw std::invalid_argument(std::string(what) + ": truncation mismatch");
}

// P_k v = v - k (k.v)/|k|^2, applied in place.
inline void project_mode(const WaveVector& k, Vec3c& v) {
    const double k0 = k[0], k1 = k[1], k2 = k[2];
    const std::complex<double> kv = k0 * v[0] + k1 * v[1] + k2 * v[2];
    const double inv = 1.0 / static_cast<double>(k.norm_sq());
    const std::complex<double> s = kv * inv;
    v[0] -= k0 * s;
    v[1] -= k1 * s;
    v[2] -= k2 * s;
}

inline double abs_sq(const Vec3c& v) {
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

} // namespace detail

inline SpectralField leray_project(const SpectralField& f) {
    SpectralField out = f;
    const ModeTable& t = out.table();
    for (int i = 0; i < t.half_count(); ++i)
        detail::project_mode(t.half_mode(i), out.coeffs_[static_cast<std::size_t>(i)]);
    return out;
}

// Lambda^s: mode-wise multiplication by |k|^s. Defined for every real s
// because k = 0 is excluded by construction.
inline SpectralField lambda_pow(const SpectralField& f, double s) {
    SpectralField out = f;
    if (s == 0.0) return out;
    const ModeTable& t = out.table();
    for (int i = 0; i < t.half_count(); ++i) {
        const double w = std::pow(t.mode_norm(i), s);
        auto& v = out.coeffs_[static_cast<std::size_t>(i)];
        v[0] *= w;
        v[1] *= w;
        v[2] *= w;
    }
    return out;
}

// |u|_s^2 = sum_k |k|^{2s} |u_k|^2 over the full mode set.
inline double sobolev_norm_sq(const SpectralField& f, double s) {
    const ModeTable& t = f.table();
    double acc = 0.0;
    if (s == 0.0) {
        for (int i = 0; i < t.half_count(); ++i)
            acc += detail::abs_sq(f.coeffs()[static_cast<std::size_t>(i)]);
    } else {
        for (int i = 0; i < t.half_count(); ++i)
            acc += std::pow(static_cast<double>(t.mode_norm_sq(i)), s) *
                   detail::abs_sq(f.coeffs()[static_cast<std::size_t>(i)]);
    }
    return 2.0 * acc;
}

inline double sobolev_norm(const SpectralField& f, double s) {
    return std::sqrt(sobolev_norm_sq(f, s));
}

// (u,v)_s = sum_k |k|^{2s} u_k . v_{-k}; real for real fields.
inline double sobolev_inner(const SpectralField& f, const SpectralField& g, double s) {
    if (&f.table() == &g.table() || f.trunc() == g.trunc()) {
        const ModeTable& t = f.table();
        double acc = 0.0;
        for (int i = 0; i < t.half_count(); ++i) {
            const auto& a = f.coeffs()[static_cast<std::size_t>(i)];
            const auto& b = g.coeffs()[static_cast<std::size_t>(i)];
            double re = a[0].real() * b[0].real() + a[0].imag() * b[0].imag() +
                        a[1].real() * b[1].real() + a[1].imag() * b[1].imag() +
                        a[2].real() * b[2].real() + a[2].imag() * b[2].imag();
            if (s != 0.0) re *= std::pow(static_cast<double>(t.mode_norm_sq(i)), s);
            acc += re;
        }
        return 2.0 * acc;
    }
    // Different truncations: pair over the union, fetching by wave vector.
    const ModeTable& big = f.n_max() >= g.n_max() ? f.table() : g.table();
    double acc = 0.0;
    for (int i = 0; i < big.half_count(); ++i) {
        const WaveVector& k = big.half_mode(i);
        const Vec3c a = f.coeff(k);
        const Vec3c b = g.coeff(k);
        double re = 0.0;
        for (int j = 0; j < 3; ++j)
            re += a[static_cast<std::size_t>(j)].real() * b[static_cast<std::size_t>(j)].real() +
                  a[static_cast<std::size_t>(j)].imag() * b[static_cast<std::size_t>(j)].imag();
        if (s != 0.0) re *= std::pow(static_cast<double>(k.norm_sq()), s);
        acc += re;
    }
    return 2.0 * acc;
}

// Pi_n: modes outside the target cube dropped; enlarging zero-pads.
inline SpectralField galerkin_project(const SpectralField& f, TruncationSpec n) {
    if (n == f.trunc()) return f;
    auto table = ModeTable::get(n.n_max);
    SpectralField out = SpectralField::zero(table);
    for (int i = 0; i < table->half_count(); ++i)
        out.coeffs_[static_cast<std::size_t>(i)] = f.coeff(table->half_mode(i));
    return out;
}

// H^{1/2}-squared, H^1-squared, H^{3/2}-squared in one pass; the integrator
// and estimators call this every step.
struct NormTriple {
    double h_half_sq = 0.0;
    double h_one_sq = 0.0;
    double h_three_half_sq = 0.0;
};

inline NormTriple norm_triple(const ModeTable& t, std::span<const Vec3c> coeffs) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const double m2 = detail::abs_sq(coeffs[static_cast<std::size_t>(i)]);
        const double kn = t.mode_norm(i);
        const double k2 = static_cast<double>(t.mode_norm_sq(i));
        a += kn * m2;
        b += k2 * m2;
        c += k2 * kn * m2;
    }
    return {2.0 * a, 2.0 * b, 2.0 * c};
}

inline NormTriple norm_triple(const SpectralField& f) {
    return norm_triple(f.table(), f.coeffs());
}

// Divergence-free, reality-respecting Gaussian sample with |u|_s equal to
// target_norm. Coefficients decay like |k|^{-(s+2)} before projection and
// rescaling. Deterministic given the stream state.
inline SpectralField random_field(const std::shared_ptr<const ModeTable>& table, double s,
                                  double target_norm, std::mt19937_64& rng) {
    if (!(target_norm > 0.0))
        throw std::invalid_argument("random_field: target_norm must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        SpectralField f = SpectralField::zero(table);
        for (int i = 0; i < table->half_count(); ++i) {
            const double w = std::pow(table->mode_norm(i), -(s + 2.0));
            auto& v = f.coeffs_[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j)
                v[static_cast<std::size_t>(j)] =
                    w * std::complex<double>(gauss(rng), gauss(rng));
        }
        f = leray_project(f);
        const double norm = sobolev_norm(f, s);
        if (!(norm > 1e-300)) continue;
        const double scale = target_norm / norm;
        for (auto& v : f.coeffs_)
            for (auto& z : v) z *= scale;
        return f;
    }
    throw std::runtime_error("random_field: degenerate draws, sampler failed 100 times");
}

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    detail::require_same_table(a, b, "SpectralField::operator+");
    SpectralField out = a;
    for (std::size_t i = 0; i < out.coeffs_.size(); ++i)
        for (int j = 0; j < 3; ++j)
            out.coeffs_[i][static_cast<std::size_t>(j)] += b.coeffs()[i][static_cast<std::size_t>(j)];
    return out;
}

inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    detail::require_same_table(a, b, "SpectralField::operator-");
    SpectralField out = a;
    for (std::size_t i = 0; i < out.coeffs_.size(); ++i)
        for (int j = 0; j < 3; ++j)
            out.coeffs_[i][static_cast<std::size_t>(j)] -= b.coeffs()[i][static_cast<std::size_t>(j)];
    return out;
}

inline SpectralField operator*(double a, const SpectralField& f) {
    SpectralField out = f;
    for (auto& v : out.coeffs_)
        for (auto& z : v) z *= a;
    return out;
}

// Largest |k . u_k| over stored modes: divergence diagnostic.
inline double max_divergence(const SpectralField& f) {
    const ModeTable& t = f.table();
    double worst = 0.0;
    for (int i = 0; i < t.half_count(); ++i) {
        const WaveVector& k = t.half_mode(i);
        const auto& v = f.coeffs()[static_cast<std::size_t>(i)];
        const std::complex<double> div =
            static_cast<double>(k[0]) * v[0] + static_cast<double>(k[1]) * v[1] +
            static_cast<double>(k[2]) * v[2];
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

inline bool is_divergence_free(const SpectralField& f, double tol = 1e-12) {
    return max_divergence(f) <= tol;
}

inline bool all_finite(const SpectralField& f) {
    for (const auto& v : f.coeffs())
        for (const auto& z : v)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace sgns
