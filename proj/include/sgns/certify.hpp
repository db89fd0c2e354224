// SPDX-License-Identifier: Apache-2.0
//
// Noise hypothesis certification. Checks the transport-noise smallness
// conditions and the Kirchhoff growth/coercivity displays on sampled fields,
// reporting one certificate per hypothesis with the smallest observed slack.

#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sgns/inequalities.hpp"
#include "sgns/kirchhoff.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/transport_noise.hpp"

namespace sgns {

struct HypothesisCertificate {
    std::string which; // Hsigma1 | Hsigma2 | Hg2 | Hg2* | Hg3
    bool passed = false;
    double margin = 0.0; // smallest slack over samples; >= 0 iff passed
    int samples = 0;     // 0 for the basis-level facts
};

// kappa1 = max(delta1, 4 M0^2 / (1 - 8 N0)), the transport-noise absorption
// constant the H^{1/2} estimate needs.
inline double derive_kappa1(const TransportNoiseBasis& basis, double delta1) {
    const double sig = 4.0 * basis.M0() * basis.M0() / (1.0 - 8.0 * basis.N0());
    return std::max(delta1, sig);
}

inline double derive_kappa2(double delta2) { return 2.0 * delta2; }

// Smallest noise intensity the sufficient conditions admit, with a 5% margin.
inline double derive_rho(double kappa1, double kappa2, double gamma, double margin = 1.05) {
    return margin * std::max(kappa1 / (gamma - 1.0), kappa2);
}

inline KirchhoffNoise make_kirchhoff(const TransportNoiseBasis& basis, double delta1,
                                     double delta2, double gamma, std::size_t channels,
                                     double rho_margin = 1.05) {
    const double k1 = derive_kappa1(basis, delta1);
    const double k2 = derive_kappa2(delta2);
    const double rho = derive_rho(k1, k2, gamma, rho_margin);
    // Equal channel weights alpha_i = sqrt(rho / channels).
    std::vector<double> alphas(channels, std::sqrt(rho / static_cast<double>(channels)));
    return KirchhoffNoise(std::move(alphas), gamma, k1, k2);
}

// Not certified sample-wise; the Kirchhoff example satisfies the abstract
// growth hypothesis by construction. Reports carry this note alongside the
// certificates.
inline constexpr const char* kHg1Note =
    "Hg1 holds for the Kirchhoff example by its scalar structure; not separately certified";

// Evaluates the five certifiable hypotheses. The Kirchhoff noise must carry
// kappa1 = max(delta1, 4 M0^2/(1-8 N0)) and kappa2 = 2 delta2 for the given
// basis and deltas; anything else is a wiring error and is rejected.
//
// Sampled fields are drawn at the given truncation across spectral slopes
// with |u|_{1/2} log-uniform in [0.01, 100]. Margins are absolute slacks
// rhs - lhs of the corresponding displays, minimized over samples; the two
// basis-level certificates use 1/8 - N0 and a finiteness witness for M0.
inline std::vector<HypothesisCertificate> certify_hypotheses(
    const TransportNoiseBasis& basis, const KirchhoffNoise& noise, double delta1, double delta2,
    int samples, const std::shared_ptr<const ModeTable>& table, std::mt19937_64& rng) {
    if (samples < 1) throw std::invalid_argument("certify_hypotheses: samples must be >= 1");
    const double k1 = derive_kappa1(basis, delta1);
    const double k2 = derive_kappa2(delta2);
    const auto consistent = [](double a, double b) {
        return std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1.0});
    };
    if (!consistent(noise.kappa1(), k1) || !consistent(noise.kappa2(), k2))
        throw std::invalid_argument(
            "certify_hypotheses: noise kappa1/kappa2 disagree with the deltas and basis");

    const double gamma = noise.gamma();
    const double rho = noise.rho();
    double m_g2 = std::numeric_limits<double>::infinity();
    double m_g2s = std::numeric_limits<double>::infinity();
    double m_g3 = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> slope(0.25, 2.0);
    for (int i = 0; i < samples; ++i) {
        SpectralField u = random_field(table, slope(rng), 1.0, rng);
        const double amp = detail::log_uniform(rng, 0.01, 100.0);
        u = (amp / sobolev_norm(u, 0.5)) * u;
        const double x = sobolev_norm_sq(u, 0.5);
        const double y = sobolev_norm_sq(u, 1.0);
        const KirchhoffIdentities id = kirchhoff_identities(noise, u);
        const double lhs_g2 = k1 * (y * y + 1.0) * x * x + id.hs_half * x;
        // Hg2 carries the slack term C |u|_{1/2}^{gamma+2} with C := 1.
        m_g2 = std::min(m_g2, std::pow(x, 0.5 * (gamma + 2.0)) + gamma * id.diag_half - lhs_g2);
        m_g2s = std::min(m_g2s, gamma * id.diag_half - lhs_g2);
        const double lhs_g3 = k2 * y * y * y + id.hs_one;
        // Hg3 with C := rho, the value the Kirchhoff example realizes.
        m_g3 = std::min(m_g3, rho * (1.0 + y) + 2.0 * id.diag_one / (1.0 + y) - lhs_g3);
    }

    std::vector<HypothesisCertificate> certs;
    const double m_sig1 = std::isfinite(basis.M0()) ? 1.0 / (1.0 + basis.M0()) : -1.0;
    certs.push_back({"Hsigma1", m_sig1 >= 0.0, m_sig1, 0});
    const double m_sig2 = 0.125 - basis.N0();
    certs.push_back({"Hsigma2", m_sig2 >= 0.0, m_sig2, 0});
    certs.push_back({"Hg2", m_g2 >= 0.0, m_g2, samples});
    certs.push_back({"Hg2*", m_g2s >= 0.0, m_g2s, samples});
    certs.push_back({"Hg3", m_g3 >= 0.0, m_g3, samples});
    return certs;
}

inline bool all_passed(const std::vector<HypothesisCertificate>& certs) {
    for (const auto& c : certs)
        if (!c.passed) return false;
    return !certs.empty();
}

} // namespace sgns
