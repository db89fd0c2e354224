// SPDX-License-Identifier: Apache-2.0
//
// Integer wave vectors on the 3-torus and the half-space convention used to
// make the reality constraint structural.

#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>

namespace sgns {

// A Fourier mode index k in Z^3 \ {0}. Fields are zero-mean, so k = 0 never
// appears in any stored representation.
struct WaveVector {
    std::array<int, 3> k{0, 0, 0};

    constexpr int operator[](int i) const { return k[static_cast<std::size_t>(i)]; }
    constexpr int& operator[](int i) { return k[static_cast<std::size_t>(i)]; }

    constexpr bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }

    constexpr int norm_sq() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
    double norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

    constexpr int norm_inf() const {
        int m = k[0] < 0 ? -k[0] : k[0];
        const int a1 = k[1] < 0 ? -k[1] : k[1];
        const int a2 = k[2] < 0 ? -k[2] : k[2];
        if (a1 > m) m = a1;
        if (a2 > m) m = a2;
        return m;
    }

    constexpr WaveVector operator-() const { return {{-k[0], -k[1], -k[2]}}; }
    constexpr WaveVector operator+(const WaveVector& o) const {
        return {{k[0] + o.k[0], k[1] + o.k[1], k[2] + o.k[2]}};
    }
    constexpr WaveVector operator-(const WaveVector& o) const {
        return {{k[0] - o.k[0], k[1] - o.k[1], k[2] - o.k[2]}};
    }

    // Lexicographic order; also the storage order of snapshots and mode tables.
    constexpr auto operator<=>(const WaveVector&) const = default;
};

// Half-space convention: of each pair {k, -k} exactly the lexicographically
// positive member is stored. k is positive when its first nonzero component
// is positive.
constexpr bool lex_positive(const WaveVector& w) {
    if (w.k[0] != 0) return w.k[0] > 0;
    if (w.k[1] != 0) return w.k[1] > 0;
    return w.k[2] > 0;
}

constexpr bool in_cube(const WaveVector& w, int n_max) {
    return w.k[0] >= -n_max && w.k[0] <= n_max && w.k[1] >= -n_max && w.k[1] <= n_max &&
           w.k[2] >= -n_max && w.k[2] <= n_max;
}

} // namespace sgns
