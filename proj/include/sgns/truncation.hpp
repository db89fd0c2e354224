// SPDX-License-Identifier: Apache-2.0
//
// Cube truncation of the Fourier lattice and the cached mode tables every
// field operation runs on: half-space mode lists, inverse lookups, and the
// flattened (p, q) pair table that drives the spectral convolution.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "sgns/wavevector.hpp"

namespace sgns {

using Vec3c = std::array<std::complex<double>, 3>;

// Galerkin cut-off: modes with max_j |k_j| <= n_max are retained. The mode
// set is closed under k -> -k by construction.
struct TruncationSpec {
    int n_max = 0;

    constexpr bool operator==(const TruncationSpec&) const = default;

    // Number of stored (half-space) modes.
    constexpr int mode_count() const {
        const int cube = (2 * n_max + 1) * (2 * n_max + 1) * (2 * n_max + 1);
        return (cube - 1) / 2;
    }
};

// Result of looking a wave vector up in the half-space storage: the index of
// the stored representative and whether the coefficient must be conjugated
// (true when the queried k is the negative of the stored one).
struct ModeRef {
    std::int32_t index = -1;
    bool conjugate = false;

    constexpr bool valid() const { return index >= 0; }
};

// Immutable per-truncation tables, built once and shared. All hot loops are
// index-based walks over these arrays.
class ModeTable {
  public:
    // One convolution term: coefficient at the group's output mode k receives
    // i (u_p . q) v_q with q = k - p. Signs replace conjugation branches:
    // the stored coefficient's imaginary part is multiplied by p_sign/q_sign.
    struct PairEntry {
        std::int32_t p;
        std::int32_t q;
        std::int8_t qv[3];
        std::int8_t p_sign;
        std::int8_t q_sign;
    };

    static std::shared_ptr<const ModeTable> get(int n_max) {
        if (n_max < 1) throw std::invalid_argument("ModeTable: n_max must be >= 1");
        static std::mutex mu;
        static std::map<int, std::shared_ptr<const ModeTable>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[n_max];
        if (!slot) slot = std::shared_ptr<const ModeTable>(new ModeTable(n_max));
        return slot;
    }

    int n_max() const { return n_max_; }
    TruncationSpec trunc() const { return {n_max_}; }

    int half_count() const { return static_cast<int>(half_.size()); }
    const WaveVector& half_mode(int i) const { return half_[static_cast<std::size_t>(i)]; }
    const std::vector<WaveVector>& half_modes() const { return half_; }

    double mode_norm(int i) const { return norm_[static_cast<std::size_t>(i)]; }
    int mode_norm_sq(int i) const { return norm_sq_[static_cast<std::size_t>(i)]; }

    // Valid for any k; invalid ModeRef for k = 0 or k outside the cube.
    ModeRef find(const WaveVector& k) const {
        if (!in_cube(k, n_max_)) return {};
        const std::int32_t code = lookup_[lookup_index(k)];
        if (code < 0) return {};
        return {code >> 1, (code & 1) != 0};
    }

    // Convolution pair table in CSR layout: pairs for output half-mode i live
    // in pairs()[pair_offset(i) .. pair_offset(i+1)).
    const std::vector<PairEntry>& pairs() const { return pairs_; }
    std::size_t pair_offset(int i) const { return pair_offsets_[static_cast<std::size_t>(i)]; }

  private:
    explicit ModeTable(int n_max) : n_max_(n_max) {
        const int w = 2 * n_max_ + 1;
        half_.reserve(static_cast<std::size_t>((w * w * w - 1) / 2));
        for (int a = -n_max_; a <= n_max_; ++a)
            for (int b = -n_max_; b <= n_max_; ++b)
                for (int c = -n_max_; c <= n_max_; ++c) {
                    const WaveVector k{{a, b, c}};
                    if (!k.is_zero() && lex_positive(k)) half_.push_back(k);
                }
        // The generation loop above emits lexicographic order already; keep
        // that ordering as the storage and snapshot order.
        norm_.reserve(half_.size());
        norm_sq_.reserve(half_.size());
        for (const auto& k : half_) {
            norm_sq_.push_back(k.norm_sq());
            norm_.push_back(k.norm());
        }
        lookup_.assign(static_cast<std::size_t>(w) * w * w, -1);
        for (std::int32_t i = 0; i < static_cast<std::int32_t>(half_.size()); ++i) {
            lookup_[lookup_index(half_[static_cast<std::size_t>(i)])] = (i << 1);
            lookup_[lookup_index(-half_[static_cast<std::size_t>(i)])] = (i << 1) | 1;
        }
        build_pairs();
    }

    std::size_t lookup_index(const WaveVector& k) const {
        const int w = 2 * n_max_ + 1;
        return (static_cast<std::size_t>(k[0] + n_max_) * static_cast<std::size_t>(w) +
                static_cast<std::size_t>(k[1] + n_max_)) *
                   static_cast<std::size_t>(w) +
               static_cast<std::size_t>(k[2] + n_max_);
    }

    void build_pairs() {
        pair_offsets_.reserve(half_.size() + 1);
        pair_offsets_.push_back(0);
        for (const auto& k : half_) {
            for (int a = -n_max_; a <= n_max_; ++a)
                for (int b = -n_max_; b <= n_max_; ++b)
                    for (int c = -n_max_; c <= n_max_; ++c) {
                        const WaveVector p{{a, b, c}};
                        if (p.is_zero()) continue;
                        const WaveVector q = k - p;
                        if (q.is_zero() || !in_cube(q, n_max_)) continue;
                        const ModeRef rp = find(p);
                        const ModeRef rq = find(q);
                        PairEntry e;
                        e.p = rp.index;
                        e.q = rq.index;
                        e.qv[0] = static_cast<std::int8_t>(q[0]);
                        e.qv[1] = static_cast<std::int8_t>(q[1]);
                        e.qv[2] = static_cast<std::int8_t>(q[2]);
                        e.p_sign = rp.conjugate ? -1 : 1;
                        e.q_sign = rq.conjugate ? -1 : 1;
                        pairs_.push_back(e);
                    }
            pair_offsets_.push_back(pairs_.size());
        }
    }

    int n_max_;
    std::vector<WaveVector> half_;
    std::vector<double> norm_;
    std::vector<int> norm_sq_;
    std::vector<std::int32_t> lookup_;
    std::vector<PairEntry> pairs_;
    std::vector<std::size_t> pair_offsets_;
};

} // namespace sgns
