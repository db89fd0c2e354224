// SPDX-License-Identifier: Apache-2.0
//
// Deterministic Monte-Carlo dispatch: results land in a slot indexed by
// path id, so the reduction order never depends on thread scheduling.

#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace sgns {

// Runs f(0), ..., f(n_paths-1) and returns the results in path order.
// f must derive any randomness from the path id alone (seed derivation),
// never from shared state.
template <class F>
auto run_ensemble(int n_paths, int threads, F&& f)
    -> std::vector<std::invoke_result_t<F&, int>> {
    using R = std::invoke_result_t<F&, int>;
    if (n_paths < 0) throw std::invalid_argument("run_ensemble: negative path count");
    std::vector<R> out(static_cast<std::size_t>(n_paths));
    if (threads <= 1) {
        for (int i = 0; i < n_paths; ++i) out[static_cast<std::size_t>(i)] = f(i);
        return out;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_paths || failed.load()) return;
            try {
                out[static_cast<std::size_t>(i)] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, n_paths > 0 ? n_paths : 1);
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return out;
}

} // namespace sgns
