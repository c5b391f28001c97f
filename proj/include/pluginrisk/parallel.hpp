#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace pluginrisk {

inline unsigned resolve_threads(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Chunked parallel loop over [0, count). Each index is processed exactly once;
// callers must write to disjoint slots so results are independent of scheduling.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    unsigned k = resolve_threads(threads);
    if (k <= 1 || count < 2 * k) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(k);
    const std::size_t chunk = (count + k - 1) / k;
    for (unsigned t = 0; t < k; ++t) {
        const std::size_t lo = t * chunk;
        if (lo >= count) break;
        const std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise (cascade) summation: deterministic for a fixed input order and
// accurate to O(log n) rounding growth.
inline double pairwise_sum(const double* data, std::size_t count) {
    if (count == 0) return 0.0;
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += data[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

} // namespace pluginrisk
