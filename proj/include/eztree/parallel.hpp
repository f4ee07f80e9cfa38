#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace eztree {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware).
/// Results must be written to per-index slots; ordering is the caller's job.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
}

/// Pairwise tree reduction in index order; the tree shape depends only on
/// the input length, so results are reproducible bit for bit.
template <class T, class Combine>
T pairwise_reduce(std::span<const T> items, Combine combine) {
    if (items.size() == 1) return items[0];
    const std::size_t half = items.size() / 2;
    return combine(pairwise_reduce(items.first(half), combine), pairwise_reduce(items.subspan(half), combine));
}

/// Welford accumulator with Chan's parallel merge.
struct RunningStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    static RunningStats merge(const RunningStats& a, const RunningStats& b) noexcept {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        RunningStats r;
        r.count = a.count + b.count;
        const double n = static_cast<double>(r.count);
        const double d = b.mean - a.mean;
        r.mean = a.mean + d * static_cast<double>(b.count) / n;
        r.m2 = a.m2 + b.m2 + d * d * static_cast<double>(a.count) * static_cast<double>(b.count) / n;
        return r;
    }

    double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const noexcept {
        return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
};

}  // namespace eztree
