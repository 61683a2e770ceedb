#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

namespace relnc {

// Row-major index arithmetic over a small multidimensional grid
// (source index tuples, observation tuples). The last axis varies fastest.
class IndexGrid {
public:
    IndexGrid() = default;
    explicit IndexGrid(std::vector<int> dims) : dims_(std::move(dims)) {
        strides_.resize(dims_.size());
        std::size_t n = 1;
        for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
            strides_[i] = n;
            n *= static_cast<std::size_t>(dims_[i]);
        }
        size_ = n;
    }

    std::size_t size() const { return size_; }
    int rank() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int axis) const { return dims_[axis]; }

    std::size_t flatten(std::span<const int> idx) const {
        std::size_t f = 0;
        for (std::size_t i = 0; i < dims_.size(); ++i) f += strides_[i] * static_cast<std::size_t>(idx[i]);
        return f;
    }

    void unflatten(std::size_t flat, std::span<int> out) const {
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            out[i] = static_cast<int>(flat / strides_[i]);
            flat %= strides_[i];
        }
    }

    int coord(std::size_t flat, int axis) const {
        return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(dims_[axis]));
    }

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

// FNV-1a, used for config hashes embedded in CSV headers. Stable across
// builds and platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Pairwise reduction of partial sums; the simulator accumulates per-batch
// partials and folds them here to keep long Monte Carlo runs stable.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Falls back to the
// calling thread for n <= 1 or threads <= 1. Work items must be independent.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline int env_thread_count(const char* var, int fallback) {
    if (const char* v = std::getenv(var)) {
        const int n = std::atoi(v);
        if (n >= 1) return n;
    }
    return fallback;
}

}  // namespace relnc
