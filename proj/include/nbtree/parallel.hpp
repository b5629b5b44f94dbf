// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nbtree {

namespace detail {
inline std::size_t& thread_override() {
    static std::size_t value = 0;
    return value;
}
} // namespace detail

/// Number of worker threads used by parallel kernels.
///
/// Resolution order: set_thread_count(), then the NBTREE_THREADS environment
/// variable, then std::thread::hardware_concurrency().
inline std::size_t thread_count() {
    if (detail::thread_override() > 0) {
        return detail::thread_override();
    }
    if (const char* env = std::getenv("NBTREE_THREADS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) {
            return parsed;
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Overrides the thread count; 0 restores the environment/hardware default.
inline void set_thread_count(std::size_t n) { detail::thread_override() = n; }

/// Runs fn(chunk) for every chunk in [0, chunks).
///
/// Chunks are claimed dynamically, so callers must make results independent
/// of the claiming order (write per-chunk outputs, reduce them in index order).
template <class Fn>
void parallel_for(std::size_t chunks, Fn&& fn) {
    const std::size_t workers = std::min(thread_count(), chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            fn(c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
                fn(c);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(chunks);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) {
        pool.emplace_back(work);
    }
    work();
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Splits [0, n) into fixed-size blocks; the partition never depends on the
/// thread count.
struct BlockPartition {
    std::size_t total;
    std::size_t block;

    std::size_t count() const { return total == 0 ? 0 : (total + block - 1) / block; }
    std::size_t begin(std::size_t b) const { return b * block; }
    std::size_t end(std::size_t b) const { return std::min(total, (b + 1) * block); }
};

/// Neumaier-compensated running sum.
template <class Real = double>
class CompensatedSum {
  public:
    void add(Real x) {
        const Real t = sum_ + x;
        if (abs_(sum_) >= abs_(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    void merge(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }
    Real value() const { return sum_ + comp_; }

  private:
    static Real abs_(Real x) { return x < 0 ? -x : x; }
    Real sum_ = 0;
    Real comp_ = 0;
};

} // namespace nbtree
