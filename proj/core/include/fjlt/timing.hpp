#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fjlt/transform.hpp"

namespace fjlt {

/// Median wall time of one call to fn, in nanoseconds. Each of the `repeats`
/// samples times a batch of calls sized so the batch lasts at least
/// min_sample_ns; `warmup` untimed calls run first.
double median_call_ns(const std::function<void()>& fn, std::size_t repeats,
                      std::size_t warmup = 1, double min_sample_ns = 2e6);

/// Minimum per-call time of each function, in nanoseconds. The functions are
/// timed round-robin, one batch of at least min_sample_ns each per round, so
/// a slow spell on a shared machine hits all of them alike; the minimum over
/// `rounds` discards interference, which only ever adds time.
std::vector<double> interleaved_min_call_ns(const std::vector<std::function<void()>>& fns,
                                            std::size_t rounds, double min_sample_ns = 2e6);

/// k x n dense multiply with (1/sqrt k) Phi D_b, entries generated on the fly
/// rather than stored. Same arithmetic as dense_matrix() * y without the
/// k*n*8 bytes of storage, so it can be timed at sizes where materializing
/// is impossible.
RealVector dense_reference_apply(const FastJLTransform& t, std::span<const double> y);

struct BenchRow {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t repeats = 0;
    double fwht_ns = 0.0;           // copy + transform, interleaved minimum
    double apply_ns = 0.0;          // median
    std::optional<double> dense_ns;
};

struct BenchOptions {
    std::vector<std::size_t> n_list;
    std::optional<std::size_t> k;     // fixed k, else k = max(1, n * k_fraction)
    double k_fraction = 0.25;
    std::size_t repeats = 5;
    std::size_t dense_max_n = 1u << 16;  // dense baseline skipped above this
    std::uint64_t seed = 0;
};

std::vector<BenchRow> run_bench(const BenchOptions& options);

}  // namespace fjlt
