#include "fjlt/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fjlt/random.hpp"

namespace fjlt {

double median_call_ns(const std::function<void()>& fn, std::size_t repeats, std::size_t warmup,
                      double min_sample_ns) {
    using clock = std::chrono::steady_clock;
    if (repeats == 0) throw std::invalid_argument("median_call_ns: repeats must be >= 1");
    for (std::size_t i = 0; i < warmup; ++i) fn();

    // Calibrate the batch size from one timed call.
    auto t0 = clock::now();
    fn();
    const double single = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
    const auto batch = static_cast<std::size_t>(
        std::max(1.0, std::ceil(min_sample_ns / std::max(single, 1.0))));

    std::vector<double> samples(repeats);
    for (auto& s : samples) {
        t0 = clock::now();
        for (std::size_t b = 0; b < batch; ++b) fn();
        s = std::chrono::duration<double, std::nano>(clock::now() - t0).count() /
            static_cast<double>(batch);
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = repeats / 2;
    return repeats % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

std::vector<double> interleaved_min_call_ns(const std::vector<std::function<void()>>& fns,
                                            std::size_t rounds, double min_sample_ns) {
    using clock = std::chrono::steady_clock;
    if (rounds == 0) throw std::invalid_argument("interleaved_min_call_ns: rounds must be >= 1");
    std::vector<std::size_t> batch(fns.size());
    for (std::size_t f = 0; f < fns.size(); ++f) {
        fns[f]();
        const auto t0 = clock::now();
        fns[f]();
        const double single = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
        batch[f] = static_cast<std::size_t>(std::max(1.0, std::ceil(min_sample_ns / std::max(single, 1.0))));
    }
    std::vector<double> best(fns.size(), std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t f = 0; f < fns.size(); ++f) {
            const auto t0 = clock::now();
            for (std::size_t b = 0; b < batch[f]; ++b) fns[f]();
            const double per_call = std::chrono::duration<double, std::nano>(clock::now() - t0).count() /
                                    static_cast<double>(batch[f]);
            best[f] = std::min(best[f], per_call);
        }
    }
    return best;
}

RealVector dense_reference_apply(const FastJLTransform& t, std::span<const double> y) {
    if (y.size() != t.n()) throw std::invalid_argument("dense_reference_apply: length mismatch");
    const std::size_t n = t.n();
    RealVector signed_y(n);
    for (std::size_t j = 0; j < n; ++j) signed_y[j] = t.signs()[j] * y[j];
    RealVector out(t.k());
    for (std::size_t s = 0; s < t.k(); ++s) {
        const std::uint64_t row = t.rows()[s];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += hadamard_sign(row, j) * signed_y[j];
        out[s] = t.scale() * acc;
    }
    return out;
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
    std::vector<BenchRow> table;
    std::vector<RealVector> inputs;
    for (std::size_t n : o.n_list) {
        require_power_of_two(n, "bench");
        BenchRow row;
        row.n = n;
        row.k = o.k ? std::min(*o.k, n)
                    : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                   static_cast<double>(n) * o.k_fraction));
        row.repeats = o.repeats;
        table.push_back(row);
        RealVector y(n);
        Rng rng(derive_seed(o.seed, n));
        rng.fill_normal(y);
        inputs.push_back(std::move(y));
    }

    // FWHT across sizes is timed interleaved so per-doubling ratios compare
    // like with like.
    std::vector<RealVector> work = inputs;
    std::vector<std::function<void()>> fwht_calls;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        fwht_calls.push_back([&, i] {
            std::copy(inputs[i].begin(), inputs[i].end(), work[i].begin());
            fwht_in_place(work[i]);
        });
    const auto fwht_ns = interleaved_min_call_ns(fwht_calls, o.repeats);

    volatile double sink = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto& row = table[i];
        const auto& y = inputs[i];
        row.fwht_ns = fwht_ns[i];
        const auto t = sample_transform(row.n, row.k, o.seed);
        row.apply_ns = median_call_ns([&] { sink = sink + t.apply(y)[0]; }, o.repeats);
        if (row.n <= o.dense_max_n)
            row.dense_ns = median_call_ns([&] { sink = sink + dense_reference_apply(t, y)[0]; },
                                          o.repeats, 0, 0.0);
    }
    return table;
}

}  // namespace fjlt
