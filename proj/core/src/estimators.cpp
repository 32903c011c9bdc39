#include "fjlt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "fjlt/parallel.hpp"
#include "fjlt/random.hpp"
#include "fjlt/spectral.hpp"

namespace fjlt {

__extension__ typedef unsigned __int128 uint128;

namespace {

void require_k_matches(const RowIndexSet& rows, std::size_t k, const char* what) {
    if (k != rows.k())
        throw std::invalid_argument(std::string(what) + ": k=" + std::to_string(k) +
                                    " does not match the row set size " +
                                    std::to_string(rows.k()));
}

void require_length(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw std::invalid_argument(std::string(what) + ": vector length " +
                                    std::to_string(v.size()) + " != n=" + std::to_string(n));
}

// Floyd's algorithm: `count` distinct values from [0, n), sorted.
std::vector<std::uint32_t> random_subset(Rng& rng, std::size_t n, std::size_t count) {
    std::set<std::uint32_t> chosen;
    for (std::size_t j = n - count; j < n; ++j) {
        const auto t = static_cast<std::uint32_t>(rng.below(j + 1));
        if (!chosen.insert(t).second) chosen.insert(static_cast<std::uint32_t>(j));
    }
    return {chosen.begin(), chosen.end()};
}

// Saturating C(n, r); returns cap + 1 once the value exceeds cap.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r, std::uint64_t cap) {
    r = std::min(r, n - r);
    uint128 value = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        value = value * (n - r + i) / i;
        if (value > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(value);
}

bool next_combination(std::vector<std::uint32_t>& c, std::size_t n) {
    const std::size_t r = c.size();
    std::size_t i = r;
    while (i > 0) {
        --i;
        if (c[i] < n - r + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

double squared_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Scales y onto the boundary of B_2 ∩ alpha B_inf after clipping to the box.
// The deviation norm is 2-homogeneous in y, so the boundary dominates.
// Destinations tried by one swap move of the E_alpha ascent.
constexpr std::size_t kSwapCandidates = 8;

void retract_to_boundary(std::span<double> y, double alpha) {
    for (double& v : y) v = std::clamp(v, -alpha, alpha);
    const double l2 = std::sqrt(squared_norm(y));
    const double linf = max_abs(y);
    if (l2 == 0.0) return;
    const double t = std::min(1.0 / l2, alpha / linf);
    for (double& v : y) v *= t;
    // Rounding in the product can overshoot the box by an ulp.
    for (double& v : y) v = std::clamp(v, -alpha, alpha);
}

}  // namespace

RowGram::RowGram(const RowIndexSet& rows, std::size_t k) : corr_(rows.histogram()), k_(k) {
    require_k_matches(rows, k, "RowGram");
    fwht_in_place(corr_);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (double& c : corr_) c *= inv_k;
    corr_[0] = 1.0;  // sum of the histogram is k; pin the exact value
}

DeviationMatrix deviation_matrix(const RowIndexSet& rows, std::span<const double> y,
                                 std::size_t k, std::size_t direct_max_n) {
    require_k_matches(rows, k, "deviation_matrix");
    const std::size_t n = rows.n();
    require_length(y, n, "deviation_matrix");

    DeviationMatrix out{Eigen::MatrixXd::Zero(n, n)};
    const double inv_k = 1.0 / static_cast<double>(k);
    if (n <= direct_max_n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] == 0.0) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (y[j] == 0.0) continue;
                double sum = 0.0;
                for (auto s : rows.indices()) sum += hadamard_sign(s, i) * hadamard_sign(s, j);
                const double v = -y[i] * y[j] * sum * inv_k;
                out.entries(i, j) = v;
                out.entries(j, i) = v;
            }
        }
    } else {
        const RowGram gram(rows, k);
        for (std::size_t j = 0; j < n; ++j) {
            if (y[j] == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j || y[i] == 0.0) continue;
                out.entries(i, j) = -y[i] * y[j] * gram(i, j);
            }
        }
    }
    // Diagonal: y_i^2 (1 - k/k) = 0.
    return out;
}

double rip_support_deviation(const RowGram& gram, std::span<const std::uint32_t> support) {
    const auto r = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd m(r, r);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index b = 0; b < r; ++b)
            m(a, b) = gram(support[a], support[b]) - (a == b ? 1.0 : 0.0);
    return spectral_norm(m).value;
}

RipReport rip_constant_bruteforce(const RowIndexSet& rows, std::size_t k, std::size_t r,
                                  std::uint64_t budget, std::uint64_t seed) {
    require_k_matches(rows, k, "rip_constant_bruteforce");
    const std::size_t n = rows.n();
    if (r < 1 || r > n)
        throw std::invalid_argument("rip_constant_bruteforce: r=" + std::to_string(r) +
                                    " must lie in [1, " + std::to_string(n) + "]");
    if (budget < 1) throw std::invalid_argument("rip_constant_bruteforce: budget must be >= 1");

    const RowGram gram(rows, k);
    RipReport report;
    report.r = r;
    report.delta_hat = -1.0;

    auto visit = [&](const std::vector<std::uint32_t>& support) {
        const auto r_eig = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd m(r_eig, r_eig);
        for (Eigen::Index a = 0; a < r_eig; ++a)
            for (Eigen::Index b = 0; b < r_eig; ++b)
                m(a, b) = gram(support[a], support[b]) - (a == b ? 1.0 : 0.0);
        const auto norm = spectral_norm(m);
        report.all_converged = report.all_converged && norm.converged;
        ++report.supports_checked;
        if (norm.value > report.delta_hat) {
            report.delta_hat = norm.value;
            report.witness_support = support;
        }
    };

    const std::uint64_t total = binomial_capped(n, r, budget);
    if (total <= budget) {
        report.exhaustive = true;
        std::vector<std::uint32_t> support(r);
        std::iota(support.begin(), support.end(), 0u);
        do {
            visit(support);
        } while (next_combination(support, n));
    } else {
        report.exhaustive = false;
        Rng rng(derive_seed(seed, 0));
        std::set<std::vector<std::uint32_t>> seen;
        while (seen.size() < budget) {
            auto support = random_subset(rng, n, r);
            if (!seen.insert(support).second) continue;
            visit(support);
        }
    }
    return report;
}

double e_alpha_objective(const RowGram& gram, std::span<const double> y) {
    require_length(y, gram.n(), "e_alpha_objective");
    std::vector<std::uint32_t> support;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] != 0.0) support.push_back(static_cast<std::uint32_t>(i));
    const auto m = static_cast<Eigen::Index>(support.size());
    if (m == 0) return 0.0;
    Eigen::MatrixXd dev(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const double ya = y[support[a]];
        for (Eigen::Index b = 0; b < m; ++b) {
            const double delta_ab = a == b ? 1.0 : 0.0;
            dev(a, b) = ya * y[support[b]] * (delta_ab - gram(support[a], support[b]));
        }
    }
    return spectral_norm(dev).value;
}

bool in_feasible_set(std::span<const double> y, double alpha) {
    return std::sqrt(squared_norm(y)) <= 1.0 + 1e-12 && max_abs(y) <= alpha + 1e-12;
}

EAlphaEstimate estimate_e_alpha(const RowIndexSet& rows, std::size_t k, double alpha,
                                std::uint64_t samples, std::uint64_t ascent_iters,
                                std::uint64_t seed, unsigned threads) {
    require_k_matches(rows, k, "estimate_e_alpha");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("estimate_e_alpha: alpha must lie in (0, 1], got " +
                                    std::to_string(alpha));
    if (samples < 1) throw std::invalid_argument("estimate_e_alpha: samples must be >= 1");

    const std::size_t n = rows.n();
    const RowGram gram(rows, k);

    double flat_count = 1.0 / (alpha * alpha);
    if (std::abs(flat_count - std::round(flat_count)) <= 1e-9 * flat_count)
        flat_count = std::round(flat_count);
    const auto flat_size = static_cast<std::size_t>(
        std::min(static_cast<double>(n), std::ceil(flat_count)));
    const double flat_magnitude = std::min(alpha, 1.0 / std::sqrt(static_cast<double>(flat_size)));
    const std::size_t dense_cap = std::min(n, 4 * flat_size);

    struct Outcome {
        double value = 0.0;
        std::uint64_t evaluations = 0;
        RealVector y;
    };
    std::vector<Outcome> outcomes(samples);

    parallel_for(samples, threads, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        RealVector y(n, 0.0);
        if (i % 2 == 0) {
            for (auto idx : random_subset(rng, n, flat_size))
                y[idx] = (rng.next() & 1u) ? -flat_magnitude : flat_magnitude;
        } else {
            const std::size_t m = flat_size + rng.below(dense_cap - flat_size + 1);
            for (auto idx : random_subset(rng, n, m)) y[idx] = rng.normal();
            retract_to_boundary(y, alpha);
        }
        double value = e_alpha_objective(gram, y);
        std::uint64_t evaluations = 1;

        RealVector candidate;
        RealVector trial;
        for (std::uint64_t it = 0; it < ascent_iters; ++it) {
            candidate = y;
            std::vector<std::uint32_t> inside;
            std::vector<std::uint32_t> outside;
            for (std::size_t j = 0; j < n; ++j)
                (y[j] != 0.0 ? inside : outside).push_back(static_cast<std::uint32_t>(j));
            const auto move = rng.below(4);
            const bool can_add = !outside.empty();
            double v = 0.0;
            if (move == 0 && can_add && !inside.empty()) {
                // Move one support coordinate to the best of a few outside
                // positions, keeping its magnitude.
                const auto from = inside[rng.below(inside.size())];
                const std::size_t tries = std::min(kSwapCandidates, outside.size());
                v = -1.0;
                for (auto to : random_subset(rng, outside.size(), tries)) {
                    trial = y;
                    trial[outside[to]] = (rng.next() & 1u) ? -std::abs(y[from]) : std::abs(y[from]);
                    trial[from] = 0.0;
                    const double tv = e_alpha_objective(gram, trial);
                    ++evaluations;
                    if (tv > v) {
                        v = tv;
                        candidate.swap(trial);
                    }
                }
            } else {
                if (move == 3 && !inside.empty()) {
                    const auto at = inside[rng.below(inside.size())];
                    candidate[at] = -candidate[at];
                } else if (move == 1 && can_add) {
                    const auto to = outside[rng.below(outside.size())];
                    candidate[to] = (rng.next() & 1u) ? -alpha : alpha;
                } else if (!inside.empty()) {
                    const auto at = inside[rng.below(inside.size())];
                    candidate[at] += 0.5 * alpha * rng.normal();
                } else {
                    continue;
                }
                retract_to_boundary(candidate, alpha);
                v = e_alpha_objective(gram, candidate);
                ++evaluations;
            }
            if (v > value) {
                value = v;
                y.swap(candidate);
            }
        }
        outcomes[i] = {value, evaluations, std::move(y)};
    });

    EAlphaEstimate est;
    est.alpha = alpha;
    est.samples = samples;
    est.ascent_iters = ascent_iters;
    for (const auto& o : outcomes) est.evaluations += o.evaluations;
    est.flat_support_size = flat_size;
    std::size_t best = 0;
    for (std::size_t i = 1; i < outcomes.size(); ++i)
        if (outcomes[i].value > outcomes[best].value) best = i;
    est.lower_bound = outcomes[best].value;
    est.witness = std::move(outcomes[best].y);
    const double linf = max_abs(est.witness);
    est.witness_linf_sq = linf * linf;
    return est;
}

DistortionReport distortion_stats(const FastJLTransform& t, std::span<const RealVector> ys,
                                  double delta, unsigned threads) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("distortion_stats: delta must be finite and >= 0");
    for (std::size_t i = 0; i < ys.size(); ++i)
        if (ys[i].size() != t.n())
            throw std::invalid_argument("distortion_stats: vector " + std::to_string(i) +
                                        " has length " + std::to_string(ys[i].size()) +
                                        ", expected " + std::to_string(t.n()));

    std::vector<double> ratio(ys.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(ys.size(), threads, [&](std::size_t i) {
        const double norm_sq = squared_norm(ys[i]);
        if (norm_sq == 0.0) return;
        ratio[i] = squared_norm(t.apply(ys[i])) / norm_sq;
    });

    DistortionReport report;
    report.delta = delta;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        if (std::isnan(ratio[i]))
            report.skipped.push_back(i);
        else
            report.ratios.push_back(ratio[i]);
    }
    if (report.ratios.empty()) return report;

    const auto [lo, hi] = std::minmax_element(report.ratios.begin(), report.ratios.end());
    report.min = *lo;
    report.max = *hi;
    double sum = 0.0;
    std::size_t within = 0;
    for (double r : report.ratios) {
        sum += r;
        const double dev = std::abs(r - 1.0);
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        if (dev <= delta) ++within;
    }
    const auto count = static_cast<double>(report.ratios.size());
    report.mean = sum / count;
    report.success_fraction = static_cast<double>(within) / count;
    return report;
}

CrossTermStats cross_term_stats(const RowIndexSet& rows, std::size_t k,
                                const HeavyLightSplit& split, std::uint64_t trials,
                                std::uint64_t seed, unsigned threads) {
    require_k_matches(rows, k, "cross_term_stats");
    const std::size_t n = rows.n();
    require_length(split.heavy, n, "cross_term_stats(heavy)");
    require_length(split.light, n, "cross_term_stats(light)");
    for (std::size_t i = 0; i < n; ++i)
        if (split.heavy[i] != 0.0 && split.light[i] != 0.0)
            throw std::invalid_argument("cross_term_stats: heavy and light overlap at index " +
                                        std::to_string(i));
    if (trials < 2) throw std::invalid_argument("cross_term_stats: trials must be >= 2");

    const double inv_k = 1.0 / static_cast<double>(k);
    std::vector<double> z(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<double> b(n);
        rng.fill_signs(std::span<double>(b));
        RealVector xh(n);
        RealVector xl(n);
        for (std::size_t i = 0; i < n; ++i) {
            xh[i] = b[i] * split.heavy[i];
            xl[i] = b[i] * split.light[i];
        }
        const auto ph = subsampled_apply(xh, rows);
        const auto pl = subsampled_apply(xl, rows);
        double dot = 0.0;
        for (std::size_t s = 0; s < k; ++s) dot += ph[s] * pl[s];
        z[t] = dot * inv_k;
    });

    CrossTermStats stats;
    stats.trials = trials;
    const double count = static_cast<double>(trials);
    stats.mean = std::accumulate(z.begin(), z.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : z) ss += (v - stats.mean) * (v - stats.mean);
    stats.std = std::sqrt(ss / (count - 1.0));
    return stats;
}

ConcentrationReport concentration_check(const RowIndexSet& rows, std::size_t k,
                                        std::span<const double> light, std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads) {
    require_k_matches(rows, k, "concentration_check");
    const std::size_t n = rows.n();
    require_length(light, n, "concentration_check");
    if (trials < 100) throw std::invalid_argument("concentration_check: trials must be >= 100");

    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<double> x(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<double> b(n);
        rng.fill_signs(std::span<double>(b));
        for (std::size_t i = 0; i < n; ++i) b[i] *= light[i];
        x[t] = scale * std::sqrt(squared_norm(subsampled_apply(b, rows)));
    });

    ConcentrationReport report;
    report.trials = trials;

    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = trials / 2;
    report.median = trials % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    double sum_sq = 0.0;
    for (double v : x) sum_sq += v * v;
    report.rms = std::sqrt(sum_sq / static_cast<double>(trials));

    // sigma^2 = || (1/k) D_light Phi^T Phi D_light ||, evaluated on supp(light).
    const RowGram gram(rows, k);
    std::vector<std::uint32_t> support;
    for (std::size_t i = 0; i < n; ++i)
        if (light[i] != 0.0) support.push_back(static_cast<std::uint32_t>(i));
    const auto m = static_cast<Eigen::Index>(support.size());
    if (m > 0) {
        Eigen::MatrixXd g(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b)
                g(a, b) = light[support[a]] * light[support[b]] * gram(support[a], support[b]);
        report.sigma = std::sqrt(spectral_norm(g).value);
    }
    report.normalized_gap =
        report.sigma > 0.0 ? std::abs(report.median - report.rms) / report.sigma : 0.0;

    const auto& mult = ConcentrationReport::kTailMultipliers;
    for (std::size_t j = 0; j < mult.size(); ++j) {
        const double t = mult[j] * report.sigma;
        std::size_t above = 0;
        std::size_t below = 0;
        for (double v : x) {
            if (v > report.median + t) ++above;
            if (v < report.median - t) ++below;
        }
        report.tail_upper[j] = static_cast<double>(above) / static_cast<double>(trials);
        report.tail_lower[j] = static_cast<double>(below) / static_cast<double>(trials);
        report.tail_two_sided[j] = report.tail_upper[j] + report.tail_lower[j];
    }
    return report;
}

}  // namespace fjlt
