#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fjlt/hadamard.hpp"
#include "fjlt/heavy_light.hpp"
#include "fjlt/transform.hpp"

namespace fjlt {

/// (1/k) Phi^T Phi for a row multiset, stored implicitly.
///
/// Because H(s,i) H(s,j) = H(s, i xor j), the Gram matrix depends on i xor j
/// only: G(i,j) = c[i ^ j] with c = (1/k) H h and h the row histogram.
/// Construction costs one fast transform. c[0] == 1 exactly.
class RowGram {
public:
    RowGram(const RowIndexSet& rows, std::size_t k);

    std::size_t n() const noexcept { return corr_.size(); }
    std::size_t k() const noexcept { return k_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return corr_[i ^ j]; }
    std::span<const double> correlation() const noexcept { return corr_; }

private:
    std::vector<double> corr_;
    std::size_t k_;
};

/// D_y^2 - (1/k) D_y Phi^T Phi D_y, dense n x n.
struct DeviationMatrix {
    Eigen::MatrixXd entries;
};

/// Entry (i,j) = y_i y_j (delta_ij - (1/k) sum_s H(rows_s,i) H(rows_s,j)).
/// Uses the direct row sum when n <= direct_max_n, the transform-based
/// RowGram otherwise.
DeviationMatrix deviation_matrix(const RowIndexSet& rows, std::span<const double> y,
                                 std::size_t k, std::size_t direct_max_n = 512);

struct RipReport {
    std::size_t r = 0;
    double delta_hat = 0.0;
    std::vector<std::uint32_t> witness_support;
    std::uint64_t supports_checked = 0;
    bool exhaustive = false;
    bool all_converged = true;
};

/// || id_T - (1/k) id_T Phi^T Phi id_T || for one support T.
double rip_support_deviation(const RowGram& gram, std::span<const std::uint32_t> support);

/// Max of rip_support_deviation over supports of size r. Exhaustive when
/// C(n, r) <= budget, otherwise `budget` distinct supports drawn uniformly
/// (seeded) and exhaustive=false.
RipReport rip_constant_bruteforce(const RowIndexSet& rows, std::size_t k, std::size_t r,
                                  std::uint64_t budget, std::uint64_t seed = 0);

struct EAlphaEstimate {
    double alpha = 1.0;
    double lower_bound = 0.0;
    RealVector witness;
    std::uint64_t samples = 0;
    std::uint64_t ascent_iters = 0;
    std::uint64_t evaluations = 0;
    std::size_t flat_support_size = 0;   // ceil(1/alpha^2), capped at n
    double witness_linf_sq = 0.0;        // ||D_y^2|| = ||witness||_inf^2
};

/// || D_y^2 - (1/k) D_y Phi^T Phi D_y || evaluated on supp(y).
double e_alpha_objective(const RowGram& gram, std::span<const double> y);

/// True when ||y||_2 <= 1 + 1e-12 and ||y||_inf <= alpha + 1e-12.
bool in_feasible_set(std::span<const double> y, double alpha);

/// Lower-bound estimate of sup over y in B_2 ∩ alpha B_inf of the deviation
/// norm, for the fixed row set.
///
/// Sample i (sub-seed derive_seed(seed, i)) starts from a flat vector with
/// ceil(1/alpha^2) coordinates of magnitude alpha (even i) or a random
/// feasible vector (odd i), then runs `ascent_iters` accept-if-better
/// moves: relocate a support coordinate to the best of a few outside
/// positions, add one, perturb one, or flip a sign, retracting back into the
/// feasible set. Every sample is independent of the others, so the result is
/// non-decreasing in both `samples` and `ascent_iters`.
EAlphaEstimate estimate_e_alpha(const RowIndexSet& rows, std::size_t k, double alpha,
                                std::uint64_t samples, std::uint64_t ascent_iters,
                                std::uint64_t seed, unsigned threads = 1);

struct DistortionReport {
    std::vector<double> ratios;            // ||apply(y)||^2 / ||y||^2, non-skipped vectors
    std::vector<std::size_t> skipped;      // indices of zero vectors
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double max_abs_deviation = 0.0;        // max |ratio - 1|
    double delta = 0.0;
    double success_fraction = 0.0;         // fraction with |ratio - 1| <= delta
};

DistortionReport distortion_stats(const FastJLTransform& t, std::span<const RealVector> ys,
                                  double delta, unsigned threads = 1);

struct CrossTermStats {
    double mean = 0.0;
    double std = 0.0;
    std::uint64_t trials = 0;
};

/// Monte-Carlo mean and standard deviation of
/// Z = (1/k) b^T D_heavy Phi^T Phi D_light b over fresh Rademacher b.
CrossTermStats cross_term_stats(const RowIndexSet& rows, std::size_t k,
                                const HeavyLightSplit& split, std::uint64_t trials,
                                std::uint64_t seed, unsigned threads = 1);

struct ConcentrationReport {
    static constexpr std::array<double, 3> kTailMultipliers{1.0, 2.0, 3.0};

    std::uint64_t trials = 0;
    double median = 0.0;
    double rms = 0.0;
    double sigma = 0.0;                // || (1/sqrt k) Phi D_light ||
    double normalized_gap = 0.0;       // |median - rms| / sigma, 0 when sigma = 0
    std::array<double, 3> tail_upper{};   // Pr[X > median + t]
    std::array<double, 3> tail_lower{};   // Pr[X < median - t]
    std::array<double, 3> tail_two_sided{};
};

/// Samples X = || (1/sqrt k) Phi D_light b || over fresh b.
ConcentrationReport concentration_check(const RowIndexSet& rows, std::size_t k,
                                        std::span<const double> light, std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads = 1);

}  // namespace fjlt
