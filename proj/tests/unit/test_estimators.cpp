#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fjlt/estimators.hpp"
#include "fjlt/spectral.hpp"
#include "support/oracles.hpp"

using namespace fjlt;
namespace T = fjlt::testing;

namespace {

std::vector<std::uint32_t> indices_of(const RowIndexSet& rows) {
    return {rows.indices().begin(), rows.indices().end()};
}

T::Matrix gram_of(const RowIndexSet& rows) {
    return T::oracle_gram(T::oracle_phi(indices_of(rows), rows.n()));
}

}  // namespace

TEST(RowGram, MatchesDenseGram) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rows = sample_transform(32, 12, seed).rows();
        const RowGram gram(rows, 12);
        const auto ref = gram_of(rows);
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(gram(i, j), ref[i][j], 1e-12);
        EXPECT_EQ(gram(7, 7), 1.0);
    }
    EXPECT_THROW(RowGram(RowIndexSet({0, 1}, 4), 3), std::invalid_argument);
}

TEST(DeviationMatrix, ZeroVectorAndFullSelection) {
    const auto rows = sample_transform(16, 4, 1).rows();
    EXPECT_EQ(deviation_matrix(rows, std::vector<double>(16, 0.0), 4).entries.cwiseAbs().maxCoeff(), 0.0);

    std::mt19937_64 rng(2);
    const auto y = T::random_vector(rng, 16);
    EXPECT_LE(deviation_matrix(RowIndexSet::full(16), y, 16).entries.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DeviationMatrix, MatchesDenseOracleBothRoutes) {
    std::mt19937_64 rng(3);
    const auto t = sample_transform(32, 8, 44);
    const auto y = T::random_vector(rng, 32);

    // Oracle built from dense_matrix: (1/sqrt k) Phi D_b, undo the signs.
    Eigen::MatrixXd scaled_phi = t.dense_matrix();
    for (Eigen::Index j = 0; j < scaled_phi.cols(); ++j) scaled_phi.col(j) *= t.signs()[j];
    const Eigen::MatrixXd gram = scaled_phi.transpose() * scaled_phi;
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), 32);
    const Eigen::MatrixXd expected = Eigen::MatrixXd(yv.cwiseAbs2().asDiagonal()) -
                                     yv.asDiagonal() * gram * yv.asDiagonal();

    const auto direct = deviation_matrix(t.rows(), y, 8);
    const auto via_transform = deviation_matrix(t.rows(), y, 8, 0);
    EXPECT_LE((direct.entries - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((via_transform.entries - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((direct.entries - direct.entries.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DeviationMatrix, DiagonalPartNormIsLinfSquared) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto y = T::random_unit_vector(rng, 64);
        Eigen::VectorXd sq(64);
        double linf = 0.0;
        for (int i = 0; i < 64; ++i) {
            sq[i] = y[i] * y[i];
            linf = std::max(linf, std::abs(y[i]));
        }
        const Eigen::MatrixXd dy2 = sq.asDiagonal();
        EXPECT_NEAR(spectral_norm(dy2).value, linf * linf, 1e-12);
    }
}

TEST(DeviationMatrix, RejectsMismatches) {
    const auto rows = sample_transform(16, 4, 1).rows();
    EXPECT_THROW(deviation_matrix(rows, std::vector<double>(8, 1.0), 4), std::invalid_argument);
    EXPECT_THROW(deviation_matrix(rows, std::vector<double>(16, 1.0), 5), std::invalid_argument);
}

TEST(Rip, FullSelectionIsExact) {
    for (std::size_t r = 1; r <= 4; ++r) {
        const auto rep = rip_constant_bruteforce(RowIndexSet::full(16), 16, r, 5000);
        EXPECT_LE(rep.delta_hat, 1e-12);
    }
}

TEST(Rip, AllOnesRow) {
    const auto rep = rip_constant_bruteforce(RowIndexSet({0}, 4), 1, 2, 1000);
    EXPECT_NEAR(rep.delta_hat, 1.0, 1e-12);
    EXPECT_TRUE(rep.exhaustive);
    EXPECT_EQ(rep.supports_checked, 6u);
}

TEST(Rip, ExhaustiveMatchesOracle) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rows = sample_transform(16, 8, seed).rows();
        const auto rep = rip_constant_bruteforce(rows, 8, 2, 1000);
        EXPECT_TRUE(rep.exhaustive);
        EXPECT_EQ(rep.supports_checked, 120u);
        EXPECT_NEAR(rep.delta_hat, T::oracle_rip(gram_of(rows), 2), 1e-6);
        EXPECT_NEAR(rip_support_deviation(RowGram(rows, 8), rep.witness_support), rep.delta_hat, 1e-9);
    }
}

TEST(Rip, NestedSupportsAreMonotone) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rows = sample_transform(16, 8, 100 + seed).rows();
        double previous = 0.0;
        for (std::size_t r = 1; r <= 4; ++r) {
            const auto rep = rip_constant_bruteforce(rows, 8, r, 100000);
            ASSERT_TRUE(rep.exhaustive);
            EXPECT_GE(rep.delta_hat, previous - 1e-12) << "r=" << r;
            previous = rep.delta_hat;
        }
    }
}

TEST(Rip, SampledModeIsFlaggedAndDeterministic) {
    const auto rows = sample_transform(64, 16, 9).rows();
    const auto a = rip_constant_bruteforce(rows, 16, 3, 500, 7);
    const auto b = rip_constant_bruteforce(rows, 16, 3, 500, 7);
    EXPECT_FALSE(a.exhaustive);
    EXPECT_EQ(a.supports_checked, 500u);
    EXPECT_EQ(a.delta_hat, b.delta_hat);
    EXPECT_EQ(a.witness_support, b.witness_support);
    EXPECT_LE(a.delta_hat, T::oracle_rip(gram_of(rows), 3) + 1e-9);
}

TEST(Rip, RejectsBadArguments) {
    const auto rows = sample_transform(16, 4, 0).rows();
    EXPECT_THROW(rip_constant_bruteforce(rows, 4, 0, 10), std::invalid_argument);
    EXPECT_THROW(rip_constant_bruteforce(rows, 4, 17, 10), std::invalid_argument);
    EXPECT_THROW(rip_constant_bruteforce(rows, 4, 2, 0), std::invalid_argument);
}

TEST(EAlpha, FullSelectionGivesZero) {
    for (double alpha : {0.25, 0.5, 1.0}) {
        const auto est = estimate_e_alpha(RowIndexSet::full(16), 16, alpha, 16, 8, 1);
        EXPECT_LE(est.lower_bound, 1e-15);
    }
}

TEST(EAlpha, BasisVectorsContributeNothing) {
    const auto rows = sample_transform(32, 4, 5).rows();
    const RowGram gram(rows, 4);
    for (std::size_t i = 0; i < 32; ++i) {
        std::vector<double> e(32, 0.0);
        e[i] = 1.0;
        EXPECT_EQ(e_alpha_objective(gram, e), 0.0);
    }
}

TEST(EAlpha, ObjectiveMatchesDenseOracle) {
    std::mt19937_64 rng(6);
    const auto rows = sample_transform(32, 8, 12).rows();
    const RowGram gram(rows, 8);
    const auto g = gram_of(rows);
    for (int trial = 0; trial < 20; ++trial) {
        auto y = T::random_unit_vector(rng, 32);
        if (trial % 2) for (std::size_t i = 0; i < 32; i += 3) y[i] = 0.0;
        EXPECT_NEAR(e_alpha_objective(gram, y), T::oracle_spectral_norm(T::oracle_deviation(g, y)), 1e-6);
    }
}

TEST(EAlpha, ReachesExhaustiveFlatFamily) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rows = sample_transform(16, 4, seed).rows();
        const double exhaustive = T::oracle_flat_family_max(gram_of(rows), 4, 0.5);
        const auto est = estimate_e_alpha(rows, 4, 0.5, 64, 32, seed);
        EXPECT_GE(est.lower_bound, 0.9 * exhaustive) << "seed " << seed;
        EXPECT_EQ(est.flat_support_size, 4u);
    }
}

TEST(EAlpha, WitnessIsFeasibleAndReproducible) {
    const auto rows = sample_transform(128, 16, 3).rows();
    for (double alpha : {0.2, 0.5, 1.0}) {
        const auto est = estimate_e_alpha(rows, 16, alpha, 20, 20, 11);
        EXPECT_TRUE(in_feasible_set(est.witness, alpha));
        EXPECT_NEAR(e_alpha_objective(RowGram(rows, 16), est.witness), est.lower_bound, 1e-9);
        double linf = 0.0;
        for (double v : est.witness) linf = std::max(linf, std::abs(v));
        EXPECT_DOUBLE_EQ(est.witness_linf_sq, linf * linf);
        EXPECT_LE(est.witness_linf_sq, alpha * alpha + 1e-12);
    }
}

TEST(EAlpha, MonotoneInBudgets) {
    const auto rows = sample_transform(64, 8, 21).rows();
    double previous = 0.0;
    for (std::uint64_t samples : {1, 2, 4, 8, 16, 32}) {
        const auto est = estimate_e_alpha(rows, 8, 0.25, samples, 10, 5);
        EXPECT_GE(est.lower_bound, previous);
        previous = est.lower_bound;
    }
    previous = 0.0;
    for (std::uint64_t iters : {0, 1, 5, 10, 40}) {
        const auto est = estimate_e_alpha(rows, 8, 0.25, 8, iters, 5);
        EXPECT_GE(est.lower_bound, previous);
        previous = est.lower_bound;
    }
}

TEST(EAlpha, ThreadCountDoesNotMatter) {
    const auto rows = sample_transform(64, 8, 22).rows();
    const auto a = estimate_e_alpha(rows, 8, 0.3, 12, 6, 9, 1);
    const auto b = estimate_e_alpha(rows, 8, 0.3, 12, 6, 9, 4);
    EXPECT_EQ(a.lower_bound, b.lower_bound);
    EXPECT_EQ(a.witness, b.witness);
}

TEST(EAlpha, RejectsInfeasibleAlpha) {
    const auto rows = sample_transform(16, 4, 0).rows();
    EXPECT_THROW(estimate_e_alpha(rows, 4, 0.0, 4, 4, 0), std::invalid_argument);
    EXPECT_THROW(estimate_e_alpha(rows, 4, 1.5, 4, 4, 0), std::invalid_argument);
    EXPECT_THROW(estimate_e_alpha(rows, 4, 0.5, 0, 4, 0), std::invalid_argument);
}

TEST(Distortion, IdenticalVectors) {
    std::mt19937_64 rng(1);
    const auto y = T::random_vector(rng, 64);
    const std::vector<RealVector> ys(5, y);
    const auto d = distortion_stats(sample_transform(64, 16, 3), ys, 0.5);
    EXPECT_EQ(d.min, d.max);
    EXPECT_DOUBLE_EQ(d.mean, d.min);
}

TEST(Distortion, FullSelectionIsExact) {
    std::mt19937_64 rng(2);
    std::vector<RealVector> ys;
    for (int i = 0; i < 50; ++i) ys.push_back(T::random_vector(rng, 128));
    const auto t = sample_transform(128, 128, 4, SamplingMode::without_replacement);
    const auto d = distortion_stats(t, ys, 1e-9);
    for (double r : d.ratios) EXPECT_NEAR(r, 1.0, 1e-9);
    EXPECT_EQ(d.success_fraction, 1.0);
}

TEST(Distortion, ZeroVectorsAreSkipped) {
    std::vector<RealVector> ys{RealVector(16, 0.0), RealVector(16, 1.0), RealVector(16, 0.0)};
    const auto d = distortion_stats(sample_transform(16, 4, 0), ys, 0.5);
    EXPECT_EQ(d.skipped, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(d.ratios.size(), 1u);
}

TEST(Distortion, StatisticsAreConsistent) {
    std::mt19937_64 rng(3);
    std::vector<RealVector> ys;
    for (int i = 0; i < 200; ++i) ys.push_back(T::random_unit_vector(rng, 256));
    const auto t = sample_transform(256, 32, 8);
    const auto d = distortion_stats(t, ys, 0.3, 3);
    double sum = 0.0, worst = 0.0;
    std::size_t within = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double r = T::sq_norm(t.apply(ys[i])) / T::sq_norm(ys[i]);
        EXPECT_EQ(d.ratios[i], r);
        sum += r;
        worst = std::max(worst, std::abs(r - 1));
        within += std::abs(r - 1) <= 0.3;
    }
    EXPECT_DOUBLE_EQ(d.mean, sum / 200);
    EXPECT_EQ(d.max_abs_deviation, worst);
    EXPECT_DOUBLE_EQ(d.success_fraction, within / 200.0);
}

TEST(CrossTerm, VanishesWithoutOnePart) {
    std::mt19937_64 rng(4);
    const auto rows = sample_transform(64, 16, 1).rows();
    const auto y = T::random_unit_vector(rng, 64);

    HeavyLightSplit only_heavy = split_heavy_light(y, 64);
    auto s = cross_term_stats(rows, 16, only_heavy, 100, 3);
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.std, 0.0);

    HeavyLightSplit only_light;
    only_light.heavy.assign(64, 0.0);
    only_light.light = y;
    only_light.r = 1;
    s = cross_term_stats(rows, 16, only_light, 100, 3);
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.std, 0.0);
}

TEST(CrossTerm, ZeroMean) {
    std::mt19937_64 rng(5);
    const auto rows = sample_transform(64, 16, 2).rows();
    const auto split = split_heavy_light(T::random_unit_vector(rng, 64), 8);
    const std::uint64_t trials = 20000;
    const auto s = cross_term_stats(rows, 16, split, trials, 17);
    EXPECT_GT(s.std, 0.0);
    EXPECT_LE(std::abs(s.mean), 4.0 * s.std / std::sqrt(static_cast<double>(trials)));
}

TEST(CrossTerm, MatchesDirectFormulaAndIsScheduleIndependent) {
    std::mt19937_64 rng(6);
    const auto rows = sample_transform(32, 8, 3).rows();
    const auto split = split_heavy_light(T::random_unit_vector(rng, 32), 4);
    const auto a = cross_term_stats(rows, 8, split, 50, 99, 1);
    const auto b = cross_term_stats(rows, 8, split, 50, 99, 4);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std, b.std);
    EXPECT_THROW(cross_term_stats(rows, 8, split, 1, 99), std::invalid_argument);
    HeavyLightSplit bad = split;
    bad.light[split.heavy_support[0]] = 1.0;
    EXPECT_THROW(cross_term_stats(rows, 8, bad, 10, 99), std::invalid_argument);
}

TEST(Concentration, ZeroLight) {
    const auto rows = sample_transform(64, 16, 1).rows();
    const auto rep = concentration_check(rows, 16, std::vector<double>(64, 0.0), 200, 1);
    EXPECT_EQ(rep.median, 0.0);
    EXPECT_EQ(rep.rms, 0.0);
    EXPECT_EQ(rep.sigma, 0.0);
    EXPECT_EQ(rep.normalized_gap, 0.0);
}

TEST(Concentration, FullSelectionIsDeterministic) {
    std::mt19937_64 rng(2);
    const auto light = split_heavy_light(T::random_unit_vector(rng, 128), 16).light;
    const auto rep = concentration_check(RowIndexSet::full(128), 128, light, 500, 3);
    EXPECT_NEAR(rep.median, std::sqrt(T::sq_norm(light)), 1e-12);
    EXPECT_NEAR(rep.rms, rep.median, 1e-12);
    EXPECT_LE(rep.normalized_gap, 1e-9);
    EXPECT_EQ(rep.tail_two_sided[0], 0.0);
}

TEST(Concentration, SigmaMatchesOracleAndGapIsSmall) {
    std::mt19937_64 rng(3);
    const auto rows = sample_transform(256, 32, 4).rows();
    const auto light = split_heavy_light(T::random_unit_vector(rng, 256), 32).light;
    const auto rep = concentration_check(rows, 32, light, 10000, 5);

    // sigma^2 = || (1/k) D_l Phi^T Phi D_l ||
    const auto g = gram_of(rows);
    T::Matrix m(256, std::vector<double>(256));
    for (std::size_t i = 0; i < 256; ++i)
        for (std::size_t j = 0; j < 256; ++j) m[i][j] = light[i] * light[j] * g[i][j];
    EXPECT_NEAR(rep.sigma, std::sqrt(T::oracle_spectral_norm(m)), 1e-6);
    EXPECT_LE(rep.normalized_gap, 3.0);
    EXPECT_LE(rep.tail_two_sided[2], 0.05);
    EXPECT_THROW(concentration_check(rows, 32, light, 99, 5), std::invalid_argument);
}
