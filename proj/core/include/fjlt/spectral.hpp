#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace fjlt {

struct SpectralNormResult {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Largest absolute eigenvalue of a symmetric matrix.
///
/// Power iteration on M^2 (M applied twice per step) from a seeded random
/// start; the estimate is sqrt of the Rayleigh quotient of M^2, which is
/// insensitive to the sign pattern of the spectrum. The returned value never
/// exceeds the true norm beyond rounding. Stops when the relative change of
/// the estimate, or the eigen-residual ||M^2 v - rho v|| / rho, drops to
/// `tol`; otherwise converged=false after max_iters.
///
/// Throws std::invalid_argument if m is not square or not symmetric within
/// 1e-9 (relative to its largest entry).
SpectralNormResult spectral_norm(const Eigen::MatrixXd& m, double tol = 1e-12,
                                 std::size_t max_iters = 10000,
                                 std::uint64_t start_seed = 0x5eedULL);

}  // namespace fjlt
