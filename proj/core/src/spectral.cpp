#include "fjlt/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fjlt/random.hpp"

namespace fjlt {

SpectralNormResult spectral_norm(const Eigen::MatrixXd& m, double tol, std::size_t max_iters,
                                 std::uint64_t start_seed) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectral_norm: matrix is " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", expected square");
    SpectralNormResult result;
    if (m.size() == 0) {
        result.converged = true;
        return result;
    }
    const double scale = m.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw std::invalid_argument("spectral_norm: non-finite entry");
    if (scale == 0.0) {
        result.converged = true;
        return result;
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("spectral_norm: matrix is not symmetric");

    const auto n = m.rows();
    Eigen::VectorXd v(n);
    Rng rng(start_seed);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    v.normalize();

    // Power iteration on M^2 (v <- M^2 v) plus a Rayleigh-Ritz step for M on
    // span{v, Mv}. Iterating on M^2 cannot tell +lambda from -lambda; when the
    // spectrum has a near +/- pair the 2x2 projection separates them, so
    // convergence is governed by the gap to the third eigenvalue instead.
    Eigen::VectorXd w(n);
    Eigen::VectorXd u(n);
    double previous = 0.0;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        w.noalias() = m * v;
        u.noalias() = m * w;
        result.iterations = it;
        const double a = v.dot(w);
        const double b = (w - a * v).norm();
        double estimate = w.norm();  // sqrt(v' M^2 v), v unit
        double residual = b;  // v is an eigenvector when b vanishes
        if (b > 1e-14 * estimate) {
            // q = (w - a v) / b, T = [[a, b], [b, c]] with c = q' M q.
            const double c = (w.dot(u) - 2.0 * a * w.squaredNorm() + a * a * a) / (b * b);
            const double mid = 0.5 * (a + c);
            const double rad = std::hypot(0.5 * (a - c), b);
            const double theta = std::abs(mid + rad) >= std::abs(mid - rad) ? mid + rad : mid - rad;
            // Ritz vector x = cs v + sn q, residual ||M x - theta x||.
            const double len = std::hypot(b, theta - a);
            const double cs = b / len;
            const double sn = (theta - a) / len;
            const Eigen::VectorXd q = (w - a * v) / b;
            const Eigen::VectorXd mq = (u - a * w) / b;
            residual = (cs * w + sn * mq - theta * (cs * v + sn * q)).norm();
            estimate = std::max(estimate, std::abs(theta));
        }
        result.value = std::max(result.value, estimate);
        const double u_norm = u.norm();
        if (u_norm == 0.0 || residual <= tol * estimate) {
            // u = 0: v lies in the kernel of M; with a random start only M = 0 does this.
            result.converged = true;
            return result;
        }
        v = u / u_norm;
        if (it > 1 && std::abs(estimate - previous) <= tol * estimate) {
            result.converged = true;
            return result;
        }
        previous = estimate;
    }
    return result;
}

}  // namespace fjlt
