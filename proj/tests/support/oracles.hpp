#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the fast transform, RowGram or the power iteration.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fjlt::testing {

using Matrix = std::vector<std::vector<double>>;

// (-1)^{<row,col>} over GF(2), from the bit expansion.
inline int oracle_hadamard(std::size_t row, std::size_t col) {
    int parity = 0;
    for (std::size_t bit = 0; (std::size_t{1} << bit) <= std::max(row, col); ++bit)
        parity ^= static_cast<int>(((row >> bit) & 1u) & ((col >> bit) & 1u));
    return parity ? -1 : 1;
}

inline std::vector<double> oracle_matvec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) out[i] += m[i][j] * x[j];
    return out;
}

// Unscaled k x n row-subsampled Hadamard matrix.
inline Matrix oracle_phi(const std::vector<std::uint32_t>& rows, std::size_t n) {
    Matrix phi(rows.size(), std::vector<double>(n));
    for (std::size_t s = 0; s < rows.size(); ++s)
        for (std::size_t j = 0; j < n; ++j) phi[s][j] = oracle_hadamard(rows[s], j);
    return phi;
}

// (1/k) Phi^T Phi.
inline Matrix oracle_gram(const Matrix& phi) {
    const std::size_t k = phi.size();
    const std::size_t n = phi[0].size();
    Matrix g(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t s = 0; s < k; ++s) acc += phi[s][i] * phi[s][j];
            g[i][j] = acc / static_cast<double>(k);
        }
    return g;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    return eig;
}

inline double oracle_spectral_norm(const Matrix& a) {
    if (a.empty()) return 0.0;
    double best = 0.0;
    for (double e : jacobi_eigenvalues(a)) best = std::max(best, std::abs(e));
    return best;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n) {
    auto v = random_vector(rng, n);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    for (auto& x : v) x /= std::sqrt(sq);
    return v;
}

inline double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0;
    for (double x : b) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    return worst;
}

// Dense deviation matrix D_y^2 - D_y G D_y with G = (1/k) Phi^T Phi.
inline Matrix oracle_deviation(const Matrix& gram, const std::vector<double>& y) {
    const std::size_t n = y.size();
    Matrix d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d[i][j] = y[i] * y[j] * ((i == j ? 1.0 : 0.0) - gram[i][j]);
    return d;
}

// Max deviation norm over all flat vectors with `size` coordinates equal to
// +-magnitude, enumerating every support and every sign pattern.
inline double oracle_flat_family_max(const Matrix& gram, std::size_t size, double magnitude) {
    const std::size_t n = gram.size();
    std::vector<std::size_t> support(size);
    for (std::size_t i = 0; i < size; ++i) support[i] = i;
    double best = 0.0;
    while (true) {
        for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << size); ++signs) {
            Matrix sub(size, std::vector<double>(size));
            for (std::size_t a = 0; a < size; ++a)
                for (std::size_t b = 0; b < size; ++b) {
                    const double ya = ((signs >> a) & 1u) ? -magnitude : magnitude;
                    const double yb = ((signs >> b) & 1u) ? -magnitude : magnitude;
                    sub[a][b] = ya * yb * ((a == b ? 1.0 : 0.0) - gram[support[a]][support[b]]);
                }
            best = std::max(best, oracle_spectral_norm(sub));
        }
        std::size_t i = size;
        while (i > 0 && support[i - 1] == n - size + i - 1) --i;
        if (i == 0) break;
        ++support[i - 1];
        for (std::size_t j = i; j < size; ++j) support[j] = support[j - 1] + 1;
    }
    return best;
}

// Max spectral norm of principal r x r submatrices of (G - I).
inline double oracle_rip(const Matrix& gram, std::size_t r) {
    const std::size_t n = gram.size();
    std::vector<std::size_t> support(r);
    for (std::size_t i = 0; i < r; ++i) support[i] = i;
    double best = 0.0;
    while (true) {
        Matrix sub(r, std::vector<double>(r));
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
                sub[a][b] = gram[support[a]][support[b]] - (a == b ? 1.0 : 0.0);
        best = std::max(best, oracle_spectral_norm(sub));
        std::size_t i = r;
        while (i > 0 && support[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++support[i - 1];
        for (std::size_t j = i; j < r; ++j) support[j] = support[j - 1] + 1;
    }
    return best;
}

}  // namespace fjlt::testing
