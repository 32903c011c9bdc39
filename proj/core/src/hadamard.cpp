#include "fjlt/hadamard.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace fjlt {

namespace {

// Butterflies with half-width below this run block by block so the early
// stages stay in cache (2^11 doubles = 16 KiB).
constexpr std::size_t kBlock = std::size_t{1} << 12;
// Columns per tile for the stages above kBlock, and the row count from
// which tiles are staged through a contiguous buffer.
constexpr std::size_t kTile = 32;
constexpr std::size_t kStagedRows = 2;

inline void butterfly_pair(double* __restrict lo, double* __restrict hi, std::size_t len) {
    for (std::size_t j = 0; j < len; ++j) {
        const double a = lo[j];
        const double b = hi[j];
        lo[j] = a + b;
        hi[j] = a - b;
    }
}

// Two consecutive stages (half h on (p0,p1) and (p2,p3), then 2h on (p0,p2)
// and (p1,p3)) in one pass. Same additions as running them separately.
inline void butterfly_quad(double* __restrict p0, double* __restrict p1, double* __restrict p2,
                           double* __restrict p3, std::size_t len) {
    for (std::size_t j = 0; j < len; ++j) {
        const double s0 = p0[j] + p1[j];
        const double d0 = p0[j] - p1[j];
        const double s1 = p2[j] + p3[j];
        const double d1 = p2[j] - p3[j];
        p0[j] = s0 + s1;
        p1[j] = d0 + d1;
        p2[j] = s0 - s1;
        p3[j] = d0 - d1;
    }
}

// Stages with half-width h_begin, 2 h_begin, ... below len on a contiguous
// array, two at a time where possible.
void run_stages(double* x, std::size_t len, std::size_t h_begin) {
    std::size_t h = h_begin;
    for (; 4 * h <= len; h *= 4)
        for (std::size_t i = 0; i < len; i += 4 * h)
            butterfly_quad(x + i, x + i + h, x + i + 2 * h, x + i + 3 * h, h);
    if (2 * h <= len)
        for (std::size_t i = 0; i < len; i += 2 * h) butterfly_pair(x + i, x + i + h, h);
}

}  // namespace

unsigned log2_exact(std::size_t n) {
    require_power_of_two(n, "log2_exact");
    return static_cast<unsigned>(std::countr_zero(n));
}

std::size_t next_power_of_two(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_power_of_two: n must be >= 1");
    return std::bit_ceil(n);
}

void require_power_of_two(std::size_t n, const char* what) {
    if (!is_power_of_two(n))
        throw std::invalid_argument(std::string(what) + ": length " + std::to_string(n) +
                                    " is not a power of two");
}

RowIndexSet::RowIndexSet(std::vector<std::uint32_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
    require_power_of_two(n_, "RowIndexSet");
    if (indices_.empty()) throw std::invalid_argument("RowIndexSet: k must be >= 1");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] >= n_)
            throw std::invalid_argument("RowIndexSet: index " + std::to_string(indices_[i]) +
                                        " at position " + std::to_string(i) +
                                        " out of range for n=" + std::to_string(n_));
    }
}

RowIndexSet RowIndexSet::full(std::size_t n) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    return RowIndexSet(std::move(idx), n);
}

std::vector<double> RowIndexSet::histogram() const {
    std::vector<double> h(n_, 0.0);
    for (auto i : indices_) h[i] += 1.0;
    return h;
}

int hadamard_entry(std::size_t row, std::size_t col, std::size_t n) {
    require_power_of_two(n, "hadamard_entry");
    if (row >= n || col >= n)
        throw std::invalid_argument("hadamard_entry: index (" + std::to_string(row) + ", " +
                                    std::to_string(col) + ") out of range for n=" +
                                    std::to_string(n));
    return hadamard_sign(row, col);
}

void fwht_in_place(std::span<double> x) {
    const std::size_t n = x.size();
    require_power_of_two(n, "fwht_in_place");
    double* data = x.data();

    const std::size_t block = std::min(n, kBlock);
    for (std::size_t base = 0; base < n; base += block) {
        double* b = data + base;
        if (block < 4) {
            run_stages(b, block, 1);
            continue;
        }
        // Stages 1 and 2 by hand; the generic inner loops would be too short.
        for (std::size_t i = 0; i < block; i += 4) {
            const double s0 = b[i] + b[i + 1];
            const double d0 = b[i] - b[i + 1];
            const double s1 = b[i + 2] + b[i + 3];
            const double d1 = b[i + 2] - b[i + 3];
            b[i] = s0 + s1;
            b[i + 1] = d0 + d1;
            b[i + 2] = s0 - s1;
            b[i + 3] = d0 - d1;
        }
        run_stages(b, block, 4);
    }

    // The remaining stages act down the columns of the (n / block) x block
    // matrix, run one narrow column tile at a time. With many rows the
    // power-of-two row stride maps a tile onto a few cache sets, so the tile
    // is staged through a contiguous buffer. Every element still sees the
    // same butterflies in the same order.
    const std::size_t rows = n / block;
    if (rows == 1) return;
    if (rows < kStagedRows) {
        for (std::size_t col = 0; col < block; col += kTile) {
            const auto row = [&](std::size_t r) { return data + r * block + col; };
            std::size_t h = 1;
            for (; 4 * h <= rows; h *= 4)
                for (std::size_t r = 0; r < rows; r += 4 * h)
                    for (std::size_t q = r; q < r + h; ++q)
                        butterfly_quad(row(q), row(q + h), row(q + 2 * h), row(q + 3 * h), kTile);
            if (2 * h <= rows)
                for (std::size_t r = 0; r < rows; r += 2 * h)
                    for (std::size_t q = r; q < r + h; ++q) butterfly_pair(row(q), row(q + h), kTile);
        }
        return;
    }
    thread_local std::vector<double> tile;
    tile.resize(rows * kTile);
    for (std::size_t col = 0; col < block; col += kTile) {
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(data + r * block + col, kTile, tile.data() + r * kTile);
        run_stages(tile.data(), rows * kTile, kTile);
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(tile.data() + r * kTile, kTile, data + r * block + col);
    }
}

RealVector naive_hadamard_apply(std::span<const double> x) {
    const std::size_t n = x.size();
    require_power_of_two(n, "naive_hadamard_apply");
    RealVector out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += hadamard_sign(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

RealVector subsampled_apply(std::span<const double> x, const RowIndexSet& rows) {
    if (x.size() != rows.n())
        throw std::invalid_argument("subsampled_apply: vector length " + std::to_string(x.size()) +
                                    " != row set dimension " + std::to_string(rows.n()));
    RealVector work(x.begin(), x.end());
    fwht_in_place(work);
    RealVector out(rows.k());
    for (std::size_t s = 0; s < rows.k(); ++s) out[s] = work[rows[s]];
    return out;
}

}  // namespace fjlt
