#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fjlt {

using RealVector = std::vector<double>;

inline constexpr bool is_power_of_two(std::size_t n) noexcept {
    return n != 0 && (n & (n - 1)) == 0;
}

/// log2 of a power of two.
unsigned log2_exact(std::size_t n);

/// Smallest power of two >= n (n >= 1).
std::size_t next_power_of_two(std::size_t n);

/// Throws std::invalid_argument unless n is a power of two.
void require_power_of_two(std::size_t n, const char* what);

/// A multiset of row indices into the n x n Hadamard matrix. Duplicates are
/// allowed so with-replacement sampling is representable.
class RowIndexSet {
public:
    RowIndexSet(std::vector<std::uint32_t> indices, std::size_t n);

    /// All rows 0..n-1 in order.
    static RowIndexSet full(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return indices_.size(); }
    std::span<const std::uint32_t> indices() const noexcept { return indices_; }
    std::uint32_t operator[](std::size_t i) const { return indices_[i]; }

    /// Row multiplicities, length n.
    std::vector<double> histogram() const;

    friend bool operator==(const RowIndexSet&, const RowIndexSet&) = default;

private:
    std::vector<std::uint32_t> indices_;
    std::size_t n_;
};

/// (-1)^{popcount(row & col)}: the unnormalized Walsh-Hadamard matrix in
/// natural ordering.
int hadamard_entry(std::size_t row, std::size_t col, std::size_t n);

/// Unchecked entry evaluation for inner loops.
inline int hadamard_sign(std::uint64_t row, std::uint64_t col) noexcept {
    return (__builtin_popcountll(row & col) & 1) ? -1 : 1;
}

/// x <- H x, unnormalized, radix-2 butterflies (n log2 n add/sub pairs).
void fwht_in_place(std::span<double> x);

/// Direct O(n^2) evaluation of H x. Test oracle.
RealVector naive_hadamard_apply(std::span<const double> x);

/// Gathers (H x) at rows.indices() using one fast transform.
RealVector subsampled_apply(std::span<const double> x, const RowIndexSet& rows);

}  // namespace fjlt
