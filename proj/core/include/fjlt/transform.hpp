#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fjlt/hadamard.hpp"

namespace fjlt {

/// Problem parameters used to size a transform. Logarithms are base 2 and
/// the leading constants are explicit knobs.
struct TransformParams {
    std::size_t n = 0;      // ambient dimension, power of two
    double points = 2.0;    // cardinality N of the point set (may exceed 2^64)
    double delta = 0.5;     // distortion, (0, 1/2]
    double c_k = 1.0;
    double c_r = 1.0;

    /// Throws std::invalid_argument when any field is out of its domain.
    void validate() const;
};

struct TargetDimension {
    std::size_t k = 1;
    double unclamped = 0.0;  // c_k * delta^-4 * log2 N * (log2 n)^4 before ceil
    bool clamped = false;    // formula exceeded n
};

struct SparsityLevel {
    std::size_t r = 1;
    double alpha = 1.0;      // 1 / sqrt(r)
    double unclamped = 0.0;
    bool clamped = false;
};

/// k = clamp(ceil(c_k delta^-4 log2(N) log2(n)^4), 1, n).
TargetDimension target_dimension(const TransformParams& params);

/// r = clamp(ceil(c_r delta^-2 log2(N)), 1, n), alpha = 1/sqrt(r).
SparsityLevel sparsity_level(const TransformParams& params);

enum class SamplingMode : std::uint8_t {
    with_replacement = 0,
    without_replacement = 1,
};

const char* to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(const std::string& text);

/// y -> (1/sqrt(k)) * Phi * D_b * y where Phi holds k rows of the
/// unnormalized Hadamard matrix and b is a Rademacher vector.
///
/// Immutable after construction and fully determined by (n, k, seed, mode).
/// Rows come from stream derive_seed(seed, 0), signs from derive_seed(seed, 1).
class FastJLTransform {
public:
    std::size_t n() const noexcept { return rows_.n(); }
    std::size_t k() const noexcept { return rows_.k(); }
    std::uint64_t seed() const noexcept { return seed_; }
    SamplingMode mode() const noexcept { return mode_; }
    const RowIndexSet& rows() const noexcept { return rows_; }
    std::span<const std::int8_t> signs() const noexcept { return signs_; }
    double scale() const noexcept { return scale_; }

    /// Sign flip, fast transform, gather, scale. O(n log n) for any k.
    RealVector apply(std::span<const double> y) const;

    /// Positional batch apply. Errors name the offending vector index.
    std::vector<RealVector> apply_batch(std::span<const RealVector> ys,
                                        unsigned threads = 1) const;

    /// Materializes (1/sqrt(k)) * Phi * D_b. Throws ResourceError if
    /// n > max_n.
    Eigen::MatrixXd dense_matrix(std::size_t max_n = 4096) const;

    /// Assembles a transform from explicit parts (used by tests and
    /// experiments that need a hand-picked row set).
    static FastJLTransform from_parts(RowIndexSet rows, std::vector<std::int8_t> signs,
                                      std::uint64_t seed = 0,
                                      SamplingMode mode = SamplingMode::with_replacement);

    friend bool operator==(const FastJLTransform& a, const FastJLTransform& b) {
        return a.rows_ == b.rows_ && a.signs_ == b.signs_ && a.seed_ == b.seed_ &&
               a.mode_ == b.mode_;
    }

private:
    FastJLTransform(RowIndexSet rows, std::vector<std::int8_t> signs, std::uint64_t seed,
                    SamplingMode mode);

    RowIndexSet rows_;
    std::vector<std::int8_t> signs_;
    std::uint64_t seed_;
    SamplingMode mode_;
    double scale_;
};

FastJLTransform sample_transform(std::size_t n, std::size_t k, std::uint64_t seed,
                                 SamplingMode mode = SamplingMode::with_replacement);

/// Convenience free functions mirroring the member API.
inline RealVector apply(const FastJLTransform& t, std::span<const double> y) {
    return t.apply(y);
}

// Serialized transform header, little endian, 24 bytes:
//   magic "FJLT" | version u16 | generator u8 | mode u8 | n u32 | k u32 | seed u64
// Only the seed is stored; loading re-samples the transform.
inline constexpr std::uint16_t kTransformFormatVersion = 1;

void write_transform(std::ostream& out, const FastJLTransform& t);
FastJLTransform read_transform(std::istream& in);

}  // namespace fjlt
