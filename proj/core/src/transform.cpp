#include "fjlt/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "byte_io.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/parallel.hpp"
#include "fjlt/random.hpp"

namespace fjlt {

namespace {

// ceil() that ignores representation noise: 1e-4 * 1.6e6 must give 160,
// not 161.
double tolerant_ceil(double x) {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return nearest;
    return std::ceil(x);
}

std::size_t clamp_count(double value, std::size_t n, bool& clamped) {
    const double rounded = tolerant_ceil(value);
    clamped = rounded > static_cast<double>(n);
    if (clamped) return n;
    return std::max<std::size_t>(1, static_cast<std::size_t>(rounded));
}

}  // namespace

void TransformParams::validate() const {
    require_power_of_two(n, "TransformParams.n");
    if (!(points >= 2.0) || !std::isfinite(points))
        throw std::invalid_argument("TransformParams: point count N must be >= 2");
    if (!(delta > 0.0 && delta <= 0.5))
        throw std::invalid_argument("TransformParams: delta must lie in (0, 1/2], got " +
                                    std::to_string(delta));
    if (!(c_k > 0.0) || !std::isfinite(c_k) || !(c_r > 0.0) || !std::isfinite(c_r))
        throw std::invalid_argument("TransformParams: leading constants must be positive");
}

TargetDimension target_dimension(const TransformParams& params) {
    params.validate();
    const double log_n = static_cast<double>(log2_exact(params.n));
    const double d2 = params.delta * params.delta;
    TargetDimension out;
    out.unclamped = params.c_k / (d2 * d2) * std::log2(params.points) * std::pow(log_n, 4);
    out.k = clamp_count(out.unclamped, params.n, out.clamped);
    return out;
}

SparsityLevel sparsity_level(const TransformParams& params) {
    params.validate();
    SparsityLevel out;
    out.unclamped = params.c_r / (params.delta * params.delta) * std::log2(params.points);
    out.r = clamp_count(out.unclamped, params.n, out.clamped);
    out.alpha = 1.0 / std::sqrt(static_cast<double>(out.r));
    return out;
}

const char* to_string(SamplingMode mode) {
    return mode == SamplingMode::with_replacement ? "with-replacement" : "without-replacement";
}

SamplingMode parse_sampling_mode(const std::string& text) {
    if (text == "with-replacement" || text == "with") return SamplingMode::with_replacement;
    if (text == "without-replacement" || text == "without")
        return SamplingMode::without_replacement;
    throw std::invalid_argument("unknown sampling mode '" + text + "'");
}

FastJLTransform::FastJLTransform(RowIndexSet rows, std::vector<std::int8_t> signs,
                                 std::uint64_t seed, SamplingMode mode)
    : rows_(std::move(rows)),
      signs_(std::move(signs)),
      seed_(seed),
      mode_(mode),
      scale_(1.0 / std::sqrt(static_cast<double>(rows_.k()))) {
    if (signs_.size() != rows_.n())
        throw std::invalid_argument("FastJLTransform: sign pattern length " +
                                    std::to_string(signs_.size()) + " != n=" +
                                    std::to_string(rows_.n()));
    if (rows_.k() > rows_.n())
        throw std::invalid_argument("FastJLTransform: k=" + std::to_string(rows_.k()) +
                                    " exceeds n=" + std::to_string(rows_.n()));
    for (auto s : signs_)
        if (s != 1 && s != -1) throw std::invalid_argument("FastJLTransform: signs must be +-1");
}

FastJLTransform FastJLTransform::from_parts(RowIndexSet rows, std::vector<std::int8_t> signs,
                                            std::uint64_t seed, SamplingMode mode) {
    return FastJLTransform(std::move(rows), std::move(signs), seed, mode);
}

FastJLTransform sample_transform(std::size_t n, std::size_t k, std::uint64_t seed,
                                 SamplingMode mode) {
    require_power_of_two(n, "sample_transform");
    if (n > (std::size_t{1} << 31))
        throw std::invalid_argument("sample_transform: n above 2^31 is not supported");
    if (k < 1 || k > n)
        throw std::invalid_argument("sample_transform: k=" + std::to_string(k) +
                                    " must lie in [1, n=" + std::to_string(n) + "]");

    Rng row_rng(derive_seed(seed, 0));
    std::vector<std::uint32_t> rows(k);
    if (mode == SamplingMode::with_replacement) {
        for (auto& r : rows) r = static_cast<std::uint32_t>(row_rng.below_pow2(n));
    } else {
        std::vector<std::uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t pick = j + row_rng.below(n - j);
            std::swap(perm[j], perm[pick]);
            rows[j] = perm[j];
        }
    }

    Rng sign_rng(derive_seed(seed, 1));
    std::vector<std::int8_t> signs(n);
    sign_rng.fill_signs(std::span<std::int8_t>(signs));
    return FastJLTransform::from_parts(RowIndexSet(std::move(rows), n), std::move(signs), seed,
                                       mode);
}

RealVector FastJLTransform::apply(std::span<const double> y) const {
    if (y.size() != n())
        throw std::invalid_argument("apply: vector length " + std::to_string(y.size()) +
                                    " != transform dimension " + std::to_string(n()));
    RealVector work(n());
    for (std::size_t j = 0; j < work.size(); ++j) {
        if (!std::isfinite(y[j]))
            throw std::invalid_argument("apply: non-finite entry at index " + std::to_string(j));
        work[j] = signs_[j] * y[j];
    }
    fwht_in_place(work);
    RealVector out(k());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = scale_ * work[rows_[s]];
    return out;
}

std::vector<RealVector> FastJLTransform::apply_batch(std::span<const RealVector> ys,
                                                     unsigned threads) const {
    for (std::size_t i = 0; i < ys.size(); ++i)
        if (ys[i].size() != n())
            throw std::invalid_argument("apply_batch: vector " + std::to_string(i) +
                                        " has length " + std::to_string(ys[i].size()) +
                                        ", expected " + std::to_string(n()));
    std::vector<RealVector> out(ys.size());
    parallel_for(ys.size(), threads, [&](std::size_t i) { out[i] = apply(ys[i]); });
    return out;
}

Eigen::MatrixXd FastJLTransform::dense_matrix(std::size_t max_n) const {
    if (n() > max_n)
        throw ResourceError("dense_matrix: n=" + std::to_string(n()) + " exceeds cap " +
                            std::to_string(max_n));
    Eigen::MatrixXd m(k(), n());
    for (std::size_t i = 0; i < k(); ++i)
        for (std::size_t j = 0; j < n(); ++j)
            m(i, j) = scale_ * hadamard_sign(rows_[i], j) * signs_[j];
    return m;
}

void write_transform(std::ostream& out, const FastJLTransform& t) {
    out.write("FJLT", 4);
    detail::write_le<std::uint16_t>(out, kTransformFormatVersion);
    detail::write_le<std::uint8_t>(out, kGeneratorId);
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.mode()));
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.n()));
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.k()));
    detail::write_le<std::uint64_t>(out, t.seed());
    if (!out) throw std::runtime_error("write_transform: stream error");
}

FastJLTransform read_transform(std::istream& in) {
    detail::expect_magic(in, "FJLT");
    const auto version = detail::read_le<std::uint16_t>(in, "version");
    if (version != kTransformFormatVersion)
        throw FormatError("unsupported transform version " + std::to_string(version));
    const auto generator = detail::read_le<std::uint8_t>(in, "generator id");
    if (generator != kGeneratorId)
        throw FormatError("transform was written with generator id " +
                          std::to_string(generator) + ", this build uses " +
                          std::to_string(kGeneratorId));
    const auto mode = detail::read_le<std::uint8_t>(in, "sampling mode");
    if (mode > 1) throw FormatError("unknown sampling mode " + std::to_string(mode));
    const auto n = detail::read_le<std::uint32_t>(in, "n");
    const auto k = detail::read_le<std::uint32_t>(in, "k");
    const auto seed = detail::read_le<std::uint64_t>(in, "seed");
    try {
        return sample_transform(n, k, seed, static_cast<SamplingMode>(mode));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid transform header: ") + e.what());
    }
}

}  // namespace fjlt
