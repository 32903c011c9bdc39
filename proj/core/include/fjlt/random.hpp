#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fjlt {

/// Identifier written into serialized transforms and reports. Bump it if the
/// generator or any of the derivations below change.
inline constexpr std::uint8_t kGeneratorId = 1;

/// SplitMix64 finalizer. Used to derive independent sub-seeds from a parent
/// seed and a stream index so Monte-Carlo trials are schedule independent.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Portable random stream.
///
/// The raw bit source is std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. The std:: distributions are implementation defined, so
/// every derived variate (bounded integers, uniforms, signs, normals) is
/// computed here from raw 64-bit words with a documented recipe:
///
///  - below(m): Lemire multiply-shift with rejection (exactly uniform).
///  - below_pow2(2^b): top b bits of one word.
///  - uniform01(): (word >> 11) * 2^-53, in [0, 1).
///  - signs: bit i of word floor(i / 64), 1 -> -1.
///  - normal(): Box-Muller on (0,1] uniforms, both outputs used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t bound);
    std::uint64_t below_pow2(std::uint64_t bound);
    double uniform01();
    double normal();

    /// Fills `out` with independent uniform {-1,+1} values.
    template <typename T>
    void fill_signs(std::span<T> out) {
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i % 64 == 0) word = next();
            out[i] = (word >> (i % 64)) & 1u ? T(-1) : T(1);
        }
    }

    void fill_normal(std::span<double> out);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fjlt
