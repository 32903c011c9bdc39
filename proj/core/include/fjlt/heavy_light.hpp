#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fjlt/hadamard.hpp"

namespace fjlt {

/// y = heavy + light, where heavy keeps the r largest-magnitude coordinates
/// (ties to the lower index) and light keeps the rest. Zeros are never
/// heavy, so heavy_support may be shorter than r.
struct HeavyLightSplit {
    RealVector heavy;
    RealVector light;
    std::vector<std::uint32_t> heavy_support;  // ascending
    std::size_t r = 0;
};

HeavyLightSplit split_heavy_light(std::span<const double> y, std::size_t r);

}  // namespace fjlt
