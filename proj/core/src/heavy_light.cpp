#include "fjlt/heavy_light.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fjlt {

HeavyLightSplit split_heavy_light(std::span<const double> y, std::size_t r) {
    const std::size_t n = y.size();
    if (r < 1 || r > n)
        throw std::invalid_argument("split_heavy_light: r=" + std::to_string(r) +
                                    " must lie in [1, " + std::to_string(n) + "]");

    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(y[i]))
            throw std::invalid_argument("split_heavy_light: non-finite entry at index " +
                                        std::to_string(i));

    // Total order: larger magnitude first, lower index first among equals.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        const double ma = std::abs(y[a]);
        const double mb = std::abs(y[b]);
        return ma > mb || (ma == mb && a < b);
    };
    if (r < n) std::nth_element(order.begin(), order.begin() + r, order.end(), before);

    HeavyLightSplit out;
    out.r = r;
    out.heavy.assign(n, 0.0);
    out.light.assign(y.begin(), y.end());
    for (std::size_t i = 0; i < r; ++i) {
        const auto idx = order[i];
        if (y[idx] == 0.0) continue;
        out.heavy[idx] = y[idx];
        out.light[idx] = 0.0;
        out.heavy_support.push_back(idx);
    }
    std::sort(out.heavy_support.begin(), out.heavy_support.end());
    return out;
}

}  // namespace fjlt
