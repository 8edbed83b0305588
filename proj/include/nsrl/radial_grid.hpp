#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "nsrl/errors.hpp"

namespace nsrl {

/// Strictly increasing radius grid for shell integrals.
struct RadialGrid {
    std::vector<double> rho;

    static RadialGrid logarithmic(double rho_min, double rho_max, int count) {
        if (!(rho_min > 0.0) || !(rho_max > rho_min) || count < 2)
            throw ConfigError("RadialGrid: need 0 < rho_min < rho_max and count >= 2");
        RadialGrid g;
        g.rho.resize(count);
        const double step = std::log(rho_max / rho_min) / (count - 1);
        for (int i = 0; i < count; ++i) g.rho[i] = rho_min * std::exp(step * i);
        g.rho.back() = rho_max;
        return g;
    }

    static RadialGrid linear(double lo, double hi, int count) {
        if (!(lo >= 0.0) || !(hi > lo) || count < 2)
            throw ConfigError("RadialGrid: need 0 <= lo < hi and count >= 2");
        RadialGrid g;
        g.rho.resize(count);
        const double step = (hi - lo) / (count - 1);
        for (int i = 0; i < count; ++i) g.rho[i] = lo + step * i;
        g.rho.back() = hi;
        return g;
    }
};

/// Trapezoid of integral f drho over the given nodes.
inline double trapezoid(std::span<const double> rho, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < rho.size(); ++i)
        s += 0.5 * (f[i] + f[i + 1]) * (rho[i + 1] - rho[i]);
    return s;
}

/// Trapezoid of integral f drho/rho (trapezoid in log rho).
inline double trapezoid_dlog(std::span<const double> rho, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < rho.size(); ++i)
        s += 0.5 * (f[i] + f[i + 1]) * std::log(rho[i + 1] / rho[i]);
    return s;
}

} // namespace nsrl
