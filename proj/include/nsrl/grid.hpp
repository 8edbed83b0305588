#pragma once

#include <cmath>
#include <cstddef>

#include "nsrl/errors.hpp"

namespace nsrl {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Periodic N^3 grid on the torus [0, domain_length)^3 with viscosity nu.
struct GridSpec {
    int n = 32;                     ///< points per dimension (>= 8, even; powers of two recommended)
    double domain_length = two_pi;  ///< side of the period cell
    double nu = 1.0;                ///< kinematic viscosity

    void validate() const {
        if (n < 8 || n % 2 != 0) throw ConfigError("GridSpec: n must be >= 8 and even");
        if (!(domain_length > 0.0)) throw ConfigError("GridSpec: domain_length must be positive");
        if (!(nu > 0.0)) throw ConfigError("GridSpec: nu must be positive");
    }

    double spacing() const { return domain_length / n; }
    double cell_volume() const { double h = spacing(); return h * h * h; }
    double volume() const { return domain_length * domain_length * domain_length; }

    std::size_t point_count() const {
        return static_cast<std::size_t>(n) * n * n;
    }
    /// Complex coefficients stored per component (x axis halved, Hermitian).
    std::size_t spectral_count() const {
        return static_cast<std::size_t>(n) * n * (n / 2 + 1);
    }

    /// Physical layout: x fastest, then y, then z.
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * n + iy) * n + ix;
    }
    /// Spectral layout: kx (halved axis, 0..n/2) fastest, then ky, kz in FFT order.
    std::size_t spectral_index(int kx, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * n + iy) * (n / 2 + 1) + kx;
    }

    /// FFT storage index -> signed integer wavenumber.
    int wavenumber(int idx) const { return idx <= n / 2 ? idx : idx - n; }
    /// Physical wavenumber (2*pi/L scaling; equal to the integer on the default box).
    double wavenumber_scale() const { return two_pi / domain_length; }

    bool operator==(const GridSpec&) const = default;
};

} // namespace nsrl
