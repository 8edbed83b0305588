#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsrl/field.hpp"

namespace nsrl {

/// u = (sin x1 cos x2, -cos x1 sin x2, 0): stationary-shape decaying solution
/// used as the exact-solution benchmark.
Field generate_taylor_green_2d(const GridSpec& grid);

/// Random divergence-free field with shell energy E(k) proportional to
/// k^slope on integer shells k in [k_min, k_max], normalized to the requested
/// rms velocity. Deterministic for a given seed.
Field generate_random_divfree(const GridSpec& grid, double slope, int k_min, int k_max,
                              double u_rms, std::uint64_t seed);

/// amplitude * e_hat * cos(k.x) with e_hat perpendicular to k.
Field generate_single_mode(const GridSpec& grid, const std::array<int, 3>& k, double amplitude);

/// Slowly decaying radial profile amplitude*(1+|x-c|/length_scale)^-beta along a fixed
/// direction, Leray-projected.
Field generate_selfsimilar_profile(const GridSpec& grid, double amplitude, double length_scale,
                                   double beta);

/// Dispatch by kind name ("taylor_green_2d", "random_divfree", "single_mode",
/// "selfsimilar_profile"); throws ConfigError for unknown kinds.
Field generate(const std::string& kind, const GridSpec& grid,
               const std::map<std::string, double>& params, std::uint64_t seed);

/// Shell-binned kinetic energy E[m] = sum over round(|k|)=m of 1/2 |u(k)|^2 L^3.
std::vector<double> spectrum_shells(const Field& f);

} // namespace nsrl
