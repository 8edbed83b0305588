#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsrl/field.hpp"
#include "nsrl/sphere_quadrature.hpp"
#include "nsrl/vec.hpp"

namespace nsrl {

using GridMask = std::vector<std::uint8_t>;  ///< one flag per grid cell

// ---- shell and cumulative structure functions ----

/// s2(x, r): spherical-shell mean of squared velocity increments at a probe
/// (sphere quadrature + trigonometric sampling).
double shell_s2(const Field& u, const Vec3& x, double r, const SphereQuadrature& quad);

/// S2(x, r) = int_0^{2r} s2(x, rho) drho/rho at a probe: log-trapezoid over
/// n_rad shells with the O(rho^2) inner patch.
double cumulative_s2(const Field& u, const Vec3& x, double r, const SphereQuadrature& quad,
                     int n_rad = 48, double rho_min_factor = 1e-3);

/// s2(., rho) on the whole grid at once via the exact spectral spherical-mean
/// multiplier sin(|k| rho)/(|k| rho); equivalent to the quadrature route for
/// band-limited fields, used by the set-restricted monitors.
std::vector<double> shell_s2_field(const Field& u, double rho);

/// S2(., r) on the whole grid (same radial rule as cumulative_s2).
std::vector<double> cumulative_s2_field(const Field& u, double r, int n_rad = 32,
                                        double rho_min_factor = 1e-3);

/// Grid quadrature of S2(x, r)^q over the masked cells.
double s2_lq_on_set(const Field& u, double r, double q, const GridMask& mask, int n_rad = 32);

// ---- longitudinal increment moments and scaling exponents ----

struct MomentRow {
    int p = 0;
    double ell = 0.0;
    double moment = 0.0;             ///< space- and direction-averaged <(delta_par u)^p>
    double four_fifths_ratio = 0.0;  ///< moment / (-(4/5) eps ell), p = 3 rows only
};

struct MomentTable {
    std::vector<MomentRow> rows;
    double dissipation = 0.0;
};

/// Moments over the 26-direction stencil (axes, face and cube diagonals, up
/// to sign) at lattice offsets m*h*direction for each multiple m.
MomentTable longitudinal_moments(const Field& u, const std::vector<int>& multiples,
                                 const std::vector<int>& p_list);

struct ZetaFit {
    int p = 0;
    double zeta = 0.0;
    double r2 = 0.0;
    double ell_min = 0.0, ell_max = 0.0;
    std::size_t count = 0;
    bool ok = false;  ///< false: degenerate moments or too few points
};

/// Log-log slope of |moment| vs ell inside [fit_min, fit_max] (odd p uses
/// absolute values; signs live in the table).
ZetaFit fit_zeta(const MomentTable& table, int p, double fit_min, double fit_max);

// ---- Dini modulus of continuity ----

struct DiniModulus {
    std::vector<double> rho;  ///< offsets |y|
    std::vector<double> m;    ///< max over directions of ||u(.+y) - u||_{L3}
    std::vector<double> i_m;  ///< prefix integrals int_0^{rho} m^2 ds/s
};

DiniModulus dini_modulus(const Field& u, const std::vector<double>& rho_grid);

struct RSelection {
    bool ok = false;
    double r = 0.0;
    double i_m_smallest = 0.0;  ///< measured value when even the smallest r fails
};

/// Largest grid r with I_m(2r) <= (nu/C)^2.
RSelection select_r(const DiniModulus& modulus, double nu, double c);

// ---- closed-form scenario bounds ----

struct SelfsimilarBound {
    double re_v = 0.0;       ///< U L / nu
    double bound = 0.0;      ///< C_s (r/L)^{3s} Re^3 nu^3
    double lhs = 0.0;        ///< (r/L)^s Re
    double rhs = 0.0;        ///< C_s^{-1/3} / (2C)
    bool condition_ok = false;
};

SelfsimilarBound selfsimilar_bound(double velocity_scale, double length_scale, double s, double r,
                                   double nu, double c_s, double c);

struct MultifractalAtom {
    double h = 0.0;   ///< Hoelder exponent, in (0, 1]
    double d = 3.0;   ///< dimension of the set carrying it, <= 3
    double mu = 1.0;  ///< probability weight
};

struct MultifractalBound {
    double c_mu = 0.0;
    double zeta_3 = 0.0;
    double bound = 0.0;  ///< C_mu R_G^3 (r0/L)^{zeta_3} nu^3
    double lhs = 0.0;    ///< R_G^3 (r0/L)^{zeta_3}
    double rhs = 0.0;    ///< (C^3 C_mu)^{-1}
    bool condition_ok = false;
};

/// Discrete infimum over the spectrum: zeta_p = min_h (3 - d(h) + p h).
double zeta_p_infimum(std::span<const MultifractalAtom> spectrum, double p);

MultifractalBound multifractal_bound(std::span<const MultifractalAtom> spectrum, double r0,
                                     double length_scale, double gradient_scale, double nu,
                                     double c);

} // namespace nsrl
