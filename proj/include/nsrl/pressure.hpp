#pragma once

#include <optional>

#include "nsrl/field.hpp"
#include "nsrl/radial_grid.hpp"
#include "nsrl/sampler.hpp"
#include "nsrl/sphere_quadrature.hpp"
#include "nsrl/vec.hpp"

namespace nsrl {

/// Quadrature resolution for the local pressure decomposition. Shells use a
/// log grid of n_rad points on [rho_min_factor*r, r] and a linear grid of
/// n_rad points on [r, 2r]; the sphere rule is n_theta x n_phi.
struct PressureQuadrature {
    int n_theta = 16;
    int n_phi = 32;
    int n_rad = 32;
    double rho_min_factor = 1e-3;
    bool extrapolate_inner = true;  ///< add the O(rho^2) contribution below rho_min

    PressureQuadrature refined(int k) const {
        PressureQuadrature q = *this;
        for (int i = 0; i < k; ++i) {
            q.n_theta *= 2;
            q.n_phi *= 2;
            q.n_rad *= 2;
        }
        return q;
    }
};

/// Global pressure solve p = RiRj(ui uj): multiplier -k_i k_j/|k|^2 on the
/// transformed products, k=0 coefficient zeroed (zero-mean p).
ScalarField solve_pressure(const Field& u, bool dealias = false);

/// Normalized spherical mean of f over the sphere of radius r about x.
double spherical_average(const TrigSampler& f, const Vec3& x, double r, const SphereQuadrature& quad);
double spherical_average(const ScalarField& f, const Vec3& x, double r, const SphereQuadrature& quad);

/// 3 xi_i xi_j - delta_ij for a unit vector; trace-free, zero sphere mean.
Mat3 sigma_kernel(const Vec3& xi);

/// Piecewise-linear cutoff: 1 on [0,1], 2-lambda on [1,2], 0 beyond.
double weight_w(double lambda);

/// Per-shell sphere integrals reused by the singular integral, the local
/// pressure parts and the structure function at a probe.
struct ShellIntegrals {
    std::vector<double> rho;      ///< combined log [rho_min, r] + linear [r, 2r]
    std::size_t split = 0;        ///< index of rho == r
    std::vector<double> sigma_quad;   ///< avg of sigma_ij (u-v)_i (u-v)_j
    std::vector<double> radial_quad;  ///< avg of (xi.(u-v))^2
    std::vector<double> s2;           ///< avg of |u(x+rho xi)-u(x)|^2
    Vec3 u_at_x{};
};

ShellIntegrals shell_integrals(const TrigSampler& u, const Vec3& x, double r,
                               const std::optional<Vec3>& v, const SphereQuadrature& quad,
                               const PressureQuadrature& cfg);

/// Principal-value singular integral over the ball of radius r (dy/rho^3
/// kernel, increments against v; v defaults to u(x)).
double k_singular(const Field& u, const Vec3& x, double r, std::optional<Vec3> v,
                  const SphereQuadrature& quad, const PressureQuadrature& cfg);

/// Local singular part pi(x,r): weighted principal value over |y-x| <= 2r
/// plus the annulus term.
double pi_term(const Field& u, const Vec3& x, double r, std::optional<Vec3> v,
               const SphereQuadrature& quad, const PressureQuadrature& cfg);

/// beta(x,r) = (1/r) int_r^{2r} mean_sphere(p)(x,rho) drho from the globally
/// solved pressure.
double beta_term(const ScalarField& p, const Vec3& x, double r, const SphereQuadrature& quad,
                 int n_rad);

/// beta(., r) on the whole grid at once via the exact spectral spherical-mean
/// multiplier; backs the scaling reports over many radii.
std::vector<double> beta_field(const ScalarField& p, double r, int n_rad = 32);

/// All terms of the local representation p(x) = beta + pi - (1/3)|u(x)-v|^2
/// at one probe, with the residual.
struct PressureDecomposition {
    Vec3 x{};
    double r = 0.0;
    Vec3 v{};
    double p_x = 0.0;
    double beta = 0.0;
    double pi = 0.0;
    double k_singular = 0.0;
    double sphere_quadratic_term = 0.0;  ///< avg (xi.(u-v))^2 on the r-sphere
    double s2 = 0.0;                     ///< cumulative structure function at (x, r)
    double residual = 0.0;               ///< p_x - beta - pi + (1/3)|u(x)-v|^2
    double rel_residual = 0.0;           ///< |residual| / max|p|
    bool pv_warning = false;             ///< innermost shell failed to cancel
};

PressureDecomposition verify_representation(const Field& u, const ScalarField& p, const Vec3& x,
                                            double r, std::optional<Vec3> v,
                                            const PressureQuadrature& cfg);

/// Residual of the divergence-free identity: sphere term plus PV sigma
/// integral against u minus u(x)/3; returns the max over components.
double verify_divfree_identity(const Field& u, const Vec3& x, double r,
                               const PressureQuadrature& cfg);

} // namespace nsrl
