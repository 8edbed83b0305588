#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsrl/field.hpp"
#include "nsrl/solver.hpp"
#include "nsrl/structure.hpp"

namespace nsrl {

/// Surrogates for the absolute constants of the estimates. The defaults keep
/// every inequality with C = 1; the Morrey constant is reported separately
/// (Talenti's sharp whole-space value) and is configurable because the torus
/// changes it.
struct Constants {
    double c_absolute = 1.0;
    double c_morrey = 0.30596;
    std::map<double, double> c_q;  ///< per-exponent interpolation constants

    double cq(double q) const {
        auto it = c_q.find(q);
        return it == c_q.end() ? 1.0 : it->second;
    }
};

struct CriterionPoint {
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double ratio = 0.0;  ///< measured / bound (0 when the bound overflows)
    bool pass = true;
};

/// Per-criterion evaluation along a trajectory. `required_c` is the boundary
/// value of the constant: for certificates (bounds growing with C) it is the
/// smallest C validating every time; for threshold conditions (nu/C powers)
/// it is the largest admissible C. `params` records every knob used.
struct CriterionReport {
    std::string id;
    std::vector<CriterionPoint> points;
    std::map<std::string, double> params;
    double required_c = 0.0;
    bool pass = true;
};

// ---- worst-set (finite uniform integrability) machinery ----

/// Sorted-cell representation of delta -> sup over |A| <= delta of
/// int_A |f|^exponent. Exact on the grid measure: the supremum over
/// measurable sets is attained by threshold sets with a pro-rated last cell.
struct WorstSetCurve {
    double cell_volume = 0.0;
    std::vector<double> values;  ///< |f|^exponent, descending
    std::vector<double> prefix;  ///< prefix[i] = integral of the top i cells

    static WorstSetCurve build(std::span<const double> samples, double exponent,
                               double cell_volume);

    double total_volume() const { return cell_volume * static_cast<double>(values.size()); }
    double query(double delta) const;
    /// Largest delta with query(delta) <= target (full volume if never exceeded).
    double inverse(double target) const;
};

double worst_set_integral(std::span<const double> samples, double exponent, double delta,
                          double cell_volume);

// ---- level sets ----

struct LevelSetResult {
    double measure = 0.0;          ///< |{|u| >= U}| (grid measure)
    double chebyshev_bound = 0.0;  ///< U^{-2} ||u||_{L2}^2
    double joint_measure = 0.0;    ///< |{|u| >= U and |grad u| >= G}| when G given
    double grad_measure = 0.0;     ///< |{|grad u| >= G}|
    double weak_l1_ratio = 0.0;    ///< G |{|grad u| >= G}| / ||curl u||_{L1}
};

/// Chebyshev is exact on the grid measure; violation throws.
LevelSetResult level_set_measure(const Field& u, double big_u, std::optional<double> big_g);

GridMask super_level_mask(const Field& u, double big_u, std::optional<double> big_g);

// ---- time-integral diagnostics ----

/// Ladyzhenskaya-Prodi-Serrin integral: velocity needs 2/p + 3/q = 1, q > 3;
/// the pressure variant integrates ||p||_{Lq}^{2q/(2q-3)}, q > 3/2.
CriterionReport lps_integral(std::span<const double> t, std::span<const double> norms, double p,
                             double q, const std::string& subject);

// ---- enstrophy certificates ----

CriterionReport certificate_quanta_v(std::span<const double> t,
                                     std::span<const double> enstrophy,
                                     std::span<const double> lq_norms, double q, double nu,
                                     const Constants& constants);

CriterionReport certificate_vcond(std::span<const double> t, std::span<const double> enstrophy,
                                  double nu, const Constants& constants);

CriterionReport certificate_grad_l3(std::span<const double> t, std::span<const double> enstrophy,
                                    std::span<const double> grad_l3_sq, double nu,
                                    const Constants& constants);

CriterionReport certificate_lambda32(std::span<const double> t, std::span<const double> enstrophy,
                                     std::span<const double> lambda32_sq, double nu,
                                     const Constants& constants);

/// Companion estimate: ||L^{1/2}u(t)|| <= ||L^{1/2}u0|| + C int ||L^{3/2}u||^2.
CriterionReport certificate_lambda12_growth(std::span<const double> t,
                                            std::span<const double> hdot_half,
                                            std::span<const double> lambda32_sq,
                                            const Constants& constants);

struct FoiasCertificate {
    CriterionReport report;
    double delta = 0.0;           ///< admissible measure budget under (nu/2C)^3
    double crossover_time = 0.0;  ///< where the two branches cross
};

/// Two-branch enstrophy bound from finite uniform integrability of |u|^3.
/// delta_override skips the measured-curve policy.
FoiasCertificate certificate_foias(std::span<const double> t, std::span<const double> enstrophy,
                                   std::span<const WorstSetCurve> u3_curves, double u0_l2,
                                   double nu, const Constants& constants,
                                   std::optional<double> delta_override = std::nullopt);

/// Single-exponential L^r bound from finite uniform integrability of |p|^{3/2}, r >= 4.
CriterionReport certificate_pressure_lr(std::span<const double> t,
                                        std::span<const double> lr_norms,
                                        std::span<const WorstSetCurve> p32_curves, double lr,
                                        double u0_l2, double nu, const Constants& constants,
                                        std::optional<double> delta_override = std::nullopt);

/// L^q bound under the structure-function condition with cutoff scale r(t).
CriterionReport certificate_s2_lq(std::span<const double> t, std::span<const double> lq_norms,
                                  std::span<const double> r_of_t, double q, double delta,
                                  double u0_l2, double nu, const Constants& constants);

/// L^q bound for time-dependent regions of interest (U(t), G(t), r(t)).
CriterionReport certificate_region_lq(std::span<const double> t, std::span<const double> lq_norms,
                                      std::span<const double> u_of_t,
                                      std::span<const double> g_of_t,
                                      std::span<const double> r_of_t, double q, double u0_l2,
                                      double nu, const Constants& constants);

// ---- structure-function condition monitor ----

struct RPolicy {
    enum Kind { Fixed, Kolmogorov, Custom } kind = Fixed;
    double fixed_r = 0.1;
    std::vector<double> custom_r;  ///< per snapshot when kind == Custom
};

/// Kolmogorov dissipation scale eta = (nu^3/eps)^{1/4}.
double kolmogorov_eta(double nu, double dissipation);

/// Per-snapshot worst-set integral of S2(., 2r(t))^{3/2} at measure delta
/// against (nu/C)^3, plus the r(t)^{-4} time integral.
CriterionReport s2cond_monitor(const Trajectory& traj, const RPolicy& policy, double delta,
                               const Constants& constants, int n_rad = 32);

/// Offset integral of the region-of-interest increment condition:
/// int_{|y|<=r} (int_B |delta_y u|^3 dx)^{2/3} dy/|y|^3 against (nu/C)^2.
CriterionReport region_increment_check(const Field& u, double big_u, double big_g, double r,
                                       const Constants& constants, int n_rad = 24, int n_theta = 4,
                                       int n_phi = 8, double rho_min_factor = 1e-3,
                                       bool extrapolate_inner = true);

// ---- trajectory norm series helpers ----

std::vector<double> snapshot_norm_lq(const Trajectory& traj, double q);
std::vector<double> snapshot_enstrophy(const Trajectory& traj);
std::vector<double> snapshot_hdot(const Trajectory& traj, double s);
std::vector<double> snapshot_grad_l3_sq(const Trajectory& traj);
std::vector<double> snapshot_lambda32_sq(const Trajectory& traj);
std::vector<WorstSetCurve> snapshot_u3_curves(const Trajectory& traj);
std::vector<WorstSetCurve> snapshot_p32_curves(const Trajectory& traj);

/// Trapezoid prefix integrals on a time grid.
std::vector<double> trapezoid_prefix(std::span<const double> t, std::span<const double> f);

} // namespace nsrl
