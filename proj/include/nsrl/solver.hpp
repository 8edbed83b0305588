#pragma once

#include <vector>

#include "nsrl/field.hpp"

namespace nsrl {

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias = true;      ///< 2/3-rule truncation of the quadratic term
    int snapshot_stride = 10; ///< keep every k-th state (plus first and last)
    int stats_stride = 1;     ///< record flow statistics every k-th step
};

struct FlowStats {
    double t = 0.0;
    double energy = 0.0;       ///< 1/2 ||u||_{L2}^2
    double enstrophy = 0.0;    ///< ||u||_V^2 = ||grad u||_{L2}^2
    double dissipation = 0.0;  ///< nu <|grad u|^2> (space average)
    double max_u = 0.0;
    double max_grad_u = 0.0;
};

struct Trajectory {
    GridSpec grid;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    std::vector<FlowStats> stats;
};

/// Nonlinear term -P(u.grad u), evaluated pseudo-spectrally in rotational
/// form (identical after projection for band-limited input) with optional
/// 2/3-rule dealiasing of the product.
Field nse_nonlinear(const Field& u, bool dealias = true);

/// Full right hand side nu*Lap(u) - P(u.grad u).
Field nse_rhs(const Field& u, bool dealias = true);

/// One RK4 step with exact integrating-factor treatment of the viscous term.
Field rk4_step(const Field& u, double dt, bool dealias = true);

/// Integrate from u0 to t_end. Enforces dt <= 0.5 dx / max|u| at every step
/// and aborts on NaN. Snapshots are divergence-free throughout.
Trajectory simulate(const Field& u0, const SolverConfig& config);

FlowStats flow_stats(const Field& u, double t = 0.0);

/// L2 inner product <f, g> over the period cell (Parseval).
double inner_product(const Field& f, const Field& g);

} // namespace nsrl
