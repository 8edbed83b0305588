#pragma once

#include <vector>

#include "nsrl/vec.hpp"

namespace nsrl {

/// Product quadrature on the unit sphere: Gauss-Legendre in cos(theta) times
/// uniform azimuth. Weights sum to 4*pi; exact for spherical polynomials up
/// to degree min(2*n_theta - 1, n_phi - 1).
struct SphereQuadrature {
    int n_theta = 16;
    int n_phi = 32;
    std::vector<Vec3> nodes;
    std::vector<double> weights;

    static SphereQuadrature product_gauss(int n_theta, int n_phi);

    std::size_t size() const { return nodes.size(); }

    /// Normalized average over the sphere (divides by 4*pi).
    template <class F>
    double average(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s / (4.0 * 3.14159265358979323846264338328);
    }
};

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace nsrl
