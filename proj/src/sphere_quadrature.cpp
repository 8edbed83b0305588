#include "nsrl/sphere_quadrature.hpp"

#include <cmath>

#include "nsrl/errors.hpp"
#include "nsrl/grid.hpp"

namespace nsrl {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ConfigError("gauss_legendre: need n >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

SphereQuadrature SphereQuadrature::product_gauss(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw ConfigError("SphereQuadrature: node counts must be positive");
    SphereQuadrature q;
    q.n_theta = n_theta;
    q.n_phi = n_phi;
    std::vector<double> mu, w;
    gauss_legendre(n_theta, mu, w);
    q.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    q.weights.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    const double wphi = two_pi / n_phi;
    for (int i = 0; i < n_theta; ++i) {
        const double c = mu[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = two_pi * (j + 0.5) / n_phi;
            q.nodes.push_back(Vec3{s * std::cos(phi), s * std::sin(phi), c});
            q.weights.push_back(w[i] * wphi);
        }
    }
    return q;
}

} // namespace nsrl
