#include "nsrl/pressure.hpp"

#include <cmath>
#include <limits>

#include "nsrl/errors.hpp"
#include "nsrl/reduce.hpp"

namespace nsrl {

namespace {

void check_radius(const GridSpec& grid, double reach, const char* what) {
    if (!(reach > 0.0)) throw ConfigError(std::string(what) + ": radius must be positive");
    if (reach >= 0.25 * grid.domain_length)
        throw ConfigError(std::string(what) + ": radius too large for the period cell");
}

} // namespace

ScalarField solve_pressure(const Field& u, bool dealias) {
    const GridSpec& grid = u.grid();
    const std::size_t np = grid.point_count();
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};

    // six distinct products u_i u_j
    ComplexBuffer prod[3][3];
    RealBuffer work(np);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            for (std::size_t t = 0; t < np; ++t) work[t] = up[i][t] * up[j][t];
            prod[i][j] = ComplexBuffer(grid.spectral_count());
            Fft::forward(grid, work.data(), prod[i][j].data());
            if (dealias) dealias_spectrum(grid, prod[i][j].data());
        }
    }

    ComplexBuffer p(grid.spectral_count());
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const double k[3] = {double(ix), double(ky), double(kz)};
                const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                if (k2 == 0.0) {
                    p[idx] = {0.0, 0.0};
                    continue;
                }
                Complex s{0.0, 0.0};
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        const Complex& pij = i <= j ? prod[i][j][idx] : prod[j][i][idx];
                        s += k[i] * k[j] * pij;
                    }
                }
                p[idx] = -s / k2;
            }
        }
    }
    clean_spectrum(p);
    return ScalarField::from_spectral(grid, std::move(p));
}

double spherical_average(const TrigSampler& f, const Vec3& x, double r,
                         const SphereQuadrature& quad) {
    std::vector<double> vals(quad.size());
    for (std::size_t j = 0; j < quad.size(); ++j)
        vals[j] = quad.weights[j] * f.sample_scalar(x + r * quad.nodes[j]);
    return pairwise_sum(vals) / (4.0 * 3.14159265358979323846264338328);
}

double spherical_average(const ScalarField& f, const Vec3& x, double r,
                         const SphereQuadrature& quad) {
    check_radius(f.grid(), r, "spherical_average");
    TrigSampler s(f);
    return spherical_average(s, x, r, quad);
}

Mat3 sigma_kernel(const Vec3& xi) {
    if (std::abs(norm(xi) - 1.0) > 1e-12) throw ConfigError("sigma_kernel: input must be a unit vector");
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = 3.0 * xi[i] * xi[j] - (i == j ? 1.0 : 0.0);
    return m;
}

double weight_w(double lambda) {
    if (lambda <= 1.0) return lambda < 0.0 ? 0.0 : 1.0;
    if (lambda >= 2.0) return 0.0;
    return 2.0 - lambda;
}

ShellIntegrals shell_integrals(const TrigSampler& u, const Vec3& x, double r,
                               const std::optional<Vec3>& v, const SphereQuadrature& quad,
                               const PressureQuadrature& cfg) {
    ShellIntegrals out;
    out.u_at_x = u.sample_vector(x);
    const Vec3 vv = v.value_or(out.u_at_x);

    const RadialGrid inner = RadialGrid::logarithmic(cfg.rho_min_factor * r, r, cfg.n_rad);
    const RadialGrid outer = RadialGrid::linear(r, 2.0 * r, cfg.n_rad);
    out.rho = inner.rho;
    out.split = out.rho.size() - 1;
    out.rho.insert(out.rho.end(), outer.rho.begin() + 1, outer.rho.end());

    const std::size_t nshell = out.rho.size();
    out.sigma_quad.resize(nshell);
    out.radial_quad.resize(nshell);
    out.s2.resize(nshell);

    const double four_pi = 4.0 * 3.14159265358979323846264338328;
    std::vector<double> t_sigma(quad.size()), t_rad(quad.size()), t_s2(quad.size());
    for (std::size_t m = 0; m < nshell; ++m) {
        const double rho = out.rho[m];
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Vec3& xi = quad.nodes[j];
            const Vec3 uy = u.sample_vector(x + rho * xi);
            const Vec3 dv = uy - vv;
            const Vec3 dx = uy - out.u_at_x;
            const double xid = dot(xi, dv);
            const double w = quad.weights[j];
            t_rad[j] = w * xid * xid;
            t_sigma[j] = w * (3.0 * xid * xid - dot(dv, dv));
            t_s2[j] = w * dot(dx, dx);
        }
        out.sigma_quad[m] = pairwise_sum(t_sigma) / four_pi;
        out.radial_quad[m] = pairwise_sum(t_rad) / four_pi;
        out.s2[m] = pairwise_sum(t_s2) / four_pi;
    }
    return out;
}

namespace {

/// PV integral over [0, r]: log-trapezoid plus the inner O(rho^2) patch.
double pv_inner_integral(const ShellIntegrals& sh, std::span<const double> f, bool extrapolate) {
    const std::span<const double> rho(sh.rho.data(), sh.split + 1);
    double val = trapezoid_dlog(rho, f.subspan(0, sh.split + 1));
    if (extrapolate) val += 0.5 * f[0];
    return val;
}

double pi_from_shells(const ShellIntegrals& sh, double r, bool extrapolate) {
    double pi = pv_inner_integral(sh, sh.sigma_quad, extrapolate);
    // weighted tail of the PV integral over [r, 2r]
    const std::size_t nout = sh.rho.size() - sh.split;
    std::vector<double> g(nout), rho(nout), a(nout);
    for (std::size_t i = 0; i < nout; ++i) {
        rho[i] = sh.rho[sh.split + i];
        g[i] = weight_w(rho[i] / r) * sh.sigma_quad[sh.split + i];
        a[i] = sh.radial_quad[sh.split + i];
    }
    pi += trapezoid_dlog(rho, g);
    pi += trapezoid(rho, a) / r;
    return pi;
}

bool pv_suspect(const ShellIntegrals& sh) {
    double max_f = 0.0;
    for (double f : sh.sigma_quad) max_f = std::max(max_f, std::abs(f));
    return max_f > 0.0 && std::abs(sh.sigma_quad[0]) > 0.1 * max_f;
}

} // namespace

double k_singular(const Field& u, const Vec3& x, double r, std::optional<Vec3> v,
                  const SphereQuadrature& quad, const PressureQuadrature& cfg) {
    check_radius(u.grid(), r, "k_singular");
    TrigSampler s(u);
    ShellIntegrals sh = shell_integrals(s, x, r, v, quad, cfg);
    return pv_inner_integral(sh, sh.sigma_quad, cfg.extrapolate_inner);
}

double pi_term(const Field& u, const Vec3& x, double r, std::optional<Vec3> v,
               const SphereQuadrature& quad, const PressureQuadrature& cfg) {
    check_radius(u.grid(), 2.0 * r, "pi_term");
    TrigSampler s(u);
    ShellIntegrals sh = shell_integrals(s, x, r, v, quad, cfg);
    return pi_from_shells(sh, r, cfg.extrapolate_inner);
}

double beta_term(const ScalarField& p, const Vec3& x, double r, const SphereQuadrature& quad,
                 int n_rad) {
    check_radius(p.grid(), 2.0 * r, "beta_term");
    TrigSampler s(p);
    const RadialGrid shells = RadialGrid::linear(r, 2.0 * r, n_rad);
    std::vector<double> means(shells.rho.size());
    for (std::size_t i = 0; i < shells.rho.size(); ++i)
        means[i] = spherical_average(s, x, shells.rho[i], quad);
    return trapezoid(shells.rho, means) / r;
}

std::vector<double> beta_field(const ScalarField& p, double r, int n_rad) {
    const GridSpec& grid = p.grid();
    check_radius(grid, 2.0 * r, "beta_field");
    const RadialGrid shells = RadialGrid::linear(r, 2.0 * r, n_rad);
    const std::size_t count = grid.point_count();
    const std::size_t nshell = shells.rho.size();

    // trapezoid weights of (1/r) int_r^{2r} drho
    std::vector<double> w(nshell, 0.0);
    for (std::size_t i = 0; i + 1 < nshell; ++i) {
        const double d = shells.rho[i + 1] - shells.rho[i];
        w[i] += 0.5 * d / r;
        w[i + 1] += 0.5 * d / r;
    }

    const double ks = grid.wavenumber_scale();
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    const Complex* in = p.spectral();
    ComplexBuffer scratch(grid.spectral_count());
    RealBuffer shell(count);
    std::vector<double> acc(count, 0.0);
    for (std::size_t m = 0; m < nshell; ++m) {
        const double rho = shells.rho[m];
        std::size_t idx = 0;
        for (int iz = 0; iz < n; ++iz) {
            const int kz = grid.wavenumber(iz);
            for (int iy = 0; iy < n; ++iy) {
                const int ky = grid.wavenumber(iy);
                for (int ix = 0; ix < nxh; ++ix, ++idx) {
                    const double kk =
                        ks * std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                    const double a = kk * rho;
                    scratch[idx] = (a == 0.0 ? 1.0 : std::sin(a) / a) * in[idx];
                }
            }
        }
        Fft::inverse(grid, scratch.data(), shell.data());
        for (std::size_t i = 0; i < count; ++i) acc[i] += w[m] * shell[i];
    }
    return acc;
}

PressureDecomposition verify_representation(const Field& u, const ScalarField& p, const Vec3& x,
                                            double r, std::optional<Vec3> v,
                                            const PressureQuadrature& cfg) {
    check_radius(u.grid(), 2.0 * r, "verify_representation");
    const SphereQuadrature quad = SphereQuadrature::product_gauss(cfg.n_theta, cfg.n_phi);

    TrigSampler us(u);
    TrigSampler ps(p);

    PressureDecomposition d;
    d.x = x;
    d.r = r;
    ShellIntegrals sh = shell_integrals(us, x, r, v, quad, cfg);
    d.v = v.value_or(sh.u_at_x);
    d.k_singular = pv_inner_integral(sh, sh.sigma_quad, cfg.extrapolate_inner);
    d.pi = pi_from_shells(sh, r, cfg.extrapolate_inner);
    d.sphere_quadratic_term = sh.radial_quad[sh.split];
    d.s2 = trapezoid_dlog(sh.rho, sh.s2) + (cfg.extrapolate_inner ? 0.5 * sh.s2[0] : 0.0);
    d.beta = beta_term(p, x, r, quad, cfg.n_rad);
    d.p_x = ps.sample_scalar(x);
    const Vec3 dv = sh.u_at_x - d.v;
    d.residual = d.p_x - d.beta - d.pi + dot(dv, dv) / 3.0;
    const double pmax = norm_lp(p, std::numeric_limits<double>::infinity());
    d.rel_residual = pmax > 0.0 ? std::abs(d.residual) / pmax : std::abs(d.residual);
    d.pv_warning = pv_suspect(sh);
    return d;
}

double verify_divfree_identity(const Field& u, const Vec3& x, double r,
                               const PressureQuadrature& cfg) {
    check_radius(u.grid(), r, "verify_divfree_identity");
    const SphereQuadrature quad = SphereQuadrature::product_gauss(cfg.n_theta, cfg.n_phi);
    TrigSampler us(u);

    const RadialGrid shells = RadialGrid::logarithmic(cfg.rho_min_factor * r, r, cfg.n_rad);
    const std::size_t nshell = shells.rho.size();
    std::array<std::vector<double>, 3> g;
    for (auto& v : g) v.resize(nshell);
    std::array<std::vector<double>, 3> sphere_terms;
    for (auto& v : sphere_terms) v.resize(quad.size());

    std::vector<double> tmp[3];
    for (auto& t : tmp) t.resize(quad.size());
    for (std::size_t m = 0; m < nshell; ++m) {
        const double rho = shells.rho[m];
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Vec3& xi = quad.nodes[j];
            const Vec3 uy = us.sample_vector(x + rho * xi);
            const double xiu = dot(xi, uy);
            const double w = quad.weights[j];
            for (int c = 0; c < 3; ++c) tmp[c][j] = w * (3.0 * xi[c] * xiu - uy[c]);
            if (m + 1 == nshell)
                for (int c = 0; c < 3; ++c) sphere_terms[c][j] = w * xi[c] * xiu;
        }
        const double four_pi = 4.0 * 3.14159265358979323846264338328;
        for (int c = 0; c < 3; ++c) g[c][m] = pairwise_sum(tmp[c]) / four_pi;
    }

    const Vec3 ux = us.sample_vector(x);
    double worst = 0.0;
    const double four_pi = 4.0 * 3.14159265358979323846264338328;
    for (int c = 0; c < 3; ++c) {
        double pv = trapezoid_dlog(shells.rho, g[c]);
        if (cfg.extrapolate_inner) pv += 0.5 * g[c][0];
        const double sphere = pairwise_sum(sphere_terms[c]) / four_pi;
        worst = std::max(worst, std::abs(sphere + pv - ux[c] / 3.0));
    }
    return worst;
}

} // namespace nsrl
