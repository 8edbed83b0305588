#include "nsrl/structure.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/errors.hpp"
#include "nsrl/fit.hpp"
#include "nsrl/radial_grid.hpp"
#include "nsrl/reduce.hpp"
#include "nsrl/sampler.hpp"
#include "nsrl/solver.hpp"

namespace nsrl {

namespace {

constexpr double four_pi = 4.0 * 3.14159265358979323846264338328;

void check_radius(const GridSpec& grid, double reach, const char* what) {
    if (!(reach > 0.0)) throw ConfigError(std::string(what) + ": radius must be positive");
    if (reach >= 0.5 * grid.domain_length)
        throw ConfigError(std::string(what) + ": radius too large for the period cell");
}

/// 13 stencil directions: axes, face diagonals, cube diagonals (up to sign).
const std::vector<std::array<int, 3>>& stencil_directions() {
    static const std::vector<std::array<int, 3>> dirs = {
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
        {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1},
        {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    return dirs;
}

} // namespace

double shell_s2(const Field& u, const Vec3& x, double r, const SphereQuadrature& quad) {
    check_radius(u.grid(), r, "shell_s2");
    TrigSampler s(u);
    const Vec3 ux = s.sample_vector(x);
    std::vector<double> vals(quad.size());
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const Vec3 d = s.sample_vector(x + r * quad.nodes[j]) - ux;
        vals[j] = quad.weights[j] * dot(d, d);
    }
    return pairwise_sum(vals) / four_pi;
}

double cumulative_s2(const Field& u, const Vec3& x, double r, const SphereQuadrature& quad,
                     int n_rad, double rho_min_factor) {
    check_radius(u.grid(), 2.0 * r, "cumulative_s2");
    TrigSampler s(u);
    const Vec3 ux = s.sample_vector(x);
    const RadialGrid shells = RadialGrid::logarithmic(rho_min_factor * 2.0 * r, 2.0 * r, n_rad);
    std::vector<double> f(shells.rho.size());
    std::vector<double> vals(quad.size());
    for (std::size_t m = 0; m < shells.rho.size(); ++m) {
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Vec3 d = s.sample_vector(x + shells.rho[m] * quad.nodes[j]) - ux;
            vals[j] = quad.weights[j] * dot(d, d);
        }
        f[m] = pairwise_sum(vals) / four_pi;
    }
    return trapezoid_dlog(shells.rho, f) + 0.5 * f[0];
}

namespace {

/// Spherical-mean multiplier tables and transforms shared by the field route.
struct SphericalMeanWorkspace {
    const GridSpec grid;
    std::array<const Complex*, 3> u_spec;
    std::array<const double*, 3> u_phys;
    ComplexBuffer q_spec;   // spectrum of |u|^2
    RealBuffer q_phys;      // |u|^2 samples
    ComplexBuffer scratch;
    RealBuffer mean_u[3];
    RealBuffer mean_q;

    explicit SphericalMeanWorkspace(const Field& u)
        : grid(u.grid()),
          q_spec(grid.spectral_count()),
          q_phys(grid.point_count()),
          scratch(grid.spectral_count()),
          mean_q(grid.point_count()) {
        for (int c = 0; c < 3; ++c) {
            u_spec[c] = u.component(c).spectral();
            u_phys[c] = u.component(c).physical();
            mean_u[c] = RealBuffer(grid.point_count());
        }
        for (std::size_t i = 0; i < grid.point_count(); ++i) {
            q_phys[i] = u_phys[0][i] * u_phys[0][i] + u_phys[1][i] * u_phys[1][i] +
                        u_phys[2][i] * u_phys[2][i];
        }
        Fft::forward(grid, q_phys.data(), q_spec.data());
    }

    /// s2(., rho) into out (must hold n^3 values).
    void shell(double rho, double* out) {
        const double ks = grid.wavenumber_scale();
        const int n = grid.n;
        const int nxh = n / 2 + 1;
        auto apply_sinc = [&](const Complex* in, RealBuffer& dst) {
            std::size_t idx = 0;
            for (int iz = 0; iz < n; ++iz) {
                const int kz = grid.wavenumber(iz);
                for (int iy = 0; iy < n; ++iy) {
                    const int ky = grid.wavenumber(iy);
                    for (int ix = 0; ix < nxh; ++ix, ++idx) {
                        const double kk =
                            ks * std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                        const double a = kk * rho;
                        const double sinc = a == 0.0 ? 1.0 : std::sin(a) / a;
                        scratch[idx] = sinc * in[idx];
                    }
                }
            }
            Fft::inverse(grid, scratch.data(), dst.data());
        };
        for (int c = 0; c < 3; ++c) apply_sinc(u_spec[c], mean_u[c]);
        apply_sinc(q_spec.data(), mean_q);
        for (std::size_t i = 0; i < grid.point_count(); ++i) {
            out[i] = mean_q[i] + q_phys[i] -
                     2.0 * (u_phys[0][i] * mean_u[0][i] + u_phys[1][i] * mean_u[1][i] +
                            u_phys[2][i] * mean_u[2][i]);
        }
    }
};

} // namespace

std::vector<double> shell_s2_field(const Field& u, double rho) {
    check_radius(u.grid(), rho, "shell_s2_field");
    SphericalMeanWorkspace ws(u);
    std::vector<double> out(u.grid().point_count());
    ws.shell(rho, out.data());
    return out;
}

std::vector<double> cumulative_s2_field(const Field& u, double r, int n_rad,
                                        double rho_min_factor) {
    check_radius(u.grid(), 2.0 * r, "cumulative_s2_field");
    SphericalMeanWorkspace ws(u);
    const RadialGrid shells = RadialGrid::logarithmic(rho_min_factor * 2.0 * r, 2.0 * r, n_rad);
    const std::size_t count = u.grid().point_count();
    const std::size_t nshell = shells.rho.size();

    // log-trapezoid weights plus the inner O(rho^2) patch on the first shell
    std::vector<double> w(nshell, 0.0);
    for (std::size_t i = 0; i + 1 < nshell; ++i) {
        const double dt = std::log(shells.rho[i + 1] / shells.rho[i]);
        w[i] += 0.5 * dt;
        w[i + 1] += 0.5 * dt;
    }
    w[0] += 0.5;

    std::vector<double> acc(count, 0.0), shell(count);
    for (std::size_t m = 0; m < nshell; ++m) {
        ws.shell(shells.rho[m], shell.data());
        const double wm = w[m];
        for (std::size_t i = 0; i < count; ++i) acc[i] += wm * shell[i];
    }
    return acc;
}

double s2_lq_on_set(const Field& u, double r, double q, const GridMask& mask, int n_rad) {
    if (!(q >= 1.0)) throw ConfigError("s2_lq_on_set: q must be >= 1");
    if (mask.size() != u.grid().point_count()) throw ConfigError("s2_lq_on_set: mask size mismatch");
    const std::vector<double> s2 = cumulative_s2_field(u, r, n_rad);
    const double vol = u.grid().cell_volume();
    return vol * pairwise_sum(std::size_t{0}, s2.size(), [&](std::size_t i) {
               return mask[i] ? std::pow(std::max(s2[i], 0.0), q) : 0.0;
           });
}

MomentTable longitudinal_moments(const Field& u, const std::vector<int>& multiples,
                                 const std::vector<int>& p_list) {
    const GridSpec& grid = u.grid();
    const int n = grid.n;
    const double h = grid.spacing();
    const std::size_t count = grid.point_count();
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};

    MomentTable table;
    table.dissipation = flow_stats(u).dissipation;

    // accumulate per (p, length class, multiple): average over directions
    struct Key {
        int p;
        int cls;  // |d|^2: 1, 2 or 3
        int m;
    };
    std::vector<std::tuple<Key, double, int>> acc;  // key, sum, count
    auto slot = [&](const Key& k) -> std::tuple<Key, double, int>& {
        for (auto& t : acc) {
            const Key& q = std::get<0>(t);
            if (q.p == k.p && q.cls == k.cls && q.m == k.m) return t;
        }
        acc.emplace_back(k, 0.0, 0);
        return acc.back();
    };

    std::vector<double> incr(count), powed(count);
    for (const auto& d : stencil_directions()) {
        const int cls = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const double dn = std::sqrt(double(cls));
        const Vec3 dhat{d[0] / dn, d[1] / dn, d[2] / dn};
        for (int m : multiples) {
            const int ox = ((d[0] * m) % n + n) % n;
            const int oy = ((d[1] * m) % n + n) % n;
            const int oz = ((d[2] * m) % n + n) % n;
            for (int iz = 0; iz < n; ++iz) {
                const int jz = (iz + oz) % n;
                for (int iy = 0; iy < n; ++iy) {
                    const int jy = (iy + oy) % n;
                    for (int ix = 0; ix < n; ++ix) {
                        const int jx = (ix + ox) % n;
                        const std::size_t a = grid.index(ix, iy, iz);
                        const std::size_t b = grid.index(jx, jy, jz);
                        incr[a] = (up[0][b] - up[0][a]) * dhat[0] +
                                  (up[1][b] - up[1][a]) * dhat[1] +
                                  (up[2][b] - up[2][a]) * dhat[2];
                    }
                }
            }
            for (int p : p_list) {
                for (std::size_t i = 0; i < count; ++i) powed[i] = std::pow(incr[i], p);
                const double mean = pairwise_sum(powed) / double(count);
                auto& t = slot(Key{p, cls, m});
                std::get<1>(t) += mean;
                std::get<2>(t) += 1;
            }
        }
    }

    for (const auto& [key, sum, cnt] : acc) {
        MomentRow row;
        row.p = key.p;
        row.ell = key.m * h * std::sqrt(double(key.cls));
        row.moment = sum / cnt;
        if (key.p == 3 && table.dissipation > 0.0)
            row.four_fifths_ratio = row.moment / (-0.8 * table.dissipation * row.ell);
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const MomentRow& a, const MomentRow& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.ell < b.ell;
    });
    return table;
}

ZetaFit fit_zeta(const MomentTable& table, int p, double fit_min, double fit_max) {
    ZetaFit out;
    out.p = p;
    std::vector<double> ells, mags;
    for (const auto& row : table.rows) {
        if (row.p != p || row.ell < fit_min || row.ell > fit_max) continue;
        if (std::abs(row.moment) <= 0.0) return out;  // degenerate: explicit no-fit
        ells.push_back(row.ell);
        mags.push_back(std::abs(row.moment));
    }
    if (ells.size() < 4) return out;
    const LineFit f = fit_loglog(ells, mags);
    if (!f.ok) return out;
    out.zeta = f.slope;
    out.r2 = f.r2;
    out.ell_min = *std::min_element(ells.begin(), ells.end());
    out.ell_max = *std::max_element(ells.begin(), ells.end());
    out.count = ells.size();
    out.ok = true;
    return out;
}

DiniModulus dini_modulus(const Field& u, const std::vector<double>& rho_grid) {
    const GridSpec& grid = u.grid();
    for (double rho : rho_grid) check_radius(grid, rho, "dini_modulus");
    if (rho_grid.size() < 2 || !std::is_sorted(rho_grid.begin(), rho_grid.end()))
        throw ConfigError("dini_modulus: rho grid must be sorted with >= 2 entries");

    DiniModulus out;
    out.rho = rho_grid;
    out.m.resize(rho_grid.size());
    const std::size_t count = grid.point_count();
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};
    std::vector<double> mag3(count);
    for (std::size_t r = 0; r < rho_grid.size(); ++r) {
        double worst = 0.0;
        for (const auto& d : stencil_directions()) {
            const double dn = std::sqrt(double(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
            const Vec3 y{rho_grid[r] * d[0] / dn, rho_grid[r] * d[1] / dn, rho_grid[r] * d[2] / dn};
            const Field shifted = translate(u, y);
            const double* sp[3] = {shifted.component(0).physical(),
                                   shifted.component(1).physical(),
                                   shifted.component(2).physical()};
            for (std::size_t i = 0; i < count; ++i) {
                const double d0 = sp[0][i] - up[0][i];
                const double d1 = sp[1][i] - up[1][i];
                const double d2 = sp[2][i] - up[2][i];
                mag3[i] = std::pow(d0 * d0 + d1 * d1 + d2 * d2, 1.5);
            }
            const double l3 = std::cbrt(pairwise_sum(mag3) * grid.cell_volume());
            worst = std::max(worst, l3);
        }
        out.m[r] = worst;
    }

    // prefix integrals of m^2 drho/rho with the smooth-field inner patch
    out.i_m.resize(rho_grid.size());
    out.i_m[0] = 0.5 * out.m[0] * out.m[0];
    for (std::size_t r = 1; r < rho_grid.size(); ++r) {
        const double f0 = out.m[r - 1] * out.m[r - 1];
        const double f1 = out.m[r] * out.m[r];
        out.i_m[r] = out.i_m[r - 1] + 0.5 * (f0 + f1) * std::log(rho_grid[r] / rho_grid[r - 1]);
    }
    return out;
}

RSelection select_r(const DiniModulus& modulus, double nu, double c) {
    if (!(nu > 0.0) || !(c > 0.0)) throw ConfigError("select_r: nu and C must be positive");
    const double threshold = (nu / c) * (nu / c);
    RSelection sel;
    sel.i_m_smallest = modulus.i_m.empty() ? 0.0 : modulus.i_m.front();
    for (std::size_t i = 0; i < modulus.rho.size(); ++i) {
        if (modulus.i_m[i] <= threshold) {
            sel.ok = true;
            sel.r = 0.5 * modulus.rho[i];  // candidate r with 2r on the grid
        }
    }
    return sel;
}

SelfsimilarBound selfsimilar_bound(double velocity_scale, double length_scale, double s, double r,
                                   double nu, double c_s, double c) {
    if (!(s > 0.0)) throw ConfigError("selfsimilar_bound: s must be positive");
    if (!(velocity_scale > 0.0) || !(length_scale > 0.0) || !(r > 0.0) || !(nu > 0.0))
        throw ConfigError("selfsimilar_bound: scales must be positive");
    SelfsimilarBound out;
    out.re_v = velocity_scale * length_scale / nu;
    const double ratio = r / length_scale;
    out.bound = c_s * std::pow(ratio, 3.0 * s) * out.re_v * out.re_v * out.re_v * nu * nu * nu;
    out.lhs = std::pow(ratio, s) * out.re_v;
    out.rhs = std::pow(c_s, -1.0 / 3.0) / (2.0 * c);
    out.condition_ok = out.lhs <= out.rhs;
    return out;
}

double zeta_p_infimum(std::span<const MultifractalAtom> spectrum, double p) {
    if (spectrum.empty()) throw ConfigError("zeta_p_infimum: empty spectrum");
    double z = std::numeric_limits<double>::infinity();
    for (const auto& a : spectrum) {
        if (!(a.h > 0.0)) throw ConfigError("zeta_p_infimum: h must be positive");
        z = std::min(z, 3.0 - a.d + p * a.h);
    }
    return z;
}

MultifractalBound multifractal_bound(std::span<const MultifractalAtom> spectrum, double r0,
                                     double length_scale, double gradient_scale, double nu,
                                     double c) {
    if (spectrum.empty()) throw ConfigError("multifractal_bound: empty spectrum");
    double mu_total = 0.0;
    for (const auto& a : spectrum) {
        if (!(a.h > 0.0) || a.h > 1.0)
            throw ConfigError("multifractal_bound: h must lie in (0, 1]");
        if (a.d > 3.0) throw ConfigError("multifractal_bound: d must be <= 3");
        mu_total += a.mu;
    }
    if (std::abs(mu_total - 1.0) > 1e-9)
        throw ConfigError("multifractal_bound: mu weights must sum to 1");
    MultifractalBound out;
    out.zeta_3 = zeta_p_infimum(spectrum, 3.0);
    double integral = 0.0;
    for (const auto& a : spectrum) integral += a.mu * std::pow(a.h, -1.5);
    out.c_mu = c * integral;
    const double rg = gradient_scale * length_scale / nu;
    out.lhs = rg * rg * rg * std::pow(r0 / length_scale, out.zeta_3);
    out.rhs = 1.0 / (c * c * c * out.c_mu);
    out.bound = out.c_mu * out.lhs * nu * nu * nu;
    out.condition_ok = out.lhs <= out.rhs;
    return out;
}

} // namespace nsrl
