#include <doctest.h>

#include <cmath>

#include "nsrl/generators.hpp"
#include "nsrl/pressure.hpp"
#include "nsrl/radial_grid.hpp"
#include "nsrl/reduce.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/sampler.hpp"
#include "nsrl/solver.hpp"
#include "nsrl/structure.hpp"

using namespace nsrl;

namespace {

constexpr double pi_const = 3.14159265358979323846264338328;

GridSpec grid_n(int n) {
    GridSpec g;
    g.n = n;
    g.nu = 0.05;
    return g;
}

Field constant_field(const GridSpec& g, double a, double b, double c) {
    RealBuffer c0(g.point_count()), c1(g.point_count()), c2(g.point_count());
    for (std::size_t i = 0; i < g.point_count(); ++i) {
        c0[i] = a;
        c1[i] = b;
        c2[i] = c;
    }
    return Field::from_physical(g, std::move(c0), std::move(c1), std::move(c2));
}

template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Independent Cartesian ball quadrature of the cumulative structure function
/// (annulus cells with partial volumes plus a lattice-derived inner patch).
double s2_cartesian_oracle(const TrigSampler& s, const Vec3& x, double r, int cells_per_ball,
                           int sub) {
    const double R = 2.0 * r;
    const double delta = R / cells_per_ball;
    const double rho_e = 2.0 * delta;
    const Vec3 ux = s.sample_vector(x);
    const int m_max = cells_per_ball + 2;
    double acc = 0.0, c_num = 0.0;
    long c_cnt = 0;
    for (int iz = -m_max; iz <= m_max; ++iz) {
        for (int iy = -m_max; iy <= m_max; ++iy) {
            for (int ix = -m_max; ix <= m_max; ++ix) {
                const Vec3 y{ix * delta, iy * delta, iz * delta};
                const double rho = norm(y);
                if (rho < rho_e - delta || rho > R + delta) continue;
                int cnt = 0;
                const int tot = sub * sub * sub;
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b)
                        for (int c = 0; c < sub; ++c) {
                            const Vec3 yy{y[0] + ((a + 0.5) / sub - 0.5) * delta,
                                          y[1] + ((b + 0.5) / sub - 0.5) * delta,
                                          y[2] + ((c + 0.5) / sub - 0.5) * delta};
                            const double rr = norm(yy);
                            if (rr > rho_e && rr <= R) ++cnt;
                        }
                const Vec3 d = s.sample_vector(x + y) - ux;
                if (rho > rho_e && rho <= 3.0 * rho_e) {
                    c_num += dot(d, d) / (rho * rho);
                    ++c_cnt;
                }
                if (cnt == 0) continue;
                acc += dot(d, d) / (rho * rho * rho) * (double(cnt) / tot) * delta * delta * delta;
            }
        }
    }
    acc /= 4.0 * pi_const;
    const double c_est = c_cnt ? c_num / double(c_cnt) : 0.0;
    return acc + 0.5 * c_est * rho_e * rho_e;
}

} // namespace

TEST_SUITE("structure") {

TEST_CASE("shell_s2: constant field vanishes, single-mode closed form") {
    const GridSpec g = grid_n(32);
    const SphereQuadrature q = SphereQuadrature::product_gauss(16, 32);
    CHECK(shell_s2(constant_field(g, 1.0, -2.0, 0.5), Vec3{1.0, 1.0, 1.0}, 0.4, q) <= 1e-14);

    // u = sin(x1) e1: angular integral reduces to a 1D average over xi_1
    RealBuffer c0(g.point_count()), c1(g.point_count()), c2(g.point_count());
    const double h = g.spacing();
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) c0[g.index(ix, iy, iz)] = std::sin(ix * h);
    const Field u = Field::from_physical(g, std::move(c0), std::move(c1), std::move(c2));
    const Vec3 x{1.3, 0.4, 2.2};
    for (double r : {0.2, 0.5}) {
        const double expected = 0.5 * simpson(
                                          [&](double mu) {
                                              const double d =
                                                  std::sin(x[0] + r * mu) - std::sin(x[0]);
                                              return d * d;
                                          },
                                          -1.0, 1.0, 2000);
        CHECK(shell_s2(u, x, r, q) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("shell_s2: smooth-field Richardson limit matches spectral gradients") {
    const GridSpec g = grid_n(32);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 5, 1.0, 19);
    const SphereQuadrature q = SphereQuadrature::product_gauss(16, 32);
    const std::vector<double> grad = gradient_magnitude_samples(u);
    const double h = g.spacing();
    for (auto [ix, iy, iz] : {std::array<int, 3>{3, 7, 11}, {20, 4, 29}, {9, 16, 1}}) {
        const Vec3 x{ix * h, iy * h, iz * h};
        const double f1 = shell_s2(u, x, 0.04, q) / (0.04 * 0.04);
        const double f2 = shell_s2(u, x, 0.02, q) / (0.02 * 0.02);
        const double c_est = (4.0 * f2 - f1) / 3.0;  // Richardson in rho^2
        const double gm = grad[g.index(ix, iy, iz)];
        const double c_spec = gm * gm / 3.0;
        CHECK(std::abs(c_est - c_spec) <= 0.02 * c_spec);
    }
}

TEST_CASE("cumulative_s2: Cartesian ball oracle, monotonicity") {
    const GridSpec g = grid_n(32);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 6, 1.0, 77);
    const TrigSampler s(u);
    const SphereQuadrature q = SphereQuadrature::product_gauss(24, 48);
    Rng rng(9);
    for (int t = 0; t < 2; ++t) {
        const Vec3 x{rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
        const double impl = cumulative_s2(u, x, 0.3, q, 160, 1e-2);
        const double oracle = s2_cartesian_oracle(s, x, 0.3, 48, 5);
        CHECK(std::abs(impl - oracle) <= 1e-3 * oracle);
    }
    const Vec3 x{1.0, 2.0, 3.0};
    CHECK(cumulative_s2(u, x, 0.2, q, 64, 1e-3) <= cumulative_s2(u, x, 0.3, q, 64, 1e-3));
    CHECK(cumulative_s2(constant_field(g, 1.0, 0.0, 0.0), x, 0.3, q, 32, 1e-3) <= 1e-14);
}

TEST_CASE("multiplier route matches quadrature route at grid nodes") {
    const GridSpec g = grid_n(32);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 6, 1.0, 41);
    const SphereQuadrature q = SphereQuadrature::product_gauss(24, 48);
    const double h = g.spacing();
    for (double rho : {0.15, 0.4}) {
        const std::vector<double> field_route = shell_s2_field(u, rho);
        for (auto [ix, iy, iz] : {std::array<int, 3>{2, 9, 23}, {17, 30, 5}}) {
            const double probe = shell_s2(u, Vec3{ix * h, iy * h, iz * h}, rho, q);
            CHECK(field_route[g.index(ix, iy, iz)] == doctest::Approx(probe).epsilon(1e-10));
        }
    }
}

TEST_CASE("s2_lq_on_set: trivial masks and gradient-ratio stability") {
    const GridSpec g = grid_n(32);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 6, 1.0, 31);
    const GridMask empty(g.point_count(), 0);
    const GridMask full(g.point_count(), 1);
    CHECK(s2_lq_on_set(u, 0.2, 1.5, empty) == 0.0);
    CHECK(s2_lq_on_set(constant_field(g, 3.0, 0.0, 0.0), 0.2, 1.5, full) <= 1e-20);

    const double q = 1.5;
    const std::vector<double> grad = gradient_magnitude_samples(u);
    const double gq = g.cell_volume() *
                      pairwise_sum(std::size_t{0}, grad.size(),
                                   [&](std::size_t i) { return std::pow(grad[i], 2.0 * q); });
    double lo = 1e300, hi = 0.0;
    for (double r : {0.04, 0.08, 0.16, 0.32, 0.4}) {
        const double ratio = s2_lq_on_set(u, r, q, full, 48) / (std::pow(r, 2.0 * q) * gq);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        CHECK(std::isfinite(ratio));
    }
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("duality bound: L32 norm of S2 against the increment integral, r-stable") {
    const GridSpec g = grid_n(32);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 6, 1.0, 47);
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};
    const std::vector<std::array<int, 3>> dirs = {
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0}, {1, 0, 1},
        {1, 0, -1}, {0, 1, 1}, {0, 1, -1}, {1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    double lo = 1e300, hi = 0.0;
    for (double r : {0.1, 0.2, 0.4}) {
        const std::vector<double> s2 = cumulative_s2_field(u, r, 48);
        const double lhs = std::pow(
            g.cell_volume() * pairwise_sum(std::size_t{0}, s2.size(),
                                           [&](std::size_t i) {
                                               return std::pow(std::max(s2[i], 0.0), 1.5);
                                           }),
            2.0 / 3.0);
        // rhs: 4 pi int_0^{2r} angular-mean ||delta_y u||_{L3}^2 drho/rho
        const RadialGrid shells = RadialGrid::logarithmic(0.02 * r, 2.0 * r, 24);
        std::vector<double> f(shells.rho.size());
        std::vector<double> mag3(g.point_count());
        for (std::size_t m = 0; m < shells.rho.size(); ++m) {
            double mean = 0.0;
            for (const auto& d : dirs) {
                const double dn = std::sqrt(double(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
                const Vec3 y{shells.rho[m] * d[0] / dn, shells.rho[m] * d[1] / dn,
                             shells.rho[m] * d[2] / dn};
                const Field sh = translate(u, y);
                for (std::size_t i = 0; i < g.point_count(); ++i) {
                    double a2 = 0.0;
                    for (int c = 0; c < 3; ++c) {
                        const double dd =
                            sh.component(c).physical()[i] - up[c][i];
                        a2 += dd * dd;
                    }
                    mag3[i] = std::pow(a2, 1.5);
                }
                const double l3sq =
                    std::pow(g.cell_volume() * pairwise_sum(mag3), 2.0 / 3.0);
                mean += l3sq;
            }
            f[m] = mean / double(dirs.size());
        }
        const double four_pi = 4.0 * pi_const;
        const double rhs = four_pi * (trapezoid_dlog(shells.rho, f) + 0.5 * f[0]);
        const double ratio = lhs / rhs;
        CHECK(std::isfinite(ratio));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("longitudinal_moments: constant field, brute-force p=2 check") {
    const GridSpec g = grid_n(16);
    const MomentTable zero_tab =
        longitudinal_moments(constant_field(g, 1.0, 2.0, 3.0), {1, 2}, {1, 2, 3});
    for (const MomentRow& row : zero_tab.rows) CHECK(std::abs(row.moment) <= 1e-28);

    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 64);
    const MomentTable tab = longitudinal_moments(u, {2}, {2});
    // brute force over all grid pairs, averaged over the three axes
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};
    double acc = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        double sum = 0.0;
        for (int iz = 0; iz < g.n; ++iz)
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix) {
                    int jx = ix, jy = iy, jz = iz;
                    (axis == 0 ? jx : axis == 1 ? jy : jz) += 2;
                    jx %= g.n;
                    jy %= g.n;
                    jz %= g.n;
                    const std::size_t a = g.index(ix, iy, iz), b = g.index(jx, jy, jz);
                    const double d = up[axis][b] - up[axis][a];
                    sum += d * d;
                }
        acc += sum / double(g.point_count());
    }
    acc /= 3.0;
    double table_value = -1.0;
    for (const MomentRow& row : tab.rows)
        if (row.p == 2 && std::abs(row.ell - 2.0 * g.spacing()) < 1e-12) table_value = row.moment;
    CHECK(table_value == doctest::Approx(acc).epsilon(1e-10));
}

TEST_CASE("fit_zeta: exact K41 slope, scale invariance, degenerate input") {
    MomentTable synthetic;
    for (double ell : {0.1, 0.2, 0.4, 0.8}) {
        MomentRow row;
        row.p = 3;
        row.ell = ell;
        row.moment = std::pow(0.7 * ell, 1.0);  // zeta_3 = 1
        synthetic.rows.push_back(row);
    }
    const ZetaFit f = fit_zeta(synthetic, 3, 0.05, 1.0);
    CHECK(f.ok);
    CHECK(f.zeta == doctest::Approx(1.0).epsilon(1e-12));

    const GridSpec g = grid_n(16);
    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 13);
    const Field u2 = scale(3.7, u);
    const MomentTable t1 = longitudinal_moments(u, {1, 2, 3, 4}, {2});
    const MomentTable t2 = longitudinal_moments(u2, {1, 2, 3, 4}, {2});
    const ZetaFit z1 = fit_zeta(t1, 2, 0.0, 10.0);
    const ZetaFit z2 = fit_zeta(t2, 2, 0.0, 10.0);
    CHECK(z1.ok);
    CHECK(z2.ok);
    CHECK(std::abs(z1.zeta - z2.zeta) <= 1e-10);

    const MomentTable zt = longitudinal_moments(constant_field(g, 1.0, 0.0, 0.0), {1, 2, 3, 4}, {2});
    CHECK_FALSE(fit_zeta(zt, 2, 0.0, 10.0).ok);
}

TEST_CASE("fit_zeta: synthetic monofractal spectrum recovers 2h within 15 percent") {
    GridSpec g = grid_n(64);
    const double h = 1.0 / 3.0;
    const Field u = generate_random_divfree(g, -(2.0 * h + 1.0), 2, 28, 1.0, 99);
    const MomentTable tab = longitudinal_moments(u, {4, 5, 6, 7, 8, 10, 12, 14, 16}, {2});
    const ZetaFit f = fit_zeta(tab, 2, 0.45, 1.65);
    CHECK(f.ok);
    CHECK(std::abs(f.zeta - 2.0 * h) <= 0.15 * 2.0 * h);
}

TEST_CASE("dini_modulus: power-law closed form, constant field, selection scan") {
    const GridSpec g = grid_n(16);
    // analytic integration check: m ~ rho from a single smooth mode
    const Field sm = generate_single_mode(g, {1, 0, 0}, 1.0);
    const std::vector<double> rho_grid = [&] {
        std::vector<double> r;
        for (int i = 0; i < 24; ++i) r.push_back(0.02 * std::pow(1.18, i));
        return r;
    }();
    const DiniModulus dm = dini_modulus(sm, rho_grid);
    // m(rho) = c rho (1 + O(rho^2)) so I_m(rho) should track m(rho)^2 / 2
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(dm.i_m[i] == doctest::Approx(0.5 * dm.m[i] * dm.m[i]).epsilon(2e-2));

    const DiniModulus dc = dini_modulus(constant_field(g, 1.0, 1.0, 1.0), rho_grid);
    const RSelection all_ok = select_r(dc, 0.1, 1.0);
    CHECK(all_ok.ok);
    CHECK(all_ok.r == doctest::Approx(0.5 * rho_grid.back()));

    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 17);
    const DiniModulus du = dini_modulus(u, rho_grid);
    for (std::size_t i = 0; i < rho_grid.size(); ++i) CHECK(du.i_m[i] >= (i ? du.i_m[i - 1] : 0.0));
    const double nu = 0.5, c = 1.0;
    const RSelection sel = select_r(du, nu, c);
    // direct scan over the same table
    bool any = false;
    double best = 0.0;
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
        if (du.i_m[i] <= (nu / c) * (nu / c)) {
            any = true;
            best = 0.5 * rho_grid[i];
        }
    CHECK(sel.ok == any);
    if (any) CHECK(sel.r == doctest::Approx(best));
}

TEST_CASE("select_r: reports failure with the measured prefix when nothing fits") {
    const GridSpec g = grid_n(16);
    const Field strong = scale(50.0, generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 23));
    std::vector<double> rho;
    for (int i = 0; i < 12; ++i) rho.push_back(0.2 + 0.1 * i);
    const DiniModulus dm = dini_modulus(strong, rho);
    const RSelection sel = select_r(dm, 1e-4, 1.0);
    CHECK_FALSE(sel.ok);
    CHECK(sel.i_m_smallest == doctest::Approx(dm.i_m.front()));
    CHECK(sel.i_m_smallest > 1e-8);
}

TEST_CASE("dini prefix integral: pure power modulus has closed form") {
    // feed an analytic modulus through the same integration rule via a
    // single-mode field scaled to match is indirect; instead check the
    // quadrature on m = rho directly using a manual table
    std::vector<double> rho;
    for (int i = 0; i < 64; ++i) rho.push_back(1e-3 * std::pow(1.12, i));
    // I(rho) = int_0^rho s^2 ds/s = rho^2/2 for m = s
    double prefix = 0.5 * rho[0] * rho[0];
    for (std::size_t i = 1; i < rho.size(); ++i) {
        prefix += 0.5 * (rho[i - 1] * rho[i - 1] + rho[i] * rho[i]) * std::log(rho[i] / rho[i - 1]);
        CHECK(prefix == doctest::Approx(0.5 * rho[i] * rho[i]).epsilon(2e-3));
    }
}

TEST_CASE("selfsimilar_bound: Reynolds number, unit-ratio bound, profile increments") {
    const SelfsimilarBound b = selfsimilar_bound(1.0, 1.0, 0.5, 1.0, 0.1, 2.0, 1.0);
    CHECK(b.re_v == doctest::Approx(10.0));
    CHECK(b.bound == doctest::Approx(2.0 * 1000.0 * 1e-3));  // C_s Re^3 nu^3 at r = L
    CHECK(b.lhs == doctest::Approx(10.0));
    CHECK(b.rhs == doctest::Approx(std::pow(2.0, -1.0 / 3.0) / 2.0));
    CHECK_FALSE(b.condition_ok);

    const SelfsimilarBound ok = selfsimilar_bound(0.01, 1.0, 0.5, 0.01, 1.0, 1.0, 1.0);
    CHECK(ok.condition_ok);

    // sampled slow-decay profile: L3 increment ratio stable over a decade
    const GridSpec g = grid_n(32);
    const Field prof = generate_selfsimilar_profile(g, 1.0, 1.0, 0.5);
    double lo = 1e300, hi = 0.0;
    for (double z : {0.1, 0.2, 0.4, 0.7, 1.0}) {
        const Field sh = translate(prof, Vec3{0.6 * z, 0.64 * z, 0.48 * z});
        std::vector<double> m3(g.point_count());
        for (std::size_t i = 0; i < g.point_count(); ++i) {
            double a2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double d =
                    sh.component(c).physical()[i] - prof.component(c).physical()[i];
                a2 += d * d;
            }
            m3[i] = std::pow(a2, 1.5);
        }
        const double ratio = std::cbrt(g.cell_volume() * pairwise_sum(m3)) / z;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("multifractal_bound: K41 point mass, atom integral, two-atom infimum") {
    const MultifractalAtom k41{1.0 / 3.0, 3.0, 1.0};
    CHECK(zeta_p_infimum(std::span(&k41, 1), 3.0) == doctest::Approx(1.0));

    const MultifractalBound mb = multifractal_bound(std::span(&k41, 1), 0.1, 1.0, 1.0, 0.1, 1.0);
    CHECK(mb.zeta_3 == doctest::Approx(1.0));
    CHECK(mb.c_mu == doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-12));

    const std::array<MultifractalAtom, 2> two = {MultifractalAtom{1.0 / 3.0, 3.0, 0.5},
                                                 MultifractalAtom{0.1, 2.5, 0.5}};
    CHECK(zeta_p_infimum(two, 3.0) == doctest::Approx(0.8));

    const MultifractalAtom bad{-0.1, 3.0, 1.0};
    CHECK_THROWS_AS((void)multifractal_bound(std::span(&bad, 1), 0.1, 1.0, 1.0, 0.1, 1.0),
                    ConfigError);
    const std::array<MultifractalAtom, 2> badmu = {MultifractalAtom{0.3, 3.0, 0.4},
                                                   MultifractalAtom{0.5, 2.0, 0.4}};
    CHECK_THROWS_AS((void)multifractal_bound(badmu, 0.1, 1.0, 1.0, 0.1, 1.0), ConfigError);
}

} // TEST_SUITE
