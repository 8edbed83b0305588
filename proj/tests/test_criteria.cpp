#include <doctest.h>

#include <cmath>

#include "nsrl/criteria.hpp"
#include "nsrl/generators.hpp"
#include "nsrl/reduce.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/solver.hpp"

using namespace nsrl;

namespace {

GridSpec grid_n(int n, double nu = 0.05) {
    GridSpec g;
    g.n = n;
    g.nu = nu;
    return g;
}

Field two_level_field(const GridSpec& g, double high, std::size_t high_cells) {
    RealBuffer c0(g.point_count()), c1(g.point_count()), c2(g.point_count());
    for (std::size_t i = 0; i < high_cells; ++i) c0[i] = high;
    return Field::from_physical(g, std::move(c0), std::move(c1), std::move(c2));
}

} // namespace

TEST_SUITE("criteria") {

TEST_CASE("worst_set_integral: constant field, two-level greedy, exhaustive search") {
    const double vol = 0.125;
    std::vector<double> ones(64, 1.0);
    for (double delta : {0.3, 1.0, 7.99}) {
        CHECK(worst_set_integral(ones, 3.0, delta, vol) == doctest::Approx(delta).epsilon(1e-14));
    }

    // two-level: value a on 10 cells, b < a elsewhere; budget inside the top level
    std::vector<double> two(64, 1.0);
    for (int i = 0; i < 10; ++i) two[i] = 3.0;
    const double delta = 7.5 * vol;
    CHECK(worst_set_integral(two, 3.0, delta, vol) == doctest::Approx(delta * 27.0).epsilon(1e-14));

    // exhaustive threshold-set search on an 8^3 grid
    const GridSpec g = grid_n(8);
    Rng rng(2);
    for (int field_i = 0; field_i < 10; ++field_i) {
        std::vector<double> samples(g.point_count());
        for (double& v : samples) v = rng.normal();
        const double cv = g.cell_volume();
        for (double frac : {0.001, 0.01, 0.1, 0.5, 0.999}) {
            const double d = frac * g.volume();
            const double greedy = worst_set_integral(samples, 3.0, d, cv);
            // exhaustive: every threshold set, pro-rated with the next value
            std::vector<double> powered(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
                powered[i] = std::pow(std::abs(samples[i]), 3.0);
            std::sort(powered.begin(), powered.end(), std::greater<double>());
            double best = 0.0;
            for (std::size_t m = 0; m <= powered.size(); ++m) {
                if (double(m) * cv > d) break;
                double value = 0.0;
                for (std::size_t i = 0; i < m; ++i) value += powered[i] * cv;
                if (m < powered.size()) value += (d - double(m) * cv < cv ? d - double(m) * cv : cv) * powered[m];
                best = std::max(best, value);
            }
            CHECK(std::abs(greedy - best) <= 1e-12 * std::max(1.0, best));
        }
    }

    CHECK_THROWS_AS((void)worst_set_integral(ones, 3.0, 0.0, vol), ConfigError);
}

TEST_CASE("worst_set curve inverse is the exact preimage") {
    std::vector<double> samples = {3.0, 1.0, 0.5, 0.0, 2.0, 0.1};
    const WorstSetCurve c = WorstSetCurve::build(samples, 1.0, 0.25);
    for (double target : {0.1, 0.4, 0.9, 1.3, 1.6}) {
        const double d = c.inverse(target);
        CHECK(c.query(d) <= target * (1.0 + 1e-12));
        if (d < c.total_volume()) CHECK(c.query(std::min(d + 1e-9, c.total_volume())) >= target - 1e-9);
    }
    CHECK(c.inverse(1e9) == doctest::Approx(c.total_volume()));
}

TEST_CASE("level_set_measure: trivial threshold, two-level saturation, set inclusion") {
    const GridSpec g = grid_n(16);
    const LevelSetResult trivially_empty = level_set_measure(two_level_field(g, 1.0, g.point_count()), 2.0, std::nullopt);
    CHECK(trivially_empty.measure == 0.0);
    CHECK(trivially_empty.chebyshev_bound == doctest::Approx(g.volume() / 4.0));

    // |u| = U on exactly K cells and 0 elsewhere saturates Chebyshev
    const std::size_t k_cells = 100;
    const double big_u = 2.5;
    const LevelSetResult sat = level_set_measure(two_level_field(g, big_u, k_cells), big_u, std::nullopt);
    CHECK(sat.measure == doctest::Approx(k_cells * g.cell_volume()).epsilon(1e-14));
    CHECK(sat.measure == doctest::Approx(sat.chebyshev_bound).epsilon(1e-12));

    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 44);
    const LevelSetResult joint = level_set_measure(u, 0.8, 1.2);
    CHECK(joint.joint_measure <= joint.measure);
    CHECK(joint.measure <= joint.chebyshev_bound);
    CHECK(joint.weak_l1_ratio >= 0.0);
}

TEST_CASE("lps_integral: exponent validation and constant-series value") {
    std::vector<double> t = {0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> norms(t.size(), 2.0);
    const CriterionReport rep = lps_integral(t, norms, 4.0, 6.0, "velocity");
    CHECK(rep.pass);
    CHECK(rep.params.at("integral") == doctest::Approx(2.0 * std::pow(2.0, 4.0)).epsilon(1e-14));

    CHECK_THROWS_AS((void)lps_integral(t, norms, 3.0, 6.0, "velocity"), ConfigError);
    CHECK_THROWS_AS((void)lps_integral(t, norms, 4.0, 3.0, "velocity"), ConfigError);
    CHECK_THROWS_AS((void)lps_integral(t, norms, 4.0, 1.2, "pressure"), ConfigError);

    const CriterionReport prep = lps_integral(t, norms, 0.0, 2.0, "pressure");
    CHECK(prep.params.at("exponent") == doctest::Approx(4.0));  // 2q/(2q-3) at q=2

    // time-quadrature refinement: halving the stride moves a smooth integral < 1%
    std::vector<double> tf, ff, tc, fc;
    for (int i = 0; i <= 64; ++i) {
        const double ti = 2.0 * i / 64.0;
        tf.push_back(ti);
        ff.push_back(1.0 + 0.3 * std::sin(ti));
    }
    for (int i = 0; i <= 32; ++i) {
        const double ti = 2.0 * i / 32.0;
        tc.push_back(ti);
        fc.push_back(1.0 + 0.3 * std::sin(ti));
    }
    const double mf = lps_integral(tf, ff, 4.0, 6.0, "velocity").params.at("integral");
    const double mc = lps_integral(tc, fc, 4.0, 6.0, "velocity").params.at("integral");
    CHECK(std::abs(mf - mc) <= 0.01 * mf);
}

TEST_CASE("certificates: zero-integral base case and closed-form factors") {
    std::vector<double> t = {0.0, 1.0};
    std::vector<double> ens = {4.0, 4.0};
    Constants c;

    std::vector<double> zero_norms = {0.0, 0.0};
    const CriterionReport q0 = certificate_quanta_v(t, ens, zero_norms, 6.0, 1.0, c);
    CHECK(q0.pass);
    CHECK(q0.points.back().bound == doctest::Approx(4.0));  // exp(0) = 1
    CHECK(q0.required_c == 0.0);

    // gradL3 with C = 1, nu = 1, N = 1: bound factor e
    std::vector<double> gl3 = {1.0, 1.0};
    const CriterionReport gr = certificate_grad_l3(t, ens, gl3, 1.0, c);
    CHECK(gr.params.at("N") == doctest::Approx(1.0));
    CHECK(gr.points.back().bound == doctest::Approx(4.0 * std::exp(1.0)).epsilon(1e-14));

    const CriterionReport l32 = certificate_lambda32(t, ens, gl3, 0.5, c);
    CHECK(l32.points.back().bound == doctest::Approx(4.0 * std::exp(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS((void)certificate_quanta_v(t, ens, zero_norms, 3.0, 1.0, c), ConfigError);
}

TEST_CASE("certificates: monotone in the integral input, antitone in viscosity") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const double e0 = rng.uniform(0.5, 5.0);
        const double m1 = rng.uniform(0.1, 2.0);
        const double m2 = m1 + rng.uniform(0.1, 2.0);
        const double nu1 = rng.uniform(0.05, 0.5);
        const double nu2 = nu1 + rng.uniform(0.05, 0.5);
        std::vector<double> t = {0.0, 1.0};
        std::vector<double> ens = {e0, e0};
        Constants c;
        auto bound_at = [&](double m, double nu) {
            std::vector<double> series = {m, m};
            return certificate_lambda32(t, ens, series, nu, c).points.back().bound;
        };
        CHECK(bound_at(m2, nu1) >= bound_at(m1, nu1));
        CHECK(bound_at(m1, nu2) <= bound_at(m1, nu1));

        auto vbound = [&](double scale, double nu) {
            std::vector<double> series = {scale * e0, scale * e0};
            return certificate_vcond(t, series, nu, c).points.back().bound / (scale * e0);
        };
        CHECK(vbound(2.0, nu1) >= vbound(1.0, nu1));
        CHECK(vbound(1.0, nu2) <= vbound(1.0, nu1));
    }
}

TEST_CASE("foias: crossover time matches a root-finding oracle") {
    std::vector<double> t = {0.0, 0.5, 1.0};
    std::vector<double> ens = {1.5, 1.2, 1.0};
    Constants c;
    const double u0_l2 = 2.0, nu = 0.3, delta = 0.7;
    const FoiasCertificate fc = certificate_foias(t, ens, {}, u0_l2, nu, c, delta);
    CHECK(fc.report.pass);
    const double e0 = ens[0];
    auto exp_branch = [&](double s) { return e0 * std::exp(s * u0_l2 * u0_l2 / (delta * nu)); };
    const double const_branch = e0 + 2.0 * std::pow(u0_l2, 4.0) / (delta * nu * nu);
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (exp_branch(mid) < const_branch ? lo : hi) = mid;
    }
    CHECK(fc.crossover_time == doctest::Approx(lo).epsilon(1e-9));
    CHECK(exp_branch(fc.crossover_time) == doctest::Approx(const_branch).epsilon(1e-9));
}

TEST_CASE("foias: measured-delta policy on a real trajectory") {
    const GridSpec g = grid_n(16, 0.1);
    SolverConfig sc;
    sc.dt = 5e-3;
    sc.t_end = 0.2;
    sc.snapshot_stride = 10;
    const Trajectory traj = simulate(generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 77), sc);
    const std::vector<double> ens = snapshot_enstrophy(traj);
    Constants c;
    const FoiasCertificate fc =
        certificate_foias(traj.snapshot_times, ens, snapshot_u3_curves(traj),
                          norm_lp(traj.snapshots.front(), 2.0), g.nu, c);
    CHECK(fc.delta > 0.0);
    CHECK(fc.report.pass);
    CHECK(fc.report.required_c <= 1.0);
}

TEST_CASE("pressure_lr and s2_lq and region_lq closed forms") {
    std::vector<double> t = {0.0, 1.0};
    std::vector<double> norms = {2.0, 2.0};
    Constants c;
    const double nu = 0.5, u0_l2 = 1.5;

    const CriterionReport pr =
        certificate_pressure_lr(t, norms, {}, 4.0, u0_l2, nu, c, 0.25);
    CHECK(pr.points.back().bound ==
          doctest::Approx(2.0 * std::exp(1.0 * u0_l2 * u0_l2 / (nu * 0.25))).epsilon(1e-13));
    CHECK_THROWS_AS((void)certificate_pressure_lr(t, norms, {}, 3.0, u0_l2, nu, c, 0.25),
                    ConfigError);

    std::vector<double> r_t = {0.5, 0.5};
    const CriterionReport s2r = certificate_s2_lq(t, norms, r_t, 4.0, 0.3, u0_l2, nu, c);
    CHECK(s2r.params.at("gamma_T") == doctest::Approx(std::sqrt(1.0 / std::pow(0.5, 4.0))));
    const double expected_arg = 1.0 * u0_l2 * u0_l2 / (nu * 0.3) +
                                std::pow(nu, -1.5) * u0_l2 * u0_l2 * s2r.params.at("gamma_T");
    CHECK(s2r.points.back().bound == doctest::Approx(2.0 * std::exp(expected_arg)).epsilon(1e-12));

    std::vector<double> u_t = {1.0, 1.0}, g_t = {2.0, 2.0};
    const CriterionReport rr = certificate_region_lq(t, norms, u_t, g_t, r_t, 4.0, u0_l2, nu, c);
    const double x = 1.0 / nu + 2.0 + std::pow(nu, -1.5) * u0_l2 * u0_l2 * 4.0;  // int U^2/nu + int G + ...
    CHECK(rr.points.back().bound == doctest::Approx(2.0 * std::exp(x)).epsilon(1e-12));
}

TEST_CASE("kolmogorov scale formula and s2cond monitor basics") {
    CHECK(kolmogorov_eta(0.1, 0.1) == doctest::Approx(0.31623).epsilon(1e-4));
    CHECK(std::abs(kolmogorov_eta(0.1, 0.1) - std::pow(1e-2, 0.25)) <= 1e-15);

    // constant-field trajectory: S2 = 0, fixed-r integral = T r^-4
    const GridSpec g = grid_n(16, 0.1);
    Trajectory traj;
    traj.grid = g;
    const Field cf = two_level_field(g, 1.0, g.point_count());
    traj.snapshots.push_back(cf);
    traj.snapshots.push_back(cf);
    traj.snapshot_times = {0.0, 2.0};
    RPolicy pol;
    pol.kind = RPolicy::Fixed;
    pol.fixed_r = 0.25;
    Constants c;
    const CriterionReport rep = s2cond_monitor(traj, pol, 0.1, c, 16);
    CHECK(rep.pass);
    for (const CriterionPoint& pt : rep.points) CHECK(pt.measured <= 1e-20);
    CHECK(rep.params.at("integral_r_minus4") ==
          doctest::Approx(2.0 * std::pow(0.25, -4.0)).epsilon(1e-12));
}

TEST_CASE("region_increment_check: empty set, constant field, brute-force offsets") {
    const GridSpec g = grid_n(16, 0.05);
    Constants c;
    const Field cf = two_level_field(g, 1.0, g.point_count());
    const CriterionReport empty_b = region_increment_check(cf, 5.0, 1.0, 1.0, c);
    CHECK(empty_b.points[0].measured <= 1e-20);
    CHECK(empty_b.pass);
    const CriterionReport const_u = region_increment_check(cf, 0.5, 1e-10, 1.0, c, 12, 4, 8);
    CHECK(const_u.points[0].measured <= 1e-20);

    const Field u = generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 12);
    const double big_u = 0.8, big_g = 1.0, r = 1.2;
    const double delta = r / 16.0;
    const CriterionReport impl =
        region_increment_check(u, big_u, big_g, r, c, 48, 8, 16, 2.0 * delta / r, false);

    const GridMask mask = super_level_mask(u, big_u, big_g);
    const double vol = g.cell_volume();
    double acc = 0.0;
    const int m_max = 18;
    for (int iz = -m_max; iz <= m_max; ++iz)
        for (int iy = -m_max; iy <= m_max; ++iy)
            for (int ix = -m_max; ix <= m_max; ++ix) {
                if (!ix && !iy && !iz) continue;
                const Vec3 y{ix * delta, iy * delta, iz * delta};
                const double rho = norm(y);
                if (rho > r + delta || rho < delta) continue;
                int cnt = 0;
                const int sub = 3;
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b)
                        for (int cc = 0; cc < sub; ++cc) {
                            const Vec3 yy{y[0] + ((a + 0.5) / sub - 0.5) * delta,
                                          y[1] + ((b + 0.5) / sub - 0.5) * delta,
                                          y[2] + ((cc + 0.5) / sub - 0.5) * delta};
                            const double rr = norm(yy);
                            if (rr > 2.0 * delta && rr <= r) ++cnt;
                        }
                if (!cnt) continue;
                const Field sh = translate(u, y);
                std::vector<double> m3(g.point_count(), 0.0);
                for (std::size_t i = 0; i < g.point_count(); ++i) {
                    if (!mask[i]) continue;
                    double a2 = 0.0;
                    for (int comp = 0; comp < 3; ++comp) {
                        const double d = sh.component(comp).physical()[i] -
                                         u.component(comp).physical()[i];
                        a2 += d * d;
                    }
                    m3[i] = std::pow(a2, 1.5);
                }
                const double inner = vol * pairwise_sum(m3);
                acc += std::pow(inner, 2.0 / 3.0) / (rho * rho * rho) *
                       (double(cnt) / (sub * sub * sub)) * delta * delta * delta;
            }
    CHECK(std::abs(impl.points[0].measured - acc) <= 1e-2 * acc);
}

TEST_CASE("trajectory norm helpers are consistent with direct evaluation") {
    const GridSpec g = grid_n(16, 0.1);
    SolverConfig sc;
    sc.dt = 5e-3;
    sc.t_end = 0.05;
    sc.snapshot_stride = 5;
    const Trajectory traj = simulate(generate_random_divfree(g, -5.0 / 3.0, 1, 4, 1.0, 50), sc);
    const std::vector<double> lq = snapshot_norm_lq(traj, 6.0);
    CHECK(lq.front() == doctest::Approx(norm_lp(traj.snapshots.front(), 6.0)));
    const std::vector<double> ens = snapshot_enstrophy(traj);
    const double v = norm_v(traj.snapshots.front());
    CHECK(ens.front() == doctest::Approx(v * v));
    const std::vector<WorstSetCurve> curves = snapshot_p32_curves(traj);
    CHECK(curves.size() == traj.snapshots.size());
}

} // TEST_SUITE
