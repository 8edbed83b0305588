#include "nsrl/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsrl/errors.hpp"
#include "nsrl/pressure.hpp"
#include "nsrl/reduce.hpp"

namespace nsrl {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double safe_exp(double x) { return x > 709.0 ? inf : std::exp(x); }

/// Fills points/pass/required_c for bound(t) = base * exp(c * x(t)) in log
/// space, where x is nonnegative and nondecreasing.
CriterionReport exponential_certificate(const std::string& id, std::span<const double> t,
                                        std::span<const double> measured, double base,
                                        std::span<const double> x, double c_used) {
    CriterionReport rep;
    rep.id = id;
    rep.required_c = 0.0;
    const double log_base = base > 0.0 ? std::log(base) : -inf;
    for (std::size_t i = 0; i < t.size(); ++i) {
        CriterionPoint pt;
        pt.t = t[i];
        pt.measured = measured[i];
        const double log_bound = log_base + c_used * x[i];
        pt.bound = base * safe_exp(c_used * x[i]);
        const double log_meas = measured[i] > 0.0 ? std::log(measured[i]) : -inf;
        pt.pass = log_meas <= log_bound;
        pt.ratio = std::isinf(pt.bound) ? 0.0 : (pt.bound > 0.0 ? measured[i] / pt.bound : 0.0);
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
        if (log_meas > log_base) {
            const double excess = log_meas - log_base;
            rep.required_c = x[i] > 0.0 ? std::max(rep.required_c, excess / x[i]) : inf;
        }
    }
    rep.params["c_used"] = c_used;
    return rep;
}

void check_series(std::span<const double> t, std::initializer_list<std::size_t> sizes,
                  const char* what) {
    if (t.size() < 2) throw ConfigError(std::string(what) + ": need at least two times");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw ConfigError(std::string(what) + ": times must increase");
    for (std::size_t s : sizes)
        if (s != t.size()) throw ConfigError(std::string(what) + ": series length mismatch");
}

} // namespace

std::vector<double> trapezoid_prefix(std::span<const double> t, std::span<const double> f) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    return out;
}

// ---- worst set ----

WorstSetCurve WorstSetCurve::build(std::span<const double> samples, double exponent,
                                   double cell_volume) {
    if (!(cell_volume > 0.0)) throw ConfigError("WorstSetCurve: cell volume must be positive");
    WorstSetCurve c;
    c.cell_volume = cell_volume;
    c.values.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        c.values[i] = std::pow(std::abs(samples[i]), exponent);
    std::sort(c.values.begin(), c.values.end(), std::greater<double>());
    c.prefix.resize(c.values.size() + 1);
    c.prefix[0] = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i)
        c.prefix[i + 1] = c.prefix[i] + c.values[i] * cell_volume;
    return c;
}

double WorstSetCurve::query(double delta) const {
    if (!(delta > 0.0)) throw ConfigError("worst_set_integral: delta must be positive");
    const double cap = total_volume();
    if (delta >= cap) return prefix.back();
    const std::size_t full = static_cast<std::size_t>(delta / cell_volume);
    const double rest = delta - full * cell_volume;
    return prefix[full] + rest * values[full];
}

double WorstSetCurve::inverse(double target) const {
    if (target <= 0.0) return 0.0;
    if (target >= prefix.back()) return total_volume();
    // find the segment where the running integral crosses the target
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
    const std::size_t seg = static_cast<std::size_t>(it - prefix.begin()) - 1;
    const double v = values[seg];
    if (v <= 0.0) return (seg + 1) * cell_volume;  // flat segment, extend through it
    return seg * cell_volume + (target - prefix[seg]) / v;
}

double worst_set_integral(std::span<const double> samples, double exponent, double delta,
                          double cell_volume) {
    return WorstSetCurve::build(samples, exponent, cell_volume).query(delta);
}

// ---- level sets ----

GridMask super_level_mask(const Field& u, double big_u, std::optional<double> big_g) {
    if (!(big_u > 0.0)) throw ConfigError("level_set: U must be positive");
    const std::vector<double> mag = magnitude_samples(u);
    GridMask mask(mag.size());
    if (big_g) {
        if (!(*big_g > 0.0)) throw ConfigError("level_set: G must be positive");
        const std::vector<double> grad = gradient_magnitude_samples(u);
        for (std::size_t i = 0; i < mag.size(); ++i)
            mask[i] = mag[i] >= big_u && grad[i] >= *big_g;
    } else {
        for (std::size_t i = 0; i < mag.size(); ++i) mask[i] = mag[i] >= big_u;
    }
    return mask;
}

LevelSetResult level_set_measure(const Field& u, double big_u, std::optional<double> big_g) {
    if (!(big_u > 0.0)) throw ConfigError("level_set_measure: U must be positive");
    const GridSpec& grid = u.grid();
    const double vol = grid.cell_volume();
    const std::vector<double> mag = magnitude_samples(u);

    LevelSetResult res;
    std::size_t count = 0;
    for (double m : mag)
        if (m >= big_u) ++count;
    res.measure = count * vol;
    const double l2sq = pairwise_sum(std::size_t{0}, mag.size(),
                                     [&](std::size_t i) { return mag[i] * mag[i]; }) *
                        vol;
    res.chebyshev_bound = l2sq / (big_u * big_u);
    if (res.measure > res.chebyshev_bound)
        throw NumericalError("level_set_measure: Chebyshev bound violated (impossible)");

    if (big_g) {
        if (!(*big_g > 0.0)) throw ConfigError("level_set_measure: G must be positive");
        const std::vector<double> grad = gradient_magnitude_samples(u);
        std::size_t joint = 0, gcount = 0;
        for (std::size_t i = 0; i < mag.size(); ++i) {
            if (grad[i] >= *big_g) {
                ++gcount;
                if (mag[i] >= big_u) ++joint;
            }
        }
        res.joint_measure = joint * vol;
        res.grad_measure = gcount * vol;
        const Field omega = curl(u);
        const double omega_l1 = norm_lp(omega, 1.0);
        res.weak_l1_ratio = omega_l1 > 0.0 ? (*big_g) * res.grad_measure / omega_l1 : 0.0;
    }
    return res;
}

// ---- LPS ----

CriterionReport lps_integral(std::span<const double> t, std::span<const double> norms, double p,
                             double q, const std::string& subject) {
    check_series(t, {norms.size()}, "lps_integral");
    double exponent;
    if (subject == "velocity") {
        if (!(q > 3.0)) throw ConfigError("lps_integral: velocity requires q > 3");
        const double lhs = 2.0 / p + (std::isinf(q) ? 0.0 : 3.0 / q);
        if (std::abs(lhs - 1.0) > 1e-12)
            throw ConfigError("lps_integral: exponents must satisfy 2/p + 3/q = 1");
        exponent = p;
    } else if (subject == "pressure") {
        if (!(q > 1.5)) throw ConfigError("lps_integral: pressure requires q > 3/2");
        exponent = 2.0 * q / (2.0 * q - 3.0);
    } else {
        throw ConfigError("lps_integral: subject must be velocity or pressure");
    }

    std::vector<double> integrand(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) integrand[i] = std::pow(norms[i], exponent);
    const std::vector<double> prefix = trapezoid_prefix(t, integrand);

    CriterionReport rep;
    rep.id = "lps_" + subject;
    for (std::size_t i = 0; i < t.size(); ++i) {
        CriterionPoint pt;
        pt.t = t[i];
        pt.measured = prefix[i];
        pt.bound = inf;
        pt.ratio = 0.0;
        pt.pass = std::isfinite(prefix[i]);
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
    }
    rep.params["p"] = p;
    rep.params["q"] = q;
    rep.params["exponent"] = exponent;
    rep.params["integral"] = prefix.back();
    return rep;
}

// ---- exponential certificates ----

CriterionReport certificate_quanta_v(std::span<const double> t,
                                     std::span<const double> enstrophy,
                                     std::span<const double> lq_norms, double q, double nu,
                                     const Constants& constants) {
    check_series(t, {enstrophy.size(), lq_norms.size()}, "certificate_quanta_v");
    if (!(q > 3.0)) throw ConfigError("certificate_quanta_v: requires q > 3");
    std::vector<double> integrand(lq_norms.size());
    for (std::size_t i = 0; i < lq_norms.size(); ++i)
        integrand[i] = std::pow(lq_norms[i], 2.0 * q / (q - 3.0));
    std::vector<double> x = trapezoid_prefix(t, integrand);
    const double visc = std::pow(nu, -(q + 3.0) / (q - 3.0));
    for (double& v : x) v *= visc;
    CriterionReport rep = exponential_certificate("quantaV", t, enstrophy, enstrophy[0], x,
                                                  constants.c_absolute);
    rep.params["q"] = q;
    rep.params["nu"] = nu;
    rep.params["M_pq"] = x.back() / visc;
    return rep;
}

CriterionReport certificate_vcond(std::span<const double> t, std::span<const double> enstrophy,
                                  double nu, const Constants& constants) {
    check_series(t, {enstrophy.size()}, "certificate_vcond");
    std::vector<double> integrand(enstrophy.size());
    for (std::size_t i = 0; i < enstrophy.size(); ++i)
        integrand[i] = enstrophy[i] * enstrophy[i];  // ||u||_V^4
    std::vector<double> x = trapezoid_prefix(t, integrand);
    for (double& v : x) v *= std::pow(nu, -3.0);
    CriterionReport rep =
        exponential_certificate("vcond", t, enstrophy, enstrophy[0], x, constants.c_absolute);
    rep.params["nu"] = nu;
    rep.params["M_V"] = x.back() * std::pow(nu, 3.0);
    return rep;
}

CriterionReport certificate_grad_l3(std::span<const double> t, std::span<const double> enstrophy,
                                    std::span<const double> grad_l3_sq, double nu,
                                    const Constants& constants) {
    check_series(t, {enstrophy.size(), grad_l3_sq.size()}, "certificate_grad_l3");
    std::vector<double> x = trapezoid_prefix(t, grad_l3_sq);
    for (double& v : x) v /= nu;
    CriterionReport rep =
        exponential_certificate("gradL3", t, enstrophy, enstrophy[0], x, constants.c_absolute);
    rep.params["nu"] = nu;
    rep.params["N"] = x.back() * nu;
    return rep;
}

CriterionReport certificate_lambda32(std::span<const double> t, std::span<const double> enstrophy,
                                     std::span<const double> lambda32_sq, double nu,
                                     const Constants& constants) {
    check_series(t, {enstrophy.size(), lambda32_sq.size()}, "certificate_lambda32");
    std::vector<double> x = trapezoid_prefix(t, lambda32_sq);
    for (double& v : x) v /= nu;
    CriterionReport rep =
        exponential_certificate("lambda32", t, enstrophy, enstrophy[0], x, constants.c_absolute);
    rep.params["nu"] = nu;
    rep.params["M"] = x.back() * nu;
    return rep;
}

CriterionReport certificate_lambda12_growth(std::span<const double> t,
                                            std::span<const double> hdot_half,
                                            std::span<const double> lambda32_sq,
                                            const Constants& constants) {
    check_series(t, {hdot_half.size(), lambda32_sq.size()}, "certificate_lambda12_growth");
    const std::vector<double> x = trapezoid_prefix(t, lambda32_sq);
    CriterionReport rep;
    rep.id = "lambda12_growth";
    rep.required_c = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        CriterionPoint pt;
        pt.t = t[i];
        pt.measured = hdot_half[i];
        pt.bound = hdot_half[0] + constants.c_absolute * x[i];
        pt.ratio = pt.bound > 0.0 ? pt.measured / pt.bound : 0.0;
        pt.pass = pt.measured <= pt.bound;
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
        if (pt.measured > hdot_half[0] && x[i] > 0.0)
            rep.required_c = std::max(rep.required_c, (pt.measured - hdot_half[0]) / x[i]);
        else if (pt.measured > hdot_half[0])
            rep.required_c = inf;
    }
    rep.params["c_used"] = constants.c_absolute;
    return rep;
}

// ---- foias two-branch bound ----

namespace {

double min_admissible_delta(std::span<const WorstSetCurve> curves, double threshold) {
    double delta = inf;
    for (const auto& c : curves) delta = std::min(delta, c.inverse(threshold));
    return delta;
}

struct FoiasEval {
    bool pass = true;
    std::vector<double> bound;
};

FoiasEval eval_foias(std::span<const double> t, std::span<const double> enstrophy, double delta,
                     double u0_l2, double nu) {
    FoiasEval ev;
    ev.bound.resize(t.size());
    const double e0 = enstrophy[0];
    const double const_branch = e0 + 2.0 * std::pow(u0_l2, 4.0) / (delta * nu * nu);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double exp_branch = e0 * safe_exp(t[i] * u0_l2 * u0_l2 / (delta * nu));
        ev.bound[i] = std::min(exp_branch, const_branch);
        if (enstrophy[i] > ev.bound[i]) ev.pass = false;
    }
    return ev;
}

} // namespace

FoiasCertificate certificate_foias(std::span<const double> t, std::span<const double> enstrophy,
                                   std::span<const WorstSetCurve> u3_curves, double u0_l2,
                                   double nu, const Constants& constants,
                                   std::optional<double> delta_override) {
    check_series(t, {enstrophy.size()}, "certificate_foias");
    if (!delta_override && u3_curves.size() != t.size())
        throw ConfigError("certificate_foias: need one |u|^3 curve per time");

    auto delta_for = [&](double c) {
        if (delta_override) return *delta_override;
        const double threshold = std::pow(nu / (2.0 * c), 3.0);
        return min_admissible_delta(u3_curves, threshold);
    };

    FoiasCertificate out;
    const double c_used = constants.c_absolute;
    out.delta = delta_for(c_used);
    if (!(out.delta > 0.0))
        throw NumericalError("certificate_foias: no positive admissible delta at the given C");

    const FoiasEval ev = eval_foias(t, enstrophy, out.delta, u0_l2, nu);
    CriterionReport& rep = out.report;
    rep.id = "foias";
    for (std::size_t i = 0; i < t.size(); ++i) {
        CriterionPoint pt;
        pt.t = t[i];
        pt.measured = enstrophy[i];
        pt.bound = ev.bound[i];
        pt.ratio = std::isinf(pt.bound) ? 0.0 : (pt.bound > 0.0 ? pt.measured / pt.bound : 0.0);
        pt.pass = pt.measured <= pt.bound;
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
    }

    // smallest C validating all times (delta responds to C unless overridden)
    auto passes = [&](double c) {
        const double d = delta_for(c);
        if (!(d > 0.0)) return false;
        return eval_foias(t, enstrophy, d, u0_l2, nu).pass;
    };
    if (passes(1e-12)) {
        rep.required_c = 0.0;
    } else {
        double hi = 1.0;
        while (!passes(hi) && hi < 1e12) hi *= 2.0;
        if (hi >= 1e12) {
            rep.required_c = inf;
        } else {
            double lo = 1e-12;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (passes(mid) ? hi : lo) = mid;
            }
            rep.required_c = hi;
        }
    }

    out.crossover_time = (out.delta * nu / (u0_l2 * u0_l2)) *
                         std::log1p(2.0 * std::pow(u0_l2, 4.0) /
                                    (out.delta * nu * nu * enstrophy[0]));
    rep.params["delta"] = out.delta;
    rep.params["crossover_time"] = out.crossover_time;
    rep.params["c_used"] = c_used;
    rep.params["nu"] = nu;
    return out;
}

CriterionReport certificate_pressure_lr(std::span<const double> t,
                                        std::span<const double> lr_norms,
                                        std::span<const WorstSetCurve> p32_curves, double lr,
                                        double u0_l2, double nu, const Constants& constants,
                                        std::optional<double> delta_override) {
    check_series(t, {lr_norms.size()}, "certificate_pressure_lr");
    if (!(lr >= 4.0)) throw ConfigError("certificate_pressure_lr: requires exponent >= 4");
    if (!delta_override && p32_curves.size() != t.size())
        throw ConfigError("certificate_pressure_lr: need one |p|^{3/2} curve per time");

    const double c_used = constants.c_absolute;
    const double delta = delta_override
                             ? *delta_override
                             : min_admissible_delta(p32_curves, std::pow(nu / c_used, 3.0));
    if (!(delta > 0.0))
        throw NumericalError("certificate_pressure_lr: no positive admissible delta");

    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = t[i] * u0_l2 * u0_l2 / (nu * delta);
    CriterionReport rep =
        exponential_certificate("pressure_lr", t, lr_norms, lr_norms[0], x, c_used);
    rep.params["r"] = lr;
    rep.params["delta"] = delta;
    rep.params["nu"] = nu;
    return rep;
}

CriterionReport certificate_s2_lq(std::span<const double> t, std::span<const double> lq_norms,
                                  std::span<const double> r_of_t, double q, double delta,
                                  double u0_l2, double nu, const Constants& constants) {
    check_series(t, {lq_norms.size(), r_of_t.size()}, "certificate_s2_lq");
    if (!(q >= 4.0)) throw ConfigError("certificate_s2_lq: requires q >= 4");
    if (!(delta > 0.0)) throw ConfigError("certificate_s2_lq: delta must be positive");

    std::vector<double> rm4(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) rm4[i] = std::pow(r_of_t[i], -4.0);
    const std::vector<double> gamma_sq = trapezoid_prefix(t, rm4);

    CriterionReport rep;
    rep.id = "s2_lq";
    const double base = lq_norms[0];
    const double log_base = base > 0.0 ? std::log(base) : -inf;
    const double c_used = constants.c_absolute;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double gamma = std::sqrt(gamma_sq[i]);
        const double fixed_part = std::pow(nu, -1.5) * u0_l2 * u0_l2 * gamma;
        const double c_part = t[i] * u0_l2 * u0_l2 / (nu * delta);
        CriterionPoint pt;
        pt.t = t[i];
        pt.measured = lq_norms[i];
        pt.bound = base * safe_exp(c_used * c_part + fixed_part);
        const double log_meas = pt.measured > 0.0 ? std::log(pt.measured) : -inf;
        pt.pass = log_meas <= log_base + c_used * c_part + fixed_part;
        pt.ratio = std::isinf(pt.bound) ? 0.0 : (pt.bound > 0.0 ? pt.measured / pt.bound : 0.0);
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
        if (log_meas > log_base + fixed_part) {
            const double excess = log_meas - log_base - fixed_part;
            rep.required_c = c_part > 0.0 ? std::max(rep.required_c, excess / c_part) : inf;
        }
    }
    rep.params["q"] = q;
    rep.params["delta"] = delta;
    rep.params["nu"] = nu;
    rep.params["gamma_T"] = std::sqrt(gamma_sq.back());
    rep.params["c_used"] = c_used;
    return rep;
}

CriterionReport certificate_region_lq(std::span<const double> t, std::span<const double> lq_norms,
                                      std::span<const double> u_of_t,
                                      std::span<const double> g_of_t,
                                      std::span<const double> r_of_t, double q, double u0_l2,
                                      double nu, const Constants& constants) {
    check_series(t, {lq_norms.size(), u_of_t.size(), g_of_t.size(), r_of_t.size()},
                 "certificate_region_lq");
    if (!(q >= 4.0)) throw ConfigError("certificate_region_lq: requires q >= 4");

    std::vector<double> u2(t.size()), rm4(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        u2[i] = u_of_t[i] * u_of_t[i];
        rm4[i] = std::pow(r_of_t[i], -4.0);
    }
    const std::vector<double> iu2 = trapezoid_prefix(t, u2);
    const std::vector<double> ig = trapezoid_prefix(t, g_of_t);
    const std::vector<double> ir4 = trapezoid_prefix(t, rm4);

    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        x[i] = iu2[i] / nu + ig[i] + std::pow(nu, -1.5) * u0_l2 * u0_l2 * std::sqrt(ir4[i]);
    CriterionReport rep =
        exponential_certificate("region_lq", t, lq_norms, lq_norms[0], x, constants.c_absolute);
    rep.params["q"] = q;
    rep.params["nu"] = nu;
    return rep;
}

// ---- structure-function condition monitor ----

double kolmogorov_eta(double nu, double dissipation) {
    if (!(nu > 0.0) || !(dissipation > 0.0))
        throw ConfigError("kolmogorov_eta: nu and dissipation must be positive");
    return std::pow(nu * nu * nu / dissipation, 0.25);
}

CriterionReport s2cond_monitor(const Trajectory& traj, const RPolicy& policy, double delta,
                               const Constants& constants, int n_rad) {
    if (traj.snapshots.empty()) throw ConfigError("s2cond_monitor: empty trajectory");
    if (!(delta > 0.0)) throw ConfigError("s2cond_monitor: delta must be positive");
    if (policy.kind == RPolicy::Custom && policy.custom_r.size() != traj.snapshots.size())
        throw ConfigError("s2cond_monitor: custom r(t) length mismatch");

    const GridSpec& grid = traj.grid;
    const double nu = grid.nu;
    const double c = constants.c_absolute;
    const double bound = std::pow(nu / c, 3.0);

    CriterionReport rep;
    rep.id = "s2cond";
    std::vector<double> r_series(traj.snapshots.size());
    double max_meas = 0.0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const Field& u = traj.snapshots[i];
        double r_t;
        switch (policy.kind) {
            case RPolicy::Fixed: r_t = policy.fixed_r; break;
            case RPolicy::Custom: r_t = policy.custom_r[i]; break;
            case RPolicy::Kolmogorov:
            default: {
                const double ens = norm_v(u);
                const double eps = nu * ens * ens / grid.volume();
                r_t = kolmogorov_eta(nu, eps);
                break;
            }
        }
        if (!(r_t > 0.0) || r_t >= grid.domain_length / 8.0)
            throw NumericalError("s2cond_monitor: r(t) outside (0, L/8)");
        r_series[i] = r_t;

        const std::vector<double> s2 = cumulative_s2_field(u, 2.0 * r_t, n_rad);
        const double measured = worst_set_integral(s2, 1.5, delta, grid.cell_volume());
        max_meas = std::max(max_meas, measured);

        CriterionPoint pt;
        pt.t = traj.snapshot_times[i];
        pt.measured = measured;
        pt.bound = bound;
        pt.ratio = bound > 0.0 ? measured / bound : 0.0;
        pt.pass = measured <= bound;
        rep.points.push_back(pt);
        rep.pass = rep.pass && pt.pass;
    }

    // condition type: passes for C <= required_c
    rep.required_c = max_meas > 0.0 ? nu / std::cbrt(max_meas) : inf;
    rep.params["condition_type"] = 1.0;
    rep.params["delta"] = delta;
    rep.params["c_used"] = c;
    rep.params["nu"] = nu;
    if (traj.snapshot_times.size() >= 2) {
        std::vector<double> rm4(r_series.size());
        for (std::size_t i = 0; i < r_series.size(); ++i) rm4[i] = std::pow(r_series[i], -4.0);
        rep.params["integral_r_minus4"] =
            trapezoid_prefix(traj.snapshot_times, rm4).back();
        rep.params["gamma_T"] = std::sqrt(rep.params["integral_r_minus4"]);
    }
    return rep;
}

CriterionReport region_increment_check(const Field& u, double big_u, double big_g, double r,
                                       const Constants& constants, int n_rad, int n_theta,
                                       int n_phi, double rho_min_factor,
                                       bool extrapolate_inner) {
    const GridSpec& grid = u.grid();
    if (!(r > 0.0) || r >= 0.25 * grid.domain_length)
        throw ConfigError("region_increment_check: r outside (0, L/4)");

    const GridMask mask = super_level_mask(u, big_u, big_g);
    const SphereQuadrature quad = SphereQuadrature::product_gauss(n_theta, n_phi);
    const RadialGrid shells = RadialGrid::logarithmic(rho_min_factor * r, r, n_rad);
    const double vol = grid.cell_volume();
    const std::size_t count = grid.point_count();
    const double* up[3] = {u.component(0).physical(), u.component(1).physical(),
                           u.component(2).physical()};

    std::vector<double> f(shells.rho.size());
    std::vector<double> node_vals(quad.size());
    for (std::size_t m = 0; m < shells.rho.size(); ++m) {
        const double rho = shells.rho[m];
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Vec3 y = rho * quad.nodes[j];
            const Field shifted = translate(u, y);
            const double* sp[3] = {shifted.component(0).physical(),
                                   shifted.component(1).physical(),
                                   shifted.component(2).physical()};
            const double inner =
                vol * pairwise_sum(std::size_t{0}, count, [&](std::size_t i) {
                    if (!mask[i]) return 0.0;
                    const double d0 = sp[0][i] - up[0][i];
                    const double d1 = sp[1][i] - up[1][i];
                    const double d2 = sp[2][i] - up[2][i];
                    return std::pow(d0 * d0 + d1 * d1 + d2 * d2, 1.5);
                });
            node_vals[j] = quad.weights[j] * std::pow(inner, 2.0 / 3.0);
        }
        f[m] = pairwise_sum(node_vals) / (4.0 * 3.14159265358979323846264338328);
    }

    const double four_pi = 4.0 * 3.14159265358979323846264338328;
    const double j_integral =
        four_pi * (trapezoid_dlog(shells.rho, f) + (extrapolate_inner ? 0.5 * f[0] : 0.0));
    const double nu = grid.nu;
    const double c = constants.c_absolute;
    const double bound = (nu / c) * (nu / c);

    CriterionReport rep;
    rep.id = "region_increment";
    CriterionPoint pt;
    pt.t = 0.0;
    pt.measured = j_integral;
    pt.bound = bound;
    pt.ratio = bound > 0.0 ? j_integral / bound : 0.0;
    pt.pass = j_integral <= bound;
    rep.points.push_back(pt);
    rep.pass = pt.pass;
    rep.required_c = j_integral > 0.0 ? nu / std::sqrt(j_integral) : inf;
    rep.params["condition_type"] = 1.0;
    rep.params["U"] = big_u;
    rep.params["G"] = big_g;
    rep.params["r"] = r;
    rep.params["set_measure"] = [&] {
        std::size_t cnt = 0;
        for (auto b : mask) cnt += b;
        return cnt * vol;
    }();
    rep.params["c_used"] = c;
    return rep;
}

// ---- trajectory series helpers ----

std::vector<double> snapshot_norm_lq(const Trajectory& traj, double q) {
    std::vector<double> out(traj.snapshots.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm_lp(traj.snapshots[i], q);
    return out;
}

std::vector<double> snapshot_enstrophy(const Trajectory& traj) {
    std::vector<double> out(traj.snapshots.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = norm_v(traj.snapshots[i]);
        out[i] = v * v;
    }
    return out;
}

std::vector<double> snapshot_hdot(const Trajectory& traj, double s) {
    std::vector<double> out(traj.snapshots.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm_hdot(traj.snapshots[i], s);
    return out;
}

std::vector<double> snapshot_grad_l3_sq(const Trajectory& traj) {
    std::vector<double> out(traj.snapshots.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::vector<double> g = gradient_magnitude_samples(traj.snapshots[i]);
        const double vol = traj.grid.cell_volume();
        const double l3 = std::cbrt(
            vol * pairwise_sum(std::size_t{0}, g.size(),
                               [&](std::size_t k) { return g[k] * g[k] * g[k]; }));
        out[i] = l3 * l3;
    }
    return out;
}

std::vector<double> snapshot_lambda32_sq(const Trajectory& traj) {
    std::vector<double> out(traj.snapshots.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = norm_hdot(traj.snapshots[i], 1.5);
        out[i] = v * v;
    }
    return out;
}

std::vector<WorstSetCurve> snapshot_u3_curves(const Trajectory& traj) {
    std::vector<WorstSetCurve> out;
    out.reserve(traj.snapshots.size());
    for (const auto& u : traj.snapshots)
        out.push_back(WorstSetCurve::build(magnitude_samples(u), 3.0, traj.grid.cell_volume()));
    return out;
}

std::vector<WorstSetCurve> snapshot_p32_curves(const Trajectory& traj) {
    std::vector<WorstSetCurve> out;
    out.reserve(traj.snapshots.size());
    for (const auto& u : traj.snapshots) {
        const ScalarField p = solve_pressure(u);
        const double* ps = p.physical();
        std::span<const double> samples(ps, traj.grid.point_count());
        out.push_back(WorstSetCurve::build(samples, 1.5, traj.grid.cell_volume()));
    }
    return out;
}

} // namespace nsrl
