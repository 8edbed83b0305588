#include "nsrl/solver.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "nsrl/errors.hpp"
#include "nsrl/parallel.hpp"
#include "nsrl/reduce.hpp"

namespace nsrl {

namespace {

using Spec3 = std::array<ComplexBuffer, 3>;

Spec3 make_spec3(const GridSpec& grid) {
    return {ComplexBuffer(grid.spectral_count()), ComplexBuffer(grid.spectral_count()),
            ComplexBuffer(grid.spectral_count())};
}

Spec3 copy_spec3(const GridSpec& grid, const Spec3& s) {
    Spec3 out = make_spec3(grid);
    for (int c = 0; c < 3; ++c)
        std::memcpy(out[c].data(), s[c].data(), sizeof(Complex) * grid.spectral_count());
    return out;
}

Spec3 field_spec(const Field& f) {
    Spec3 out = make_spec3(f.grid());
    for (int c = 0; c < 3; ++c)
        std::memcpy(out[c].data(), f.component(c).spectral(),
                    sizeof(Complex) * f.grid().spectral_count());
    return out;
}

template <class F>
void for_each_mode(const GridSpec& grid, F&& fn) {
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix, ++idx) fn(idx, ix, ky, kz);
        }
    }
}

/// -P((curl u) x u) with optional 2/3 truncation; returns max|u| as a
/// byproduct for the CFL guard.
Spec3 nonlinear_term(const GridSpec& grid, const Spec3& u_spec, bool dealias, double* max_u_out) {
    const double ks = grid.wavenumber_scale();
    const std::size_t np = grid.point_count();

    Spec3 omega = make_spec3(grid);
    const Complex i_unit{0.0, 1.0};
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const Complex u0 = u_spec[0][idx], u1 = u_spec[1][idx], u2 = u_spec[2][idx];
        omega[0][idx] = i_unit * ks * (double(ky) * u2 - double(kz) * u1);
        omega[1][idx] = i_unit * ks * (double(kz) * u0 - double(kx) * u2);
        omega[2][idx] = i_unit * ks * (double(kx) * u1 - double(ky) * u0);
    });

    std::array<RealBuffer, 3> up{RealBuffer(np), RealBuffer(np), RealBuffer(np)};
    std::array<RealBuffer, 3> wp{RealBuffer(np), RealBuffer(np), RealBuffer(np)};
    for (int c = 0; c < 3; ++c) {
        Fft::inverse(grid, u_spec[c].data(), up[c].data());
        Fft::inverse(grid, omega[c].data(), wp[c].data());
    }

    if (max_u_out) {
        double m = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            const double s = up[0][i] * up[0][i] + up[1][i] * up[1][i] + up[2][i] * up[2][i];
            if (s > m) m = s;
        }
        *max_u_out = std::sqrt(m);
    }

    // cross product (omega x u) in place of omega's physical arrays
    std::array<RealBuffer, 3> cp{RealBuffer(np), RealBuffer(np), RealBuffer(np)};
    parallel_for_chunks(np, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            cp[0][i] = wp[1][i] * up[2][i] - wp[2][i] * up[1][i];
            cp[1][i] = wp[2][i] * up[0][i] - wp[0][i] * up[2][i];
            cp[2][i] = wp[0][i] * up[1][i] - wp[1][i] * up[0][i];
        }
    });

    Spec3 out = make_spec3(grid);
    for (int c = 0; c < 3; ++c) Fft::forward(grid, cp[c].data(), out[c].data());
    if (dealias) {
        for (int c = 0; c < 3; ++c) dealias_spectrum(grid, out[c].data());
    }

    // project and negate: N = -P(omega x u)
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        Complex v0 = out[0][idx], v1 = out[1][idx], v2 = out[2][idx];
        if (k2 > 0.0) {
            const Complex s = (double(kx) * v0 + double(ky) * v1 + double(kz) * v2) / k2;
            v0 -= double(kx) * s;
            v1 -= double(ky) * s;
            v2 -= double(kz) * s;
        }
        out[0][idx] = -v0;
        out[1][idx] = -v1;
        out[2][idx] = -v2;
    });
    return out;
}

/// Viscous half-step decay factors exp(-nu |k|^2 dt/2), tabulated once per step.
std::vector<double> half_step_factor(const GridSpec& grid, double dt) {
    const double ks = grid.wavenumber_scale();
    std::vector<double> e(grid.spectral_count());
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = ks * ks * (double(kx) * kx + double(ky) * ky + double(kz) * kz);
        e[idx] = std::exp(-grid.nu * k2 * 0.5 * dt);
    });
    return e;
}

struct StepResult {
    Spec3 u;
    double max_u = 0.0;
};

StepResult rk4_step_spec(const GridSpec& grid, const Spec3& u, double dt, bool dealias) {
    const std::size_t ns = grid.spectral_count();
    const std::vector<double> e = half_step_factor(grid, dt);

    StepResult res;
    Spec3 a = nonlinear_term(grid, u, dealias, &res.max_u);

    Spec3 tmp = make_spec3(grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < ns; ++i) tmp[c][i] = e[i] * (u[c][i] + 0.5 * dt * a[c][i]);
    Spec3 b = nonlinear_term(grid, tmp, dealias, nullptr);

    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < ns; ++i) tmp[c][i] = e[i] * u[c][i] + 0.5 * dt * b[c][i];
    Spec3 cst = nonlinear_term(grid, tmp, dealias, nullptr);

    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < ns; ++i)
            tmp[c][i] = e[i] * (e[i] * u[c][i] + dt * cst[c][i]);
    Spec3 d = nonlinear_term(grid, tmp, dealias, nullptr);

    res.u = make_spec3(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < ns; ++i) {
            const double e1 = e[i], e2 = e[i] * e[i];
            res.u[c][i] = e2 * u[c][i] +
                          (dt / 6.0) * (e2 * a[c][i] + 2.0 * e1 * (b[c][i] + cst[c][i]) + d[c][i]);
        }
    }
    return res;
}

FlowStats stats_from_spec(const GridSpec& grid, const Spec3& u, double t) {
    FlowStats s;
    s.t = t;
    const double ks = grid.wavenumber_scale();
    std::vector<double> e_terms(grid.spectral_count() * 3), v_terms(grid.spectral_count() * 3);
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double w = (kx == 0 || kx == grid.n / 2) ? 1.0 : 2.0;
        const double k2 = ks * ks * (double(kx) * kx + double(ky) * ky + double(kz) * kz);
        for (int c = 0; c < 3; ++c) {
            const double m = std::norm(u[c][idx]);
            e_terms[3 * idx + c] = w * m;
            v_terms[3 * idx + c] = w * k2 * m;
        }
    });
    const double l2sq = pairwise_sum(e_terms) * grid.volume();
    const double vsq = pairwise_sum(v_terms) * grid.volume();
    s.energy = 0.5 * l2sq;
    s.enstrophy = vsq;
    s.dissipation = grid.nu * vsq / grid.volume();

    const std::size_t np = grid.point_count();
    std::array<RealBuffer, 3> up{RealBuffer(np), RealBuffer(np), RealBuffer(np)};
    for (int c = 0; c < 3; ++c) Fft::inverse(grid, u[c].data(), up[c].data());
    double m = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        const double q = up[0][i] * up[0][i] + up[1][i] * up[1][i] + up[2][i] * up[2][i];
        if (q > m) m = q;
    }
    s.max_u = std::sqrt(m);

    // |grad u| Frobenius max from the nine spectral derivatives
    RealBuffer dw(np);
    std::vector<double> frob(np, 0.0);
    ComplexBuffer dspec(grid.spectral_count());
    const Complex i_unit{0.0, 1.0};
    for (int ci = 0; ci < 3; ++ci) {
        for (int j = 0; j < 3; ++j) {
            for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
                const int kj = j == 0 ? kx : (j == 1 ? ky : kz);
                dspec[idx] = i_unit * (ks * kj) * u[ci][idx];
            });
            Fft::inverse(grid, dspec.data(), dw.data());
            for (std::size_t i = 0; i < np; ++i) frob[i] += dw[i] * dw[i];
        }
    }
    double mg = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        if (frob[i] > mg) mg = frob[i];
    s.max_grad_u = std::sqrt(mg);
    return s;
}

Field field_from_spec(const GridSpec& grid, const Spec3& u) {
    Spec3 copy = copy_spec3(grid, u);
    return Field::from_spectral(grid, std::move(copy[0]), std::move(copy[1]), std::move(copy[2]));
}

} // namespace

Field nse_nonlinear(const Field& u, bool dealias) {
    Spec3 us = field_spec(u);
    Spec3 n = nonlinear_term(u.grid(), us, dealias, nullptr);
    return Field::from_spectral(u.grid(), std::move(n[0]), std::move(n[1]), std::move(n[2]));
}

Field nse_rhs(const Field& u, bool dealias) {
    const GridSpec& grid = u.grid();
    const double ks = grid.wavenumber_scale();
    Spec3 us = field_spec(u);
    Spec3 n = nonlinear_term(grid, us, dealias, nullptr);
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = ks * ks * (double(kx) * kx + double(ky) * ky + double(kz) * kz);
        for (int c = 0; c < 3; ++c) n[c][idx] -= grid.nu * k2 * us[c][idx];
    });
    return Field::from_spectral(grid, std::move(n[0]), std::move(n[1]), std::move(n[2]));
}

Field rk4_step(const Field& u, double dt, bool dealias) {
    StepResult r = rk4_step_spec(u.grid(), field_spec(u), dt, dealias);
    return Field::from_spectral(u.grid(), std::move(r.u[0]), std::move(r.u[1]), std::move(r.u[2]));
}

Trajectory simulate(const Field& u0, const SolverConfig& config) {
    const GridSpec& grid = u0.grid();
    grid.validate();
    if (!(config.dt > 0.0)) throw ConfigError("simulate: dt must be positive");
    if (!(config.t_end >= 0.0)) throw ConfigError("simulate: t_end must be nonnegative");

    Spec3 u = field_spec(u0);
    if (config.dealias) {
        for (int c = 0; c < 3; ++c) dealias_spectrum(grid, u[c].data());
    }

    Trajectory traj;
    traj.grid = grid;
    const long nsteps = std::lround(config.t_end / config.dt);

    auto record = [&](long step, double t) {
        if (config.stats_stride > 0 && (step % config.stats_stride == 0 || step == nsteps))
            traj.stats.push_back(stats_from_spec(grid, u, t));
        if (step % std::max(1, config.snapshot_stride) == 0 || step == nsteps) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(field_from_spec(grid, u));
        }
    };

    record(0, 0.0);
    const double h = grid.spacing();
    for (long step = 1; step <= nsteps; ++step) {
        StepResult r = rk4_step_spec(grid, u, config.dt, config.dealias);
        if (!std::isfinite(r.max_u))
            throw NumericalError("simulate: NaN detected at t=" + std::to_string(step * config.dt));
        if (r.max_u > 0.0 && config.dt > 0.5 * h / r.max_u)
            throw NumericalError("simulate: CFL violation at t=" + std::to_string(step * config.dt) +
                                 " (dt=" + std::to_string(config.dt) +
                                 ", limit=" + std::to_string(0.5 * h / r.max_u) + ")");
        u = std::move(r.u);
        record(step, step * config.dt);
    }
    return traj;
}

FlowStats flow_stats(const Field& u, double t) {
    return stats_from_spec(u.grid(), field_spec(u), t);
}

double inner_product(const Field& f, const Field& g) {
    const GridSpec& grid = f.grid();
    if (!(grid == g.grid())) throw ConfigError("inner_product: grid mismatch");
    std::vector<double> terms(grid.spectral_count() * 3);
    for (int c = 0; c < 3; ++c) {
        const Complex* fs = f.component(c).spectral();
        const Complex* gs = g.component(c).spectral();
        for_each_mode(grid, [&](std::size_t idx, int kx, int, int) {
            const double w = (kx == 0 || kx == grid.n / 2) ? 1.0 : 2.0;
            terms[3 * idx + c] = w * (fs[idx].real() * gs[idx].real() + fs[idx].imag() * gs[idx].imag());
        });
    }
    return pairwise_sum(terms) * grid.volume();
}

} // namespace nsrl
