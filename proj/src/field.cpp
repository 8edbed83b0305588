#include "nsrl/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "nsrl/errors.hpp"
#include "nsrl/reduce.hpp"

namespace nsrl {

namespace {

/// Loop over the stored spectral half-cube calling fn(index, kx, ky, kz)
/// with signed integer wavenumbers.
template <class F>
void for_each_mode(const GridSpec& grid, F&& fn) {
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix, ++idx) {
                fn(idx, ix, ky, kz);
            }
        }
    }
}

/// Hermitian multiplicity of a stored mode: interior kx planes represent a
/// conjugate pair, the kx = 0 and kx = n/2 planes represent themselves.
inline double mode_weight(const GridSpec& grid, int kx) {
    return (kx == 0 || kx == grid.n / 2) ? 1.0 : 2.0;
}

} // namespace

// ---- construction ----

ScalarField ScalarField::from_physical(const GridSpec& grid, RealBuffer phys) {
    grid.validate();
    if (phys.size() != grid.point_count()) throw ConfigError("ScalarField: sample count mismatch");
    ComplexBuffer spec(grid.spectral_count());
    Fft::forward(grid, phys.data(), spec.data());
    return ScalarField(grid, std::move(phys), std::move(spec));
}

ScalarField ScalarField::from_physical(const GridSpec& grid, const std::vector<double>& phys) {
    RealBuffer buf(phys.size());
    std::memcpy(buf.data(), phys.data(), sizeof(double) * phys.size());
    return from_physical(grid, std::move(buf));
}

ScalarField ScalarField::from_spectral(const GridSpec& grid, ComplexBuffer spec) {
    grid.validate();
    if (spec.size() != grid.spectral_count()) throw ConfigError("ScalarField: coefficient count mismatch");
    RealBuffer phys(grid.point_count());
    Fft::inverse(grid, spec.data(), phys.data());
    return ScalarField(grid, std::move(phys), std::move(spec));
}

ScalarField ScalarField::zero(const GridSpec& grid) {
    return from_spectral(grid, ComplexBuffer(grid.spectral_count()));
}

Complex ScalarField::coef(int kx, int ky, int kz) const {
    const int n = grid_.n;
    bool conjugate = false;
    if (kx < 0) {
        kx = -kx; ky = -ky; kz = -kz;
        conjugate = true;
    }
    if (kx > n / 2 || std::abs(ky) > n / 2 || std::abs(kz) > n / 2) return {0.0, 0.0};
    const int iy = ky >= 0 ? ky : ky + n;
    const int iz = kz >= 0 ? kz : kz + n;
    Complex c = spec_[grid_.spectral_index(kx, iy, iz)];
    return conjugate ? std::conj(c) : c;
}

Field Field::from_components(ScalarField c0, ScalarField c1, ScalarField c2) {
    if (!(c0.grid() == c1.grid()) || !(c0.grid() == c2.grid()))
        throw ConfigError("Field: component grids differ");
    return Field({std::move(c0), std::move(c1), std::move(c2)});
}

Field Field::from_physical(const GridSpec& grid, RealBuffer c0, RealBuffer c1, RealBuffer c2) {
    return from_components(ScalarField::from_physical(grid, std::move(c0)),
                           ScalarField::from_physical(grid, std::move(c1)),
                           ScalarField::from_physical(grid, std::move(c2)));
}

Field Field::from_spectral(const GridSpec& grid, ComplexBuffer c0, ComplexBuffer c1, ComplexBuffer c2) {
    return from_components(ScalarField::from_spectral(grid, std::move(c0)),
                           ScalarField::from_spectral(grid, std::move(c1)),
                           ScalarField::from_spectral(grid, std::move(c2)));
}

Field Field::zero(const GridSpec& grid) {
    return from_spectral(grid, ComplexBuffer(grid.spectral_count()),
                         ComplexBuffer(grid.spectral_count()), ComplexBuffer(grid.spectral_count()));
}

// ---- operators ----

Field leray_project(const Field& f) {
    const GridSpec& grid = f.grid();
    std::array<ComplexBuffer, 3> out;
    for (int c = 0; c < 3; ++c) out[c] = ComplexBuffer(grid.spectral_count());
    const Complex* in[3] = {f.component(0).spectral(), f.component(1).spectral(), f.component(2).spectral()};
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) {
            for (int c = 0; c < 3; ++c) out[c][idx] = in[c][idx];
            return;
        }
        const Complex kdotu = double(kx) * in[0][idx] + double(ky) * in[1][idx] + double(kz) * in[2][idx];
        const Complex s = kdotu / k2;
        out[0][idx] = in[0][idx] - double(kx) * s;
        out[1][idx] = in[1][idx] - double(ky) * s;
        out[2][idx] = in[2][idx] - double(kz) * s;
    });
    return Field::from_spectral(grid, std::move(out[0]), std::move(out[1]), std::move(out[2]));
}

namespace {

ScalarField derivative_impl(const GridSpec& grid, const Complex* in, const std::array<int, 3>& alpha) {
    const double ks = grid.wavenumber_scale();
    const int nyq = grid.n / 2;
    ComplexBuffer out(grid.spectral_count());
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        // odd-order derivatives have no faithful Nyquist multiplier
        if ((alpha[0] % 2 != 0 && kx == nyq) ||
            (alpha[1] % 2 != 0 && std::abs(ky) == nyq) ||
            (alpha[2] % 2 != 0 && std::abs(kz) == nyq)) {
            out[idx] = {0.0, 0.0};
            return;
        }
        Complex m{1.0, 0.0};
        const int k[3] = {kx, ky, kz};
        for (int a = 0; a < 3; ++a) {
            const Complex ik{0.0, ks * k[a]};
            for (int r = 0; r < alpha[a]; ++r) m *= ik;
        }
        out[idx] = m * in[idx];
    });
    return ScalarField::from_spectral(grid, std::move(out));
}

} // namespace

ScalarField derivative(const ScalarField& f, const std::array<int, 3>& alpha) {
    return derivative_impl(f.grid(), f.spectral(), alpha);
}

Field derivative(const Field& f, const std::array<int, 3>& alpha) {
    return Field::from_components(derivative(f.component(0), alpha),
                                  derivative(f.component(1), alpha),
                                  derivative(f.component(2), alpha));
}

Field curl(const Field& f) {
    const GridSpec& grid = f.grid();
    const double ks = grid.wavenumber_scale();
    std::array<ComplexBuffer, 3> out;
    for (int c = 0; c < 3; ++c) out[c] = ComplexBuffer(grid.spectral_count());
    const Complex* in[3] = {f.component(0).spectral(), f.component(1).spectral(), f.component(2).spectral()};
    const Complex i_unit{0.0, 1.0};
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const Complex u0 = in[0][idx], u1 = in[1][idx], u2 = in[2][idx];
        out[0][idx] = i_unit * ks * (double(ky) * u2 - double(kz) * u1);
        out[1][idx] = i_unit * ks * (double(kz) * u0 - double(kx) * u2);
        out[2][idx] = i_unit * ks * (double(kx) * u1 - double(ky) * u0);
    });
    return Field::from_spectral(grid, std::move(out[0]), std::move(out[1]), std::move(out[2]));
}

ScalarField divergence(const Field& f) {
    const GridSpec& grid = f.grid();
    const double ks = grid.wavenumber_scale();
    ComplexBuffer out(grid.spectral_count());
    const Complex* in[3] = {f.component(0).spectral(), f.component(1).spectral(), f.component(2).spectral()};
    const Complex i_unit{0.0, 1.0};
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        out[idx] = i_unit * ks * (double(kx) * in[0][idx] + double(ky) * in[1][idx] + double(kz) * in[2][idx]);
    });
    return ScalarField::from_spectral(grid, std::move(out));
}

Field gradient(const ScalarField& f) {
    return Field::from_components(derivative(f, {1, 0, 0}), derivative(f, {0, 1, 0}), derivative(f, {0, 0, 1}));
}

ScalarField fractional_laplacian(const ScalarField& f, double s) {
    if (s < -2.0 || s > 2.0) throw ConfigError("fractional_laplacian: exponent outside [-2, 2]");
    const GridSpec& grid = f.grid();
    const double ks = grid.wavenumber_scale();
    const Complex* in = f.spectral();
    if (s < 0.0) {
        double max_abs = 0.0;
        for (std::size_t i = 0; i < grid.spectral_count(); ++i) max_abs = std::max(max_abs, std::abs(in[i]));
        if (std::abs(in[0]) > 1e-12 * std::max(max_abs, 1e-300))
            throw NumericalError("fractional_laplacian: negative exponent on a field with nonzero mean");
    }
    ComplexBuffer out(grid.spectral_count());
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) {
            out[idx] = (s == 0.0) ? in[idx] : Complex{0.0, 0.0};
            return;
        }
        out[idx] = std::pow(ks * ks * k2, 0.5 * s) * in[idx];
    });
    return ScalarField::from_spectral(grid, std::move(out));
}

Field fractional_laplacian(const Field& f, double s) {
    return Field::from_components(fractional_laplacian(f.component(0), s),
                                  fractional_laplacian(f.component(1), s),
                                  fractional_laplacian(f.component(2), s));
}

double relative_spectral_divergence(const Field& f) {
    const GridSpec& grid = f.grid();
    const Complex* in[3] = {f.component(0).spectral(), f.component(1).spectral(), f.component(2).spectral()};
    double max_div = 0.0, max_u = 0.0;
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const Complex kd = double(kx) * in[0][idx] + double(ky) * in[1][idx] + double(kz) * in[2][idx];
        max_div = std::max(max_div, std::abs(kd));
        for (int c = 0; c < 3; ++c) max_u = std::max(max_u, std::abs(in[c][idx]));
    });
    if (max_u == 0.0) return 0.0;
    return max_div / max_u;
}

bool is_divergence_free(const Field& f, double tol) {
    return relative_spectral_divergence(f) <= tol;
}

// ---- norms ----

namespace {

double lp_from_samples(const GridSpec& grid, const double* mag2, double p) {
    // mag2 holds |f(x)|^2 samples
    const std::size_t count = grid.point_count();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < count; ++i) m = std::max(m, mag2[i]);
        return std::sqrt(m);
    }
    const double sum = pairwise_sum(std::size_t{0}, count,
                                    [&](std::size_t i) { return std::pow(mag2[i], 0.5 * p); });
    return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

} // namespace

double norm_lp(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw ConfigError("norm_lp: p must be >= 1");
    const std::size_t count = f.grid().point_count();
    std::vector<double> mag2(count);
    const double* v = f.physical();
    for (std::size_t i = 0; i < count; ++i) mag2[i] = v[i] * v[i];
    return lp_from_samples(f.grid(), mag2.data(), p);
}

double norm_lp(const Field& f, double p) {
    if (!(p >= 1.0)) throw ConfigError("norm_lp: p must be >= 1");
    const std::size_t count = f.grid().point_count();
    std::vector<double> mag2(count);
    const double* v0 = f.component(0).physical();
    const double* v1 = f.component(1).physical();
    const double* v2 = f.component(2).physical();
    for (std::size_t i = 0; i < count; ++i)
        mag2[i] = v0[i] * v0[i] + v1[i] * v1[i] + v2[i] * v2[i];
    return lp_from_samples(f.grid(), mag2.data(), p);
}

namespace {

double hdot_sq(const GridSpec& grid, const Complex* spec, double s) {
    const double ks = grid.wavenumber_scale();
    std::vector<double> terms(grid.spectral_count());
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) {
            terms[idx] = (s == 0.0) ? std::norm(spec[idx]) : 0.0;
            return;
        }
        terms[idx] = mode_weight(grid, kx) * std::pow(ks * ks * k2, s) * std::norm(spec[idx]);
    });
    return pairwise_sum(terms) * grid.volume();
}

void check_zero_mean_for_negative_s(const GridSpec& grid, const Complex* spec, double s) {
    if (s >= 0.0) return;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < grid.spectral_count(); ++i) max_abs = std::max(max_abs, std::abs(spec[i]));
    if (std::abs(spec[0]) > 1e-12 * std::max(max_abs, 1e-300))
        throw NumericalError("norm_hdot: negative exponent on a field with nonzero mean");
}

} // namespace

double norm_hdot(const ScalarField& f, double s) {
    check_zero_mean_for_negative_s(f.grid(), f.spectral(), s);
    return std::sqrt(hdot_sq(f.grid(), f.spectral(), s));
}

double norm_hdot(const Field& f, double s) {
    double sq = 0.0;
    for (int c = 0; c < 3; ++c) {
        check_zero_mean_for_negative_s(f.grid(), f.component(c).spectral(), s);
        sq += hdot_sq(f.grid(), f.component(c).spectral(), s);
    }
    return std::sqrt(sq);
}

double norm_v(const Field& f) { return norm_hdot(f, 1.0); }

std::vector<double> magnitude_samples(const Field& f) {
    const std::size_t count = f.grid().point_count();
    std::vector<double> out(count);
    const double* v0 = f.component(0).physical();
    const double* v1 = f.component(1).physical();
    const double* v2 = f.component(2).physical();
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::sqrt(v0[i] * v0[i] + v1[i] * v1[i] + v2[i] * v2[i]);
    return out;
}

std::vector<double> gradient_magnitude_samples(const Field& f) {
    const std::size_t count = f.grid().point_count();
    std::vector<double> out(count, 0.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            std::array<int, 3> alpha{0, 0, 0};
            alpha[j] = 1;
            ScalarField d = derivative(f.component(i), alpha);
            const double* v = d.physical();
            for (std::size_t t = 0; t < count; ++t) out[t] += v[t] * v[t];
        }
    }
    for (std::size_t t = 0; t < count; ++t) out[t] = std::sqrt(out[t]);
    return out;
}

Field axpy(double a, const Field& x, const Field& y) {
    const GridSpec& grid = x.grid();
    if (!(grid == y.grid())) throw ConfigError("axpy: grid mismatch");
    std::array<ComplexBuffer, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c] = ComplexBuffer(grid.spectral_count());
        const Complex* xs = x.component(c).spectral();
        const Complex* ys = y.component(c).spectral();
        for (std::size_t i = 0; i < grid.spectral_count(); ++i) out[c][i] = a * xs[i] + ys[i];
    }
    return Field::from_spectral(grid, std::move(out[0]), std::move(out[1]), std::move(out[2]));
}

Field scale(double a, const Field& x) {
    const GridSpec& grid = x.grid();
    std::array<ComplexBuffer, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c] = ComplexBuffer(grid.spectral_count());
        const Complex* xs = x.component(c).spectral();
        for (std::size_t i = 0; i < grid.spectral_count(); ++i) out[c][i] = a * xs[i];
    }
    return Field::from_spectral(grid, std::move(out[0]), std::move(out[1]), std::move(out[2]));
}

ScalarField scale(double a, const ScalarField& x) {
    ComplexBuffer out(x.grid().spectral_count());
    const Complex* xs = x.spectral();
    for (std::size_t i = 0; i < x.grid().spectral_count(); ++i) out[i] = a * xs[i];
    return ScalarField::from_spectral(x.grid(), std::move(out));
}

void dealias_spectrum(const GridSpec& grid, Complex* spec) {
    const int cutoff = grid.n / 3;
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        if (std::abs(kx) > cutoff || std::abs(ky) > cutoff || std::abs(kz) > cutoff)
            spec[idx] = {0.0, 0.0};
    });
}

ScalarField translate(const ScalarField& f, const Vec3& offset) {
    const GridSpec& grid = f.grid();
    const double ks = grid.wavenumber_scale();
    ComplexBuffer out(grid.spectral_count());
    const Complex* in = f.spectral();
    for_each_mode(grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double phase = ks * (kx * offset[0] + ky * offset[1] + kz * offset[2]);
        out[idx] = in[idx] * Complex{std::cos(phase), std::sin(phase)};
    });
    return ScalarField::from_spectral(grid, std::move(out));
}

Field translate(const Field& f, const Vec3& offset) {
    return Field::from_components(translate(f.component(0), offset),
                                  translate(f.component(1), offset),
                                  translate(f.component(2), offset));
}

} // namespace nsrl
