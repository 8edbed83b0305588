#include "nsrl/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace nsrl {

TrigSampler::TrigSampler(const ScalarField& f) : grid_(f.grid()), ncomp_(1) {
    const Complex* specs[1] = {f.spectral()};
    pack(grid_, specs);
}

TrigSampler::TrigSampler(const Field& f) : grid_(f.grid()), ncomp_(3) {
    const Complex* specs[3] = {f.component(0).spectral(), f.component(1).spectral(),
                               f.component(2).spectral()};
    pack(grid_, specs);
}

void TrigSampler::pack(const GridSpec& grid, const Complex* const* specs) {
    const int n = grid.n;
    const int nxh = n / 2 + 1;

    kx_max_ = 0;
    ky_min_ = 0;
    ky_max_ = 0;
    kz_min_ = 0;
    kz_max_ = 0;
    bool any = false;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                bool nonzero = false;
                for (int c = 0; c < ncomp_; ++c) {
                    const Complex v = specs[c][grid.spectral_index(ix, iy, iz)];
                    if (v.real() != 0.0 || v.imag() != 0.0) {
                        nonzero = true;
                        break;
                    }
                }
                if (!nonzero) continue;
                if (!any) {
                    kx_max_ = ix;
                    ky_min_ = ky_max_ = ky;
                    kz_min_ = kz_max_ = kz;
                    any = true;
                } else {
                    kx_max_ = std::max(kx_max_, ix);
                    ky_min_ = std::min(ky_min_, ky);
                    ky_max_ = std::max(ky_max_, ky);
                    kz_min_ = std::min(kz_min_, kz);
                    kz_max_ = std::max(kz_max_, kz);
                }
            }
        }
    }
    const int nx = kx_max_ + 1;
    const int ny = ky_max_ - ky_min_ + 1;
    const int nz = kz_max_ - kz_min_ + 1;
    const std::size_t count = any ? static_cast<std::size_t>(nx) * ny * nz : 1;
    for (int c = 0; c < ncomp_; ++c) {
        cre_[c].assign(count, 0.0);
        cim_[c].assign(count, 0.0);
    }
    if (!any) return;
    for (int kz = kz_min_; kz <= kz_max_; ++kz) {
        const int iz = kz >= 0 ? kz : kz + n;
        for (int ky = ky_min_; ky <= ky_max_; ++ky) {
            const int iy = ky >= 0 ? ky : ky + n;
            const std::size_t base =
                (static_cast<std::size_t>(kz - kz_min_) * ny + (ky - ky_min_)) * nx;
            for (int kx = 0; kx <= kx_max_; ++kx) {
                for (int c = 0; c < ncomp_; ++c) {
                    const Complex v = specs[c][grid.spectral_index(kx, iy, iz)];
                    cre_[c][base + kx] = v.real();
                    cim_[c][base + kx] = v.imag();
                }
            }
        }
    }
}

namespace {

/// Phase table e^{i w (k0 + j) x} for j = 0..count-1 built by recurrence.
void phase_table(double w, int k0, double x, int count, double* pr, double* pi) {
    const double c = std::cos(w * x), s = std::sin(w * x);
    pr[0] = std::cos(w * k0 * x);
    pi[0] = std::sin(w * k0 * x);
    for (int k = 1; k < count; ++k) {
        pr[k] = pr[k - 1] * c - pi[k - 1] * s;
        pi[k] = pr[k - 1] * s + pi[k - 1] * c;
    }
}

} // namespace

void TrigSampler::sample(const Vec3& x, double* out) const {
    const double ks = grid_.wavenumber_scale();
    const int nx = kx_max_ + 1;
    const int ny = ky_max_ - ky_min_ + 1;
    const int nz = kz_max_ - kz_min_ + 1;

    // Per-axis phase tables via recurrence. The kx table carries the
    // Hermitian doubling (stored kx > 0 modes represent conjugate pairs);
    // the grand total is the real part of the weighted sum.
    thread_local std::vector<double> scratch;
    scratch.resize(2 * static_cast<std::size_t>(nx + ny + nz));
    double* pxr = scratch.data();
    double* pxi = pxr + nx;
    double* pyr = pxi + nx;
    double* pyi = pyr + ny;
    double* pzr = pyi + ny;
    double* pzi = pzr + nz;

    phase_table(ks, 0, x[0], nx, pxr, pxi);
    for (int k = 1; k < nx; ++k) {
        pxr[k] *= 2.0;
        pxi[k] *= 2.0;
    }
    phase_table(ks, ky_min_, x[1], ny, pyr, pyi);
    phase_table(ks, kz_min_, x[2], nz, pzr, pzi);

    double acc[3] = {0.0, 0.0, 0.0};
    for (int jz = 0; jz < nz; ++jz) {
        for (int jy = 0; jy < ny; ++jy) {
            const double p12r = pyr[jy] * pzr[jz] - pyi[jy] * pzi[jz];
            const double p12i = pyr[jy] * pzi[jz] + pyi[jy] * pzr[jz];
            const std::size_t base = (static_cast<std::size_t>(jz) * ny + jy) * nx;
            if (ncomp_ == 3) {
                const double* r0 = cre_[0].data() + base;
                const double* i0 = cim_[0].data() + base;
                const double* r1 = cre_[1].data() + base;
                const double* i1 = cim_[1].data() + base;
                const double* r2 = cre_[2].data() + base;
                const double* i2 = cim_[2].data() + base;
                double a0 = 0.0, a1 = 0.0, a2 = 0.0;
                for (int kx = 0; kx < nx; ++kx) {
                    const double mr = p12r * pxr[kx] - p12i * pxi[kx];
                    const double mi = p12r * pxi[kx] + p12i * pxr[kx];
                    a0 += r0[kx] * mr - i0[kx] * mi;
                    a1 += r1[kx] * mr - i1[kx] * mi;
                    a2 += r2[kx] * mr - i2[kx] * mi;
                }
                acc[0] += a0;
                acc[1] += a1;
                acc[2] += a2;
            } else {
                const double* r0 = cre_[0].data() + base;
                const double* i0 = cim_[0].data() + base;
                double a0 = 0.0;
                for (int kx = 0; kx < nx; ++kx) {
                    const double mr = p12r * pxr[kx] - p12i * pxi[kx];
                    const double mi = p12r * pxi[kx] + p12i * pxr[kx];
                    a0 += r0[kx] * mr - i0[kx] * mi;
                }
                acc[0] += a0;
            }
        }
    }
    for (int c = 0; c < ncomp_; ++c) out[c] = acc[c];
}

double sample(const ScalarField& f, const Vec3& x) { return TrigSampler(f).sample_scalar(x); }

Vec3 sample(const Field& f, const Vec3& x) { return TrigSampler(f).sample_vector(x); }

void clean_spectrum(ComplexBuffer& spec, double rel_tol) {
    double max_abs = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) max_abs = std::max(max_abs, std::abs(spec[i]));
    const double cut = rel_tol * max_abs;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (std::abs(spec[i]) <= cut) spec[i] = {0.0, 0.0};
    }
}

} // namespace nsrl
