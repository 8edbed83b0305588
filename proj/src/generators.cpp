#include "nsrl/generators.hpp"

#include <cmath>

#include "nsrl/errors.hpp"
#include "nsrl/reduce.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/sampler.hpp"

namespace nsrl {

namespace {

Field cleaned_from_physical(const GridSpec& grid, RealBuffer c0, RealBuffer c1, RealBuffer c2) {
    // Round-trip through the spectrum and flush roundoff-level coefficients so
    // analytically band-limited fields pack tightly in the sampler.
    std::array<ComplexBuffer, 3> spec;
    RealBuffer* phys[3] = {&c0, &c1, &c2};
    for (int c = 0; c < 3; ++c) {
        spec[c] = ComplexBuffer(grid.spectral_count());
        Fft::forward(grid, phys[c]->data(), spec[c].data());
    }
    double max_abs = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < spec[c].size(); ++i)
            max_abs = std::max(max_abs, std::abs(spec[c][i]));
    for (int c = 0; c < 3; ++c) {
        const double cut = 1e-13 * max_abs;
        for (std::size_t i = 0; i < spec[c].size(); ++i)
            if (std::abs(spec[c][i]) <= cut) spec[c][i] = {0.0, 0.0};
    }
    return Field::from_spectral(grid, std::move(spec[0]), std::move(spec[1]), std::move(spec[2]));
}

} // namespace

Field generate_taylor_green_2d(const GridSpec& grid) {
    grid.validate();
    const int n = grid.n;
    const double h = grid.spacing();
    RealBuffer u0(grid.point_count()), u1(grid.point_count()), u2(grid.point_count());
    for (int iz = 0; iz < n; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const double x = ix * h, y = iy * h;
                const std::size_t idx = grid.index(ix, iy, iz);
                u0[idx] = std::sin(x) * std::cos(y);
                u1[idx] = -std::cos(x) * std::sin(y);
                u2[idx] = 0.0;
            }
        }
    }
    return cleaned_from_physical(grid, std::move(u0), std::move(u1), std::move(u2));
}

Field generate_random_divfree(const GridSpec& grid, double slope, int k_min, int k_max,
                              double u_rms, std::uint64_t seed) {
    grid.validate();
    if (k_min < 1 || k_max < k_min) throw ConfigError("random_divfree: need 1 <= k_min <= k_max");
    if (k_max > grid.n / 2 - 1) throw ConfigError("random_divfree: k_max exceeds resolved band");
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    std::array<ComplexBuffer, 3> spec;
    for (int c = 0; c < 3; ++c) spec[c] = ComplexBuffer(grid.spectral_count());

    Rng rng(seed);
    // Draw Gaussian coefficients on the canonical half-space in a fixed
    // order; the kx = 0 plane mirrors Hermitian partners explicitly.
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const int kx = ix;
                const double kk = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
                if (kk < k_min - 0.5 || kk >= k_max + 0.5) continue;
                const bool canonical = kx > 0 || (kx == 0 && (kz > 0 || (kz == 0 && ky > 0)));
                if (!canonical) continue;
                for (int c = 0; c < 3; ++c) {
                    const Complex v{rng.normal(), rng.normal()};
                    spec[c][grid.spectral_index(kx, iy, iz)] = v;
                    if (kx == 0) {
                        const int miy = (n - iy) % n;
                        const int miz = (n - iz) % n;
                        spec[c][grid.spectral_index(0, miy, miz)] = std::conj(v);
                    }
                }
            }
        }
    }

    // Per-mode Leray projection.
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const double k2 = double(ix) * ix + double(ky) * ky + double(kz) * kz;
                if (k2 == 0.0) continue;
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                const Complex kd = double(ix) * spec[0][idx] + double(ky) * spec[1][idx] +
                                   double(kz) * spec[2][idx];
                const Complex s = kd / k2;
                spec[0][idx] -= double(ix) * s;
                spec[1][idx] -= double(ky) * s;
                spec[2][idx] -= double(kz) * s;
            }
        }
    }

    // Rescale each integer shell to the target spectrum exactly, then
    // normalize the rms velocity.
    std::vector<double> shell_energy(k_max + 1, 0.0);
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const double kk = std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                const int m = static_cast<int>(std::lround(kk));
                if (m < k_min || m > k_max) continue;
                const double w = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                for (int c = 0; c < 3; ++c) shell_energy[m] += 0.5 * w * std::norm(spec[c][idx]);
            }
        }
    }
    std::vector<double> shell_scale(k_max + 1, 0.0);
    for (int m = k_min; m <= k_max; ++m) {
        if (shell_energy[m] > 0.0)
            shell_scale[m] = std::sqrt(std::pow(double(m), slope) / shell_energy[m]);
    }
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const double kk = std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                const int m = static_cast<int>(std::lround(kk));
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                const double s = (m >= k_min && m <= k_max) ? shell_scale[m] : 0.0;
                for (int c = 0; c < 3; ++c) spec[c][idx] *= s;
            }
        }
    }

    double sum2 = 0.0;
    for (int iz = 0; iz < n; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < nxh; ++ix) {
                const double w = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                for (int c = 0; c < 3; ++c) sum2 += w * std::norm(spec[c][idx]);
            }
        }
    }
    if (sum2 > 0.0) {
        const double s = u_rms / std::sqrt(sum2);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < spec[c].size(); ++i) spec[c][i] *= s;
    }
    return Field::from_spectral(grid, std::move(spec[0]), std::move(spec[1]), std::move(spec[2]));
}

Field generate_single_mode(const GridSpec& grid, const std::array<int, 3>& k, double amplitude) {
    grid.validate();
    std::array<int, 3> kc = k;
    if (kc[0] < 0 || (kc[0] == 0 && (kc[2] < 0 || (kc[2] == 0 && kc[1] < 0)))) {
        for (auto& v : kc) v = -v;  // cos is even in k
    }
    const double kk = std::sqrt(double(kc[0]) * kc[0] + double(kc[1]) * kc[1] + double(kc[2]) * kc[2]);
    if (kk == 0.0) throw ConfigError("single_mode: k must be nonzero");
    if (std::abs(kc[0]) > grid.n / 2 - 1 || std::abs(kc[1]) > grid.n / 2 - 1 ||
        std::abs(kc[2]) > grid.n / 2 - 1)
        throw ConfigError("single_mode: wavevector exceeds resolved band");

    Vec3 kv{double(kc[0]), double(kc[1]), double(kc[2])};
    // unit vector orthogonal to k: cross with the least-aligned axis
    int least = 0;
    for (int a = 1; a < 3; ++a)
        if (std::abs(kv[a]) < std::abs(kv[least])) least = a;
    Vec3 axis{0.0, 0.0, 0.0};
    axis[least] = 1.0;
    const Vec3 e = normalized(cross(kv, axis));

    std::array<ComplexBuffer, 3> spec;
    for (int c = 0; c < 3; ++c) spec[c] = ComplexBuffer(grid.spectral_count());
    const int n = grid.n;
    const int iy = kc[1] >= 0 ? kc[1] : kc[1] + n;
    const int iz = kc[2] >= 0 ? kc[2] : kc[2] + n;
    const std::size_t idx = grid.spectral_index(kc[0], iy, iz);
    for (int c = 0; c < 3; ++c) {
        spec[c][idx] = Complex{0.5 * amplitude * e[c], 0.0};
        if (kc[0] == 0) {
            const int miy = (n - iy) % n;
            const int miz = (n - iz) % n;
            spec[c][grid.spectral_index(0, miy, miz)] = Complex{0.5 * amplitude * e[c], 0.0};
        }
    }
    return Field::from_spectral(grid, std::move(spec[0]), std::move(spec[1]), std::move(spec[2]));
}

Field generate_selfsimilar_profile(const GridSpec& grid, double amplitude, double length_scale,
                                   double beta) {
    grid.validate();
    if (!(length_scale > 0.0) || !(beta > 0.0))
        throw ConfigError("selfsimilar_profile: length_scale and beta must be positive");
    const int n = grid.n;
    const double h = grid.spacing();
    const double half = 0.5 * grid.domain_length;
    const Vec3 e{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    RealBuffer u0(grid.point_count()), u1(grid.point_count()), u2(grid.point_count());
    for (int iz = 0; iz < n; ++iz) {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const double dx = ix * h - half, dy = iy * h - half, dz = iz * h - half;
                const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                const double p = amplitude * std::pow(1.0 + d / length_scale, -beta);
                const std::size_t idx = grid.index(ix, iy, iz);
                u0[idx] = p * e[0];
                u1[idx] = p * e[1];
                u2[idx] = p * e[2];
            }
        }
    }
    return leray_project(Field::from_physical(grid, std::move(u0), std::move(u1), std::move(u2)));
}

Field generate(const std::string& kind, const GridSpec& grid,
               const std::map<std::string, double>& params, std::uint64_t seed) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (kind == "taylor_green_2d") return generate_taylor_green_2d(grid);
    if (kind == "random_divfree")
        return generate_random_divfree(grid, get("slope", -5.0 / 3.0),
                                       static_cast<int>(get("k_min", 1)),
                                       static_cast<int>(get("k_max", grid.n / 4)),
                                       get("u_rms", 1.0), seed);
    if (kind == "single_mode")
        return generate_single_mode(grid,
                                    {static_cast<int>(get("kx", 1)), static_cast<int>(get("ky", 0)),
                                     static_cast<int>(get("kz", 0))},
                                    get("amplitude", 1.0));
    if (kind == "selfsimilar_profile")
        return generate_selfsimilar_profile(grid, get("amplitude", 1.0), get("length_scale", 1.0),
                                            get("beta", 0.5));
    throw ConfigError("generate: unknown kind '" + kind + "'");
}

std::vector<double> spectrum_shells(const Field& f) {
    const GridSpec& grid = f.grid();
    const int n = grid.n;
    const int nxh = n / 2 + 1;
    std::vector<double> shells(n / 2 + 1, 0.0);
    const Complex* spec[3] = {f.component(0).spectral(), f.component(1).spectral(),
                              f.component(2).spectral()};
    for (int iz = 0; iz < n; ++iz) {
        const int kz = grid.wavenumber(iz);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = grid.wavenumber(iy);
            for (int ix = 0; ix < nxh; ++ix) {
                const double kk = std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                const int m = static_cast<int>(std::lround(kk));
                if (m >= static_cast<int>(shells.size())) continue;
                const double w = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
                const std::size_t idx = grid.spectral_index(ix, iy, iz);
                for (int c = 0; c < 3; ++c)
                    shells[m] += 0.5 * w * std::norm(spec[c][idx]) * grid.volume();
            }
        }
    }
    return shells;
}

} // namespace nsrl
