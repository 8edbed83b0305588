#pragma once

#include <array>
#include <complex>
#include <vector>

#include "nsrl/fft.hpp"
#include "nsrl/grid.hpp"
#include "nsrl/vec.hpp"

namespace nsrl {

/// Scalar sample array on a periodic grid with its spectral twin.
/// Both representations are materialized at construction and the object is
/// immutable afterwards, so instances are safe to share across threads.
class ScalarField {
public:
    static ScalarField from_physical(const GridSpec& grid, RealBuffer phys);
    static ScalarField from_physical(const GridSpec& grid, const std::vector<double>& phys);
    static ScalarField from_spectral(const GridSpec& grid, ComplexBuffer spec);
    static ScalarField zero(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    const double* physical() const { return phys_.data(); }
    const Complex* spectral() const { return spec_.data(); }

    double at(int ix, int iy, int iz) const { return phys_[grid_.index(ix, iy, iz)]; }

    /// Coefficient of exp(i k.x) for any integer wavevector (Hermitian mirror
    /// for kx < 0, zero outside the resolved band).
    Complex coef(int kx, int ky, int kz) const;

    double mean() const { return spec_[0].real(); }

private:
    ScalarField(GridSpec grid, RealBuffer phys, ComplexBuffer spec)
        : grid_(grid), phys_(std::move(phys)), spec_(std::move(spec)) {}

    GridSpec grid_;
    RealBuffer phys_;
    ComplexBuffer spec_;
};

/// Three-component vector field (velocity, vorticity, ...).
class Field {
public:
    static Field from_components(ScalarField c0, ScalarField c1, ScalarField c2);
    static Field from_physical(const GridSpec& grid, RealBuffer c0, RealBuffer c1, RealBuffer c2);
    static Field from_spectral(const GridSpec& grid, ComplexBuffer c0, ComplexBuffer c1, ComplexBuffer c2);
    static Field zero(const GridSpec& grid);

    const GridSpec& grid() const { return comp_[0].grid(); }
    const ScalarField& component(int i) const { return comp_[i]; }

    Vec3 at(int ix, int iy, int iz) const {
        return {comp_[0].at(ix, iy, iz), comp_[1].at(ix, iy, iz), comp_[2].at(ix, iy, iz)};
    }

private:
    explicit Field(std::array<ScalarField, 3> comp) : comp_(std::move(comp)) {}
    std::array<ScalarField, 3> comp_;
};

// ---- differential / projection operators (spectral) ----

/// Leray projection onto divergence-free fields: multiplier I - k k^T/|k|^2,
/// k=0 mode passed through.
Field leray_project(const Field& f);

/// Spectral derivative (i k)^alpha with multi-index alpha per axis.
/// Nyquist modes are zeroed for odd derivative orders.
ScalarField derivative(const ScalarField& f, const std::array<int, 3>& alpha);
Field derivative(const Field& f, const std::array<int, 3>& alpha);

Field curl(const Field& f);
ScalarField divergence(const Field& f);
Field gradient(const ScalarField& f);

/// |k|^s multiplier. s in [-2, 2]; negative s requires a zero-mean input.
ScalarField fractional_laplacian(const ScalarField& f, double s);
Field fractional_laplacian(const Field& f, double s);

/// Relative spectral divergence max_k |k.u(k)| / max_k |u(k)| (0 for zero fields).
double relative_spectral_divergence(const Field& f);
bool is_divergence_free(const Field& f, double tol = 1e-10);

// ---- norms (grid quadrature in physical space, Parseval in spectral) ----

/// L^p norm by grid quadrature, cell volume (L/n)^3; p = infinity gives max.
double norm_lp(const ScalarField& f, double p);
double norm_lp(const Field& f, double p);

/// Homogeneous Sobolev norm via Parseval; s < 0 requires zero mean.
double norm_hdot(const ScalarField& f, double s);
double norm_hdot(const Field& f, double s);

/// Enstrophy norm: identical to the Hdot^1 norm on the torus.
double norm_v(const Field& f);

/// Pointwise Euclidean magnitude |u(x)| as a plain sample array.
std::vector<double> magnitude_samples(const Field& f);

/// Pointwise Frobenius norm of the velocity gradient, sqrt(sum_ij (d_j u_i)^2).
std::vector<double> gradient_magnitude_samples(const Field& f);

// ---- misc ----

Field axpy(double a, const Field& x, const Field& y);  ///< a*x + y
Field scale(double a, const Field& x);
ScalarField scale(double a, const ScalarField& x);

/// Zeroes every mode with |k_i| > n/3 in any axis (2/3 rule).
void dealias_spectrum(const GridSpec& grid, Complex* spec);

/// Exact spectral translation f(. + offset) for any real offset.
ScalarField translate(const ScalarField& f, const Vec3& offset);
Field translate(const Field& f, const Vec3& offset);

} // namespace nsrl
