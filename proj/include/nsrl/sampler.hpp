#pragma once

#include <vector>

#include "nsrl/field.hpp"
#include "nsrl/vec.hpp"

namespace nsrl {

/// Evaluates the truncated Fourier series of a field at arbitrary points
/// (exact trigonometric interpolation for band-limited fields).
///
/// Construction packs the bounding box of nonzero coefficients once; band
/// limited fields (k_max << n/2) then sample in O(k_max^3) instead of O(n^3).
/// Fields whose spectra were not cleaned keep the full cube and stay exact.
class TrigSampler {
public:
    explicit TrigSampler(const ScalarField& f);
    explicit TrigSampler(const Field& f);

    int components() const { return ncomp_; }

    /// out[0..components) receives the interpolated values at x (any real
    /// point; periodicity is implicit in the phases).
    void sample(const Vec3& x, double* out) const;

    double sample_scalar(const Vec3& x) const {
        double v;
        sample(x, &v);
        return v;
    }
    Vec3 sample_vector(const Vec3& x) const {
        Vec3 v;
        sample(x, v.data());
        return v;
    }

private:
    void pack(const GridSpec& grid, const Complex* const* specs);

    GridSpec grid_;
    int ncomp_ = 0;
    int kx_max_ = 0;
    int ky_min_ = 0, ky_max_ = 0;
    int kz_min_ = 0, kz_max_ = 0;
    // packed coefficients, SoA; index ((kz-kz_min)*NY + (ky-ky_min))*(kx_max+1) + kx
    std::vector<double> cre_[3];
    std::vector<double> cim_[3];
};

/// One-off convenience (builds a sampler per call; fine for tests).
double sample(const ScalarField& f, const Vec3& x);
Vec3 sample(const Field& f, const Vec3& x);

/// Flush coefficients below rel_tol * max|coef| to exact zero. Generators and
/// the pressure solve use this to keep fields genuinely band-limited.
void clean_spectrum(ComplexBuffer& spec, double rel_tol = 1e-14);

} // namespace nsrl
