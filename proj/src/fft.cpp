#include "nsrl/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace nsrl {

template <class T>
AlignedBuffer<T>::AlignedBuffer(std::size_t count) : size_(count) {
    data_ = static_cast<T*>(fftw_malloc(sizeof(T) * (count == 0 ? 1 : count)));
    std::memset(data_, 0, sizeof(T) * (count == 0 ? 1 : count));
}

template <class T>
AlignedBuffer<T>::AlignedBuffer(const AlignedBuffer& other) : AlignedBuffer(other.size_) {
    std::memcpy(data_, other.data_, sizeof(T) * size_);
}

template <class T>
AlignedBuffer<T>::~AlignedBuffer() {
    if (data_) fftw_free(data_);
}

template class AlignedBuffer<double>;
template class AlignedBuffer<Complex>;

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// Plans are created once per grid size on scratch buffers and executed via
/// the new-array interface. All field buffers come from fftw_malloc, so the
/// alignment assumptions baked into the plan hold.
const PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const std::size_t nreal = static_cast<std::size_t>(n) * n * n;
    const std::size_t nspec = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    RealBuffer scratch_r(nreal);
    ComplexBuffer scratch_c(nspec);

    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_3d(n, n, n, scratch_r.data(),
                                 reinterpret_cast<fftw_complex*>(scratch_c.data()),
                                 FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_3d(n, n, n,
                                 reinterpret_cast<fftw_complex*>(scratch_c.data()),
                                 scratch_r.data(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    auto [pos, inserted] = cache.emplace(n, p);
    (void)inserted;
    return pos->second;
}

} // namespace

void Fft::forward(const GridSpec& grid, const double* phys, Complex* spec) {
    const int n = grid.n;
    const PlanPair& p = plans_for(n);
    // r2c out-of-place preserves its input, but the new-array API wants a
    // non-const pointer; stage through a scratch copy to keep the promise.
    RealBuffer scratch(grid.point_count());
    std::memcpy(scratch.data(), phys, sizeof(double) * grid.point_count());
    fftw_execute_dft_r2c(p.r2c, scratch.data(), reinterpret_cast<fftw_complex*>(spec));
    const double scale = 1.0 / static_cast<double>(grid.point_count());
    for (std::size_t i = 0; i < grid.spectral_count(); ++i) spec[i] *= scale;
}

void Fft::inverse(const GridSpec& grid, const Complex* spec, double* phys) {
    const int n = grid.n;
    const PlanPair& p = plans_for(n);
    ComplexBuffer scratch(grid.spectral_count());
    std::memcpy(scratch.data(), spec, sizeof(Complex) * grid.spectral_count());
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), phys);
}

} // namespace nsrl
