#pragma once

#include <complex>
#include <cstddef>
#include <utility>

#include "nsrl/grid.hpp"

namespace nsrl {

using Complex = std::complex<double>;

/// FFTW-aligned buffer with RAII ownership.
template <class T>
class AlignedBuffer {
public:
    AlignedBuffer() = default;
    explicit AlignedBuffer(std::size_t count);
    AlignedBuffer(const AlignedBuffer& other);
    AlignedBuffer(AlignedBuffer&& other) noexcept : data_(other.data_), size_(other.size_) {
        other.data_ = nullptr;
        other.size_ = 0;
    }
    AlignedBuffer& operator=(AlignedBuffer other) noexcept {
        std::swap(data_, other.data_);
        std::swap(size_, other.size_);
        return *this;
    }
    ~AlignedBuffer();

    T* data() { return data_; }
    const T* data() const { return data_; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return size_; }

private:
    T* data_ = nullptr;
    std::size_t size_ = 0;
};

using RealBuffer = AlignedBuffer<double>;
using ComplexBuffer = AlignedBuffer<Complex>;

/// Real-to-complex 3D transforms for an n^3 grid, plan-cached per n.
/// Forward output is normalized by 1/n^3, so the k=0 coefficient is the mean
/// and physical values are plain sums of coefficient * exp(i k.x).
/// Plans use FFTW_ESTIMATE and single-threaded execution: transform results
/// are identical regardless of NSRL_THREADS.
class Fft {
public:
    /// Physical (n^3 doubles) -> spectral (n*n*(n/2+1) complex). Input preserved.
    static void forward(const GridSpec& grid, const double* phys, Complex* spec);
    /// Spectral -> physical. Input preserved (internally copies: FFTW c2r clobbers).
    static void inverse(const GridSpec& grid, const Complex* spec, double* phys);
};

} // namespace nsrl
