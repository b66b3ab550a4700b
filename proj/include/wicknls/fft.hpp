#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wicknls {

// Smallest 5-smooth integer >= n (sizes FFTW handles at full speed).
int fft_friendly_size(int n);

// Square 2-d complex transform of a fixed size G.
//
// Conventions (normalized Haar measure on T^2, orthonormal e_n):
//   synthesize:  v(x_j) = sum_k c(k) e^{+i k.x_j},  x_j = 2*pi*j/G
//   analyze:     c(k)   = (1/G^2) sum_j v(x_j) e^{-i k.x_j}
//
// Buffers are row-major G x G with frequency k stored at (k mod G).
class Fft2d {
public:
    explicit Fft2d(int size);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;
    Fft2d(Fft2d&& other) noexcept;
    Fft2d& operator=(Fft2d&&) = delete;

    int size() const { return size_; }
    std::size_t points() const { return std::size_t(size_) * size_; }

    // in-place on the internal buffer
    std::complex<double>* data() { return buf_; }
    const std::complex<double>* data() const { return buf_; }
    void zero();

    void synthesize(); // coefficients -> grid values
    void analyze();    // grid values  -> coefficients (applies 1/G^2)

private:
    int size_ = 0;
    std::complex<double>* buf_ = nullptr;
    void* plan_fwd_ = nullptr; // e^{-i}, unnormalized
    void* plan_bwd_ = nullptr; // e^{+i}
};

} // namespace wicknls
