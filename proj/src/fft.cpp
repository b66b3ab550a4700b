#include "wicknls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace wicknls {

namespace {

// One measured plan pair per size, shared process-wide and executed on
// per-instance buffers via the new-array interface (all buffers come from
// fftw_malloc, so alignment is uniform). The FFTW planner itself is not
// thread-safe; execution on distinct buffers is.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

const PlanPair& shared_plans(int size) {
    static std::mutex mu;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(size);
    if (it != cache.end()) return it->second;
    fftw_complex* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::size_t(size) * size));
    if (!scratch) throw std::bad_alloc();
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(size, size, scratch, scratch, FFTW_FORWARD, FFTW_MEASURE);
    p.bwd = fftw_plan_dft_2d(size, size, scratch, scratch, FFTW_BACKWARD, FFTW_MEASURE);
    fftw_free(scratch);
    if (!p.fwd || !p.bwd) throw std::runtime_error("Fft2d: plan creation failed");
    return cache.emplace(size, p).first->second;
}

} // namespace

int fft_friendly_size(int n) {
    if (n < 1) return 1;
    for (int g = n;; ++g) {
        int r = g;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return g;
    }
}

Fft2d::Fft2d(int size) : size_(size) {
    if (size < 1) throw std::invalid_argument("Fft2d: size must be >= 1");
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * points()));
    if (!buf_) throw std::bad_alloc();
    const PlanPair& plans = shared_plans(size);
    plan_fwd_ = plans.fwd;
    plan_bwd_ = plans.bwd;
}

Fft2d::~Fft2d() {
    if (buf_) fftw_free(buf_); // plans are shared, never destroyed
}

Fft2d::Fft2d(Fft2d&& other) noexcept
    : size_(other.size_), buf_(other.buf_), plan_fwd_(other.plan_fwd_), plan_bwd_(other.plan_bwd_) {
    other.buf_ = nullptr;
    other.plan_fwd_ = other.plan_bwd_ = nullptr;
}

void Fft2d::zero() {
    for (std::size_t i = 0; i < points(); ++i) buf_[i] = 0.0;
}

void Fft2d::synthesize() {
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), b, b);
}

void Fft2d::analyze() {
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), b, b);
    const double inv = 1.0 / double(points());
    for (std::size_t i = 0; i < points(); ++i) buf_[i] *= inv;
}

} // namespace wicknls
