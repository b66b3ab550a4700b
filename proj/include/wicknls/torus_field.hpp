#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wicknls/fft.hpp"
#include "wicknls/lattice.hpp"
#include "wicknls/rng.hpp"

namespace wicknls {

using cplx = std::complex<double>;

// Truncated field on T^2: coefficients u_hat(n) over the ball |n| <= cutoff,
// stored in the lexicographic layout of ModeSet::get(cutoff).
struct SpectralField {
    int cutoff = 0;
    std::vector<cplx> coeff;

    static SpectralField zero(int cutoff) {
        return {cutoff, std::vector<cplx>(ModeSet::get(cutoff).size(), cplx{0.0, 0.0})};
    }

    const ModeSet& mode_set() const { return ModeSet::get(cutoff); }

    cplx at(Mode n) const {
        const auto i = mode_set().index_of(n);
        return i < 0 ? cplx{0.0, 0.0} : coeff[std::size_t(i)];
    }
    void set(Mode n, cplx v);

    double mass() const; // sum |u_hat(n)|^2
};

// Massive GFF sample: u_hat(n) = g_n / sqrt(1+|n|^2), g_n from the counter-based
// noise stream of `seed`.
SpectralField sample_gff(uint64_t seed, int n_max);
SpectralField field_from_noise(const NoiseVector& noise);

// Dirichlet projection P_N; requires N <= field.cutoff.
SpectralField project(const SpectralField& field, int n_cut);

// sigma_N = sum_{|n|<=N} 1/(1+|n|^2)
double sigma_n(int n_cut);

// Truncated covariance gamma_{s,N} with coefficients (1+|n|^2)^{-s/2}.
struct CovarianceKernel {
    double s = 2.0;
    int cutoff = 0;
    std::vector<double> coeff; // aligned with ModeSet::get(cutoff)
};

CovarianceKernel gamma_kernel(double s, int n_cut);
// gamma_{s,N}(x) = sum (1+|n|^2)^{-s/2} e^{i n.x}; real for all x by n <-> -n symmetry.
cplx gamma_eval(const CovarianceKernel& kernel, double x1, double x2);

// White noise functional W_f = sum f_hat(n) conj(g_n); f must be supported
// within the noise's mode set.
cplx white_noise_functional(const SpectralField& f, const NoiseVector& noise);

// Coefficients of eta_N(x): sigma_N^{-1/2} e^{-i n.x} / sqrt(1+|n|^2), unit L^2 norm.
SpectralField eta_n(double x1, double x2, int n_cut);

// Inner product sum f_hat(n) conj(h_hat(n)) over the joint support.
cplx l2_inner(const SpectralField& f, const SpectralField& h);

// Uniform-grid transforms, x_j = 2*pi*j/G. Exact round trip needs G >= 2N+1.
// default_grid_size follows the power-of-two default G >= 2N+2.
int default_grid_size(int n_cut);
std::vector<cplx> to_physical(const SpectralField& field, int grid_size);
std::vector<cplx> to_physical(const SpectralField& field);
SpectralField to_spectral(const std::vector<cplx>& values, int grid_size, int n_cut);

// Reusable FFT workspace for hot loops: embed/extract the mode ball directly.
class TorusGrid {
public:
    TorusGrid(int n_cut, int grid_size);

    int grid_size() const { return fft_.size(); }
    int cutoff() const { return n_cut_; }

    // coefficient span aligned with ModeSet::get(n_cut) -> grid values in values()
    void synthesize(const cplx* coeff);
    std::complex<double>* values() { return fft_.data(); }
    const std::complex<double>* values() const { return fft_.data(); }

    // grid values currently in values() -> coefficients on |n| <= n_cut
    void analyze(cplx* coeff_out);

private:
    int n_cut_;
    std::vector<std::size_t> embed_; // mode index -> buffer index
    Fft2d fft_;
};

// Binary serialization: "WGF1", cutoff u32, count u32, then per record
// (n1 i32, n2 i32, re f64, im f64) in lexicographic mode order. Little endian.
void save_field(const SpectralField& field, std::ostream& os);
SpectralField load_field(std::istream& is);
void save_field_file(const SpectralField& field, const std::string& path);
SpectralField load_field_file(const std::string& path);
std::string field_to_json(const SpectralField& field);

} // namespace wicknls
