#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "wicknls/dynamics.hpp"
#include "wicknls/torus_field.hpp"

namespace wicknls {

// Dirichlet eigenbasis of the square [0,pi]^2:
//   phi_{jk}(x,y) = (2/pi) sin(jx) sin(ky),  eigenvalue lambda^2 = j^2 + k^2,
// orthonormal under the plain (unnormalized) Lebesgue measure.
struct ModeJK {
    int j = 1;
    int k = 1;
    int64_t eigen_sq() const { return int64_t(j) * j + int64_t(k) * k; }
};

struct DirichletBasis {
    int cutoff = 0;            // lambda <= cutoff
    std::vector<ModeJK> modes; // sorted by (lambda^2, j, k); prefixes are sub-bases

    static const DirichletBasis& get(int cutoff);
    std::size_t size() const { return modes.size(); }
};

// #{ (j,k) : j,k >= 1, j^2 + k^2 <= N^2 }
int weyl_count(int n_cut);

double phi_jk(ModeJK n, double x1, double x2);

// Field on the domain: coefficients aligned with DirichletBasis::get(cutoff).
struct DomainField {
    int cutoff = 0;
    std::vector<cplx> coeff;

    static DomainField zero(int cutoff) {
        return {cutoff, std::vector<cplx>(DirichletBasis::get(cutoff).size(), cplx{0, 0})};
    }
};

DomainField sample_domain_gff(uint64_t seed, int n_cut);
DomainField project_domain(const DomainField& field, int n_cut);
double domain_field_eval_abs2_sum(const DomainField& field); // sum |coeff|^2

// Pointwise field synthesis at an arbitrary point.
cplx domain_field_eval(const DomainField& field, double x1, double x2);

// sigma_N(x) = sum_{lambda<=N} |phi_n(x)|^2 / (1+lambda^2)
double sigma_domain_at(int n_cut, double x1, double x2);

// Variance field on the midpoint quadrature grid (size per axis).
struct VarianceField {
    int n_cut = 0;
    int grid = 0;
    std::vector<double> values; // row-major grid x grid
    double at(int i1, int i2) const { return values[std::size_t(i1) * grid + i2]; }
};

VarianceField sigma_field(int n_cut, int grid = 0); // grid 0 -> 4*n_cut+4

// Spectral band pi_j(x,y) = sum_{lambda in (j-1, j]} phi_n(x) phi_n(y); x, y
// are points of the square.
double spectral_band(int j, double x1, double x2, double y1, double y2);

// gamma_{s,N}(x,y) = sum_{lambda<=N} phi_n(x) phi_n(y) / (1+lambda^2)^{s/2}
double gamma_s_domain(double s, int n_cut, double x1, double x2, double y1, double y2);

// ||gamma_{s,M} - gamma_{s,N}||_{L^p(M^2)}. p = 2 is the exact eigenvalue sum;
// larger even p uses tensor midpoint quadrature (exact for the trig
// polynomial integrand). p must lie in the admissible range: 2 <= p <
// 2/(2-s) for 1 < s <= 2, any even p for s >= 2.
double gamma_lp_distance(double s, int p, int n_small, int n_large);

// Wick quadrature on the domain for fixed (m, N): uniform midpoint tensor
// grid of size 4mN per axis, x-dependent variance sigma_N(x).
class DomainEvaluator {
public:
    DomainEvaluator(int m, int n_cut);

    int order() const { return m_; }
    int cutoff() const { return n_cut_; }
    int grid() const { return grid_; }

    double g_value(const cplx* coeff);          // G_N(u), plain Lebesgue integral
    void f_value(const cplx* coeff, cplx* out); // Wick nonlinearity, projected to lambda <= N

private:
    void synthesize(const cplx* coeff);

    int m_;
    int n_cut_;
    int grid_;
    std::vector<double> sin_node_;  // [j-1][i] = sin(j * x_i), j <= n_cut
    std::vector<double> sigma_;     // sigma_N on the grid
    std::vector<cplx> stage_;       // partial sums over k
    std::vector<cplx> values_;      // u on the grid
};

double g_functional_domain(const DomainField& field, int n_cut, int m);

// Exact ||G_M - G_N||_{L^2(mu)} on the domain:
// (2m)^2 ||.||^2 = (m!)^2 int int [gamma_M^{2m} - gamma_N^{2m}] dx dy.
double g_l2_distance_exact_domain(int m, int n_small, int n_large);

// J_{K,n} = m!(m-1)! int int gamma_K^{2m-1} phi_n(x) phi_n(y) dx dy for every
// mode of DirichletBasis::get(lambda_max).
std::vector<double> f_coeff_l2_exact_domain(int m, int n_cut, int lambda_max);

// H^{-eps} distance surrogate for F_M - F_N by quadrature:
// sum_{lambda<=N} (1+lambda^2)^{-eps} (J_{M,n} - J_{N,n})
//   + sum_{N<lambda<=M} (1+lambda^2)^{-eps} J_{M,n}.
double f_distance_heps_sq_domain(int m, int n_small, int n_large, double eps);

// Truncated Wick NLS on the domain (same integrator as the torus module with
// the eigenbasis transform substituted for the Fourier transform).
DomainField evolve_domain_to(const DomainField& field, int n_cut, int m, double t_final,
                             const IntegratorConfig& config = {});
double mass_domain(const DomainField& field, int n_cut);
double hamiltonian_wick_domain(const DomainField& field, int n_cut, int m);

} // namespace wicknls
