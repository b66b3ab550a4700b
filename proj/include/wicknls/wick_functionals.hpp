#pragma once

#include <vector>

#include "wicknls/torus_field.hpp"
#include "wicknls/wickpoly.hpp"

namespace wicknls {

// Renormalized energy G_N(u) = (1/2m) int :|P_N u|^{2m}: dx (normalized
// measure). Quadrature is exact by construction: the integrand is a trig
// polynomial of degree 2mN and the grid has size >= 2mN+1 per axis.
// ctx.variance must equal sigma_n(N).
double g_functional(const SpectralField& field, int n_cut, const WickContext& ctx);
double g_functional(const SpectralField& field, int n_cut, int m); // fills sigma_N itself

// Wick nonlinearity F_N(u) = P_N(:|P_N u|^{2(m-1)} P_N u:), evaluated
// pseudospectrally on a grid of size >= (2m-1)N+1 and projected back.
SpectralField f_functional(const SpectralField& field, int n_cut, const WickContext& ctx);
SpectralField f_functional(const SpectralField& field, int n_cut, int m);

// Reusable evaluator holding the grid workspace for fixed (m, N); this is the
// hot path for Monte Carlo loops and the ODE right-hand side.
class WickEvaluator {
public:
    WickEvaluator(int m, int n_cut, int min_grid = 0);

    int order() const { return m_; }
    int cutoff() const { return n_cut_; }
    double sigma() const { return sigma_; }
    int grid_size() const { return grid_.grid_size(); }

    // field coefficients aligned with ModeSet::get(n_cut)
    double g_value(const cplx* low_coeff);
    void f_value(const cplx* low_coeff, cplx* f_out);

private:
    int m_;
    int n_cut_;
    double sigma_;
    TorusGrid grid_;
    std::vector<double> lag_coeff_; // coefficients of (-1)^m m! sigma^m L_m(t/sigma) in t
};

// Fourier coefficients of gamma_{2,N}^k, i.e. the k-fold autocorrelation of
// the coefficient array c(n) = 1/(1+|n|^2), |n| <= N. Values at frequency n
// equal the Gamma_k(n) lattice sums. kind even -> k = 2m, odd -> k = 2m-1.
enum class ConvKind { even, odd };

struct ConvolutionTable {
    int order = 0;  // k
    int n_cut = 0;  // N
    int radius = 0; // values cover |n_i| <= radius componentwise
    std::vector<double> values;

    double at(Mode n) const; // 0 outside the stored square

    std::size_t side() const { return std::size_t(2 * radius + 1); }
};

ConvolutionTable convolution_table(int m, int n_cut, ConvKind kind);

// Brute-force Gamma_k(n) sum over |n_j| <= N (oracle path, k <= 6, N <= 2).
double gamma_k_bruteforce(int k, int n_cut, Mode n);

// Exact ||G_M - G_N||_{L^2(mu)} = (m!/(2m)) sqrt(c(M) - c(N)) with
// c(K) = F[gamma_K^{2m}](0).
double g_l2_distance_exact(int m, int n_small, int n_large);

// Exact ||<F_N(u), e_n>||^2_{L^2(mu)} = m!(m-1)! F[gamma_N^{2m-1}](n);
// vanishes for |n| > N.
double f_coeff_l2_exact(int m, int n_cut, Mode n);
double f_coeff_l2_exact(const ConvolutionTable& odd_table, int m, int n_cut, Mode n);

// Exact squared H^s(mu) distance sum_n <n>^{2s} ||<F_M - F_N, e_n>||^2_{L^2(mu)}.
double f_distance_hs_sq_exact(int m, int n_small, int n_large, double s);

// Appendix-style brute-force decomposition of 6 G_N for m = 3. Every labelled
// term is computed by direct lattice enumeration; tuples of Gamma_6(0) are
// partitioned by their odd/even pairing structure (no pair / 1 pair / 3 pairs,
// the 3-pair class split by the shape of the shared value multiset).
struct AppendixTerms {
    double sigma = 0;       // sigma_N
    double s2 = 0;          // sum |g_n|^2/(1+|n|^2)
    double q4 = 0;          // sum |g_n|^4/(1+|n|^2)^2
    cplx term_i{};          // I   = Gamma_6(0) product sum
    cplx term_i1{};         //   no pair
    cplx term_i2{};         //   exactly one pair
    double term_i31 = 0;    //   three pairs, all values equal
    double term_i32 = 0;    //   three pairs, exactly two distinct values
    double term_i33 = 0;    //   three pairs, all values distinct
    cplx term_ii{};         // II  = -9 sigma * Gamma_4(0) product sum
    double term_iii = 0;    // III = 18 sigma^2 s2
    double term_iv = 0;     // IV  = -6 sigma^3
    double term_ii2 = 0;    // -18 sigma s2^2
    double term_ii3 = 0;    //  +9 sigma q4
    double term_i321 = 0;   //  +9 s2 q4
    double term_i331 = 0;   //  +6 s2^3
    double term_i332 = 0;   // -18 s2 q4
    double combined = 0;    // (I + II + III + IV) / 6, equals G_N per sample
};

AppendixTerms appendix_decomposition_m3(const SpectralField& field, int n_cut);

} // namespace wicknls
