#pragma once

#include <complex>

namespace wicknls {

// Order/variance bundle carried by every Wick-ordered evaluation. The variance
// is the scalar sigma of L_m(x; sigma) = sigma^m L_m(x/sigma); on domains with
// x-dependent variance the caller passes sigma(x) pointwise.
struct WickContext {
    int order = 1;       // m >= 1
    double variance = 1; // sigma > 0

    void validate() const;
};

// Hermite polynomial H_k(x; sigma), generating function e^{t x - sigma t^2/2},
// by the three-term recurrence H_{k+1} = x H_k - k sigma H_{k-1}.
double hermite(int k, double x, double sigma);

// Laguerre polynomial L_m(x) by the standard recurrence
// (m+1) L_{m+1} = (2m+1-x) L_m - m L_{m-1}.
double laguerre(int m, double x);

// Generalized Laguerre L_m^{(alpha)}(x), integer alpha >= 0; alpha = 0
// coincides with laguerre().
double generalized_laguerre(int m, int alpha, double x);

// Wick-ordered modulus power of a complex Gaussian amplitude:
//   :|z|^{2m}: = (-1)^m m! sigma^m L_m(|z|^2 / sigma).
double wick_abs_power(std::complex<double> z, const WickContext& ctx);

// The same quantity through the Hermite split
//   sum_l C(m,l) H_{2l}(Re z; sigma/2) H_{2m-2l}(Im z; sigma/2);
// equals wick_abs_power pointwise.
double wick_hermite_split(std::complex<double> z, const WickContext& ctx);

// Evaluates the Hermite expansion of the monomial
//   x^k = sum_m C(k,2m) (2m-1)!! sigma^m H_{k-2m}(x; sigma);
// reproduces x^k for every sigma > 0.
double monomial_to_hermite(int k, double x, double sigma);

// Exact binomial coefficient as a double (small arguments).
double binomial(int n, int k);

// (2k-1)!! with (-1)!! = 1.
double double_factorial_odd(int k);

} // namespace wicknls
