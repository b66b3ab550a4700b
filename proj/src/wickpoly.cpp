#include "wicknls/wickpoly.hpp"

#include <cmath>
#include <stdexcept>

namespace wicknls {

void WickContext::validate() const {
    if (order < 1) throw std::domain_error("WickContext: order must be >= 1");
    if (!(variance > 0.0)) throw std::domain_error("WickContext: variance must be > 0");
}

double hermite(int k, double x, double sigma) {
    if (k < 0) throw std::domain_error("hermite: k must be >= 0");
    if (!(sigma > 0.0)) throw std::domain_error("hermite: sigma must be > 0");
    double hm1 = 0.0, h = 1.0; // H_{-1}, H_0
    for (int j = 0; j < k; ++j) {
        const double next = x * h - double(j) * sigma * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

double laguerre(int m, double x) {
    if (m < 0) throw std::domain_error("laguerre: m must be >= 0");
    double lm1 = 0.0, l = 1.0; // L_{-1}, L_0
    for (int j = 0; j < m; ++j) {
        const double next = ((double(2 * j + 1) - x) * l - double(j) * lm1) / double(j + 1);
        lm1 = l;
        l = next;
    }
    return l;
}

double generalized_laguerre(int m, int alpha, double x) {
    if (m < 0 || alpha < 0) throw std::domain_error("generalized_laguerre: m, alpha must be >= 0");
    double lm1 = 0.0, l = 1.0;
    for (int j = 0; j < m; ++j) {
        const double next = ((double(2 * j + 1 + alpha) - x) * l - double(j + alpha) * lm1) / double(j + 1);
        lm1 = l;
        l = next;
    }
    return l;
}

double wick_abs_power(std::complex<double> z, const WickContext& ctx) {
    ctx.validate();
    const int m = ctx.order;
    const double sigma = ctx.variance;
    double mfact = 1.0;
    for (int j = 2; j <= m; ++j) mfact *= double(j);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * mfact * std::pow(sigma, m) * laguerre(m, std::norm(z) / sigma);
}

double wick_hermite_split(std::complex<double> z, const WickContext& ctx) {
    ctx.validate();
    const int m = ctx.order;
    const double half = ctx.variance / 2.0;
    double sum = 0.0;
    for (int l = 0; l <= m; ++l)
        sum += binomial(m, l) * hermite(2 * l, z.real(), half) * hermite(2 * (m - l), z.imag(), half);
    return sum;
}

double monomial_to_hermite(int k, double x, double sigma) {
    if (k < 0) throw std::domain_error("monomial_to_hermite: k must be >= 0");
    double sum = 0.0;
    double sigma_pow = 1.0;
    for (int j = 0; 2 * j <= k; ++j) {
        sum += binomial(k, 2 * j) * double_factorial_odd(j) * sigma_pow * hermite(k - 2 * j, x, sigma);
        sigma_pow *= sigma;
    }
    return sum;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * double(n - k + j) / double(j);
    return std::round(c);
}

double double_factorial_odd(int k) {
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v *= double(2 * j - 1);
    return v;
}

} // namespace wicknls
