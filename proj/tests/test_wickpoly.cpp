#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "wicknls/rng.hpp"
#include "wicknls/stats.hpp"
#include "wicknls/wickpoly.hpp"

using namespace wicknls;
using std::complex;

namespace {

// Exact integer-coefficient oracle for m! L_m(x): the scaled recurrence
// P_{m+1} = (2m+1-x) P_m - m^2 P_{m-1} keeps all coefficients in Z.
std::vector<long long> scaled_laguerre_coeffs(int m) {
    std::vector<long long> pm1{1};    // P_0
    if (m == 0) return pm1;
    std::vector<long long> p{1, -1};  // P_1 = 1 - x
    for (int j = 1; j < m; ++j) {
        std::vector<long long> next(p.size() + 1, 0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i] += (2LL * j + 1) * p[i]; // (2j+1) P_j
            next[i + 1] -= p[i];             // -x P_j
        }
        for (std::size_t i = 0; i < pm1.size(); ++i) next[i] -= 1LL * j * j * pm1[i];
        pm1 = std::move(p);
        p = std::move(next);
    }
    return p;
}

double eval_coeffs(const std::vector<long long>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + double(c[i]);
    return v;
}

// closed-form Laguerre sum with exact rational coefficients
double laguerre_sum(int m, double x) {
    long double acc = 0.0L, fact = 1.0L, xpow = 1.0L;
    for (int l = 0; l <= m; ++l) {
        if (l > 0) {
            fact *= l;
            xpow *= x;
        }
        const long double sign = (l % 2 == 0) ? 1.0L : -1.0L;
        acc += sign * (long double)binomial(m, l) / fact * xpow;
    }
    return double(acc);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

} // namespace

TEST_CASE("hermite pinned values") {
    CHECK(hermite(2, 2.0, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(hermite(0, 17.3, 5.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hermite(4, 0.0, 2.0) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(hermite(3, 1.5, 0.5) == doctest::Approx(1.5 * 1.5 * 1.5 - 3 * 0.5 * 1.5).epsilon(1e-14));
    CHECK_THROWS_AS(hermite(2, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(hermite(2, 1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(hermite(-1, 1.0, 1.0), std::domain_error);
}

TEST_CASE("hermite scaling route H_k(x;sigma) = sigma^{k/2} H_k(x/sqrt(sigma))") {
    for (int k = 0; k <= 10; ++k)
        for (double sigma : {0.3, 1.0, 2.7})
            for (double x : {-3.0, -0.4, 0.0, 1.9, 6.0}) {
                const double scaled = std::pow(sigma, k / 2.0) * hermite(k, x / std::sqrt(sigma), 1.0);
                CHECK(rel_err(hermite(k, x, sigma), scaled) < 1e-12);
            }
}

TEST_CASE("laguerre pinned values and closed-form sum") {
    CHECK(laguerre(2, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(laguerre(1, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(laguerre(4, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // recurrence vs explicit sum, m <= 12, |x| <= 50
    for (int m = 0; m <= 12; ++m)
        for (double x : {-50.0, -17.3, -1.0, 0.0, 0.5, 3.0, 12.0, 50.0})
            CHECK(std::abs(laguerre(m, x) - laguerre_sum(m, x)) <=
                  1e-12 * std::max(1.0, std::abs(laguerre_sum(m, x))));
}

TEST_CASE("generalized laguerre") {
    for (double x : {-2.0, 0.0, 1.0, 7.5})
        CHECK(generalized_laguerre(3, 0, x) == doctest::Approx(laguerre(3, x)).epsilon(1e-13));
    CHECK(generalized_laguerre(0, 1, 9.9) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(generalized_laguerre(1, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-14)); // L_1^{(1)} = 2 - x
}

TEST_CASE("displayed Wick expansions match coefficient-wise") {
    // :|g|^2: = t - 1, :|g|^4: = t^2 - 4t + 2, :|g|^6: = t^3 - 9t^2 + 18t - 6 (t = |g|^2)
    const std::vector<std::vector<long long>> expected = {
        {-1, 1}, {2, -4, 1}, {-6, 18, -9, 1}};
    for (int m = 1; m <= 3; ++m) {
        std::vector<long long> p = scaled_laguerre_coeffs(m); // m! L_m
        if (m % 2 == 1)
            for (auto& c : p) c = -c; // (-1)^m m! L_m
        CHECK(p == expected[std::size_t(m - 1)]);
        // and the evaluator agrees with the exact polynomial
        for (double t : {0.0, 0.7, 2.0, 5.5}) {
            const double direct = eval_coeffs(p, t);
            const double viaop = wick_abs_power(std::sqrt(t), WickContext{m, 1.0});
            CHECK(rel_err(direct, viaop) < 1e-13);
        }
    }
}

TEST_CASE("wick_abs_power pinned values") {
    CHECK(wick_abs_power(complex<double>(1.0, 0.0), WickContext{1, 1.0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(wick_abs_power(complex<double>(std::sqrt(2.0), 0.0), WickContext{2, 1.0}) ==
          doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(wick_abs_power(complex<double>(0.0, 0.0), WickContext{3, 1.0}) ==
          doctest::Approx(-6.0).epsilon(1e-13));
    CHECK_THROWS_AS(wick_abs_power(1.0, WickContext{0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(wick_abs_power(1.0, WickContext{2, 0.0}), std::domain_error);
}

TEST_CASE("wick_hermite_split equals wick_abs_power (10^4 random points)") {
    CHECK(wick_hermite_split(complex<double>(1.0, 0.0), WickContext{1, 1.0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(wick_hermite_split(complex<double>(1.0, 1.0), WickContext{2, 1.0}) ==
          doctest::Approx(-2.0).epsilon(1e-13));
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const uint64_t key = rng::hash2(0x5eedULL, uint64_t(i));
        const complex<double> z = 2.0 * rng::standard_complex_gaussian(key);
        const double sigma = 0.25 + 3.75 * rng::uniform01(rng::hash2(key, 1));
        const int m = 1 + int(rng::hash2(key, 2) % 4);
        const double a = wick_abs_power(z, WickContext{m, sigma});
        const double b = wick_hermite_split(z, WickContext{m, sigma});
        worst = std::max(worst, rel_err(a, b));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("monomial_to_hermite reproduces x^k") {
    CHECK(monomial_to_hermite(2, 3.0, 1.0) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(monomial_to_hermite(4, 0.0, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(monomial_to_hermite(6, 1.5, 0.7) == doctest::Approx(std::pow(1.5, 6)).epsilon(1e-12));
    // alternating Hermite terms cancel down to x^k, so allow a little roundoff
    for (int k = 0; k <= 9; ++k)
        for (double sigma : {0.4, 1.0, 3.0})
            for (double x : {-2.2, 0.3, 1.7})
                CHECK(rel_err(monomial_to_hermite(k, x, sigma), std::pow(x, k)) < 1e-10);
}

TEST_CASE("differentiation rules by central differences") {
    const double h = 1e-5;
    for (int k = 1; k <= 6; ++k)
        for (double x : {-1.3, 0.2, 2.4})
            for (double sigma : {0.5, 1.0, 2.0}) {
                const double numeric = (hermite(k, x + h, sigma) - hermite(k, x - h, sigma)) / (2 * h);
                CHECK(std::abs(numeric - k * hermite(k - 1, x, sigma)) < 1e-6);
            }
    for (int m = 1; m <= 5; ++m)
        for (int alpha : {0, 1, 2})
            for (double x : {0.3, 1.9, 4.2}) {
                const double numeric =
                    (generalized_laguerre(m, alpha, x + h) - generalized_laguerre(m, alpha, x - h)) / (2 * h);
                CHECK(std::abs(numeric + generalized_laguerre(m - 1, alpha + 1, x)) < 1e-6);
            }
}

TEST_CASE("scaling homogeneity of L_m(x; sigma)") {
    auto lm_sigma = [](int m, double x, double sigma) { return std::pow(sigma, m) * laguerre(m, x / sigma); };
    for (int m = 1; m <= 6; ++m)
        for (double c : {0.2, 1.0, 5.0})
            for (double x : {0.1, 1.0, 9.0})
                for (double sigma : {0.3, 1.0, 2.0})
                    CHECK(rel_err(lm_sigma(m, c * x, c * sigma), std::pow(c, m) * lm_sigma(m, x, sigma)) <
                          1e-12);
}

TEST_CASE("zero mean of wick powers over 10^6 standard complex Gaussians") {
    const std::size_t n = 1000000;
    for (int m = 1; m <= 4; ++m) {
        std::vector<double> vals(n);
        const WickContext ctx{m, 1.0};
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = rng::standard_complex_gaussian(rng::hash3(0x11aaULL, uint64_t(m), i));
            vals[i] = wick_abs_power(g, ctx);
        }
        const MeanStderr s = mean_stderr(vals);
        INFO("m=", m, " mean=", s.mean, " stderr=", s.stderr_);
        CHECK(std::abs(s.mean) <= 4.0 * s.stderr_);
    }
}
