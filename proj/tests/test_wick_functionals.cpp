#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "wicknls/errors.hpp"
#include "wicknls/stats.hpp"
#include "wicknls/wick_functionals.hpp"

using namespace wicknls;

namespace {

double factorial(int n) {
    double f = 1;
    for (int j = 2; j <= n; ++j) f *= j;
    return f;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

} // namespace

TEST_CASE("g_functional on the zero field") {
    const SpectralField z0 = SpectralField::zero(0);
    CHECK(g_functional(z0, 0, 2) == doctest::Approx(0.5).epsilon(1e-13));
    for (int m : {2, 3})
        for (int n : {0, 2}) {
            const SpectralField z = SpectralField::zero(n);
            const double expected =
                (m % 2 == 0 ? 1.0 : -1.0) * factorial(m) * std::pow(sigma_n(n), m) / double(2 * m);
            CHECK(rel_err(g_functional(z, n, m), expected) < 1e-12);
        }
}

TEST_CASE("g_functional at N=0 equals the displayed sextic expansion") {
    for (int i = 0; i < 32; ++i) {
        const SpectralField u = sample_gff(rng::hash2(31, i), 0);
        const double t = std::norm(u.at({0, 0}));
        const double expected = (t * t * t - 9 * t * t + 18 * t - 6) / 6.0;
        CHECK(rel_err(g_functional(u, 0, 3), expected) < 1e-12);
    }
}

TEST_CASE("g_functional is grid-size independent once exact") {
    const SpectralField u = sample_gff(5, 3);
    const SpectralField low = project(u, 3);
    for (int m : {2, 3}) {
        WickEvaluator small(m, 3);
        WickEvaluator big(m, 3, 4 * m * 3 + 7);
        CHECK(rel_err(small.g_value(low.coeff.data()), big.g_value(low.coeff.data())) < 1e-13);
    }
}

TEST_CASE("g_value refuses an aliased grid") {
    WickEvaluator ev(2, 4, 2 * 4 + 1); // big enough for f, too small for g
    const SpectralField low = project(sample_gff(9, 4), 4);
    CHECK_THROWS_AS(ev.g_value(low.coeff.data()), aliasing_error);
}

TEST_CASE("E[G_N] = 0 over 10^6 samples") {
    const int n_cut = 2, m = 2;
    const std::size_t n = 1000000;
    std::vector<double> vals(n);
    WickEvaluator ev(m, n_cut);
    for (std::size_t i = 0; i < n; ++i) {
        const SpectralField u = sample_gff(rng::sample_stream(616, i), n_cut);
        vals[i] = ev.g_value(u.coeff.data());
    }
    const MeanStderr s = mean_stderr(vals);
    INFO("mean=", s.mean, " stderr=", s.stderr_);
    CHECK(std::abs(s.mean) <= 4.0 * s.stderr_);
}

TEST_CASE("f_functional: cubic case matches the direct formula") {
    const int n_cut = 3;
    const SpectralField u = project(sample_gff(12, 5), n_cut);
    const SpectralField f = f_functional(u, n_cut, 2);

    // direct: P_N((|u|^2 - 2 sigma_N) u) on an exact grid
    const double sigma = sigma_n(n_cut);
    const int grid = fft_friendly_size(3 * n_cut + 1);
    auto vals = to_physical(u, grid);
    for (auto& v : vals) v *= std::norm(v) - 2.0 * sigma;
    const SpectralField direct = to_spectral(vals, grid, n_cut);
    for (std::size_t i = 0; i < f.coeff.size(); ++i)
        CHECK(std::abs(f.coeff[i] - direct.coeff[i]) < 1e-11);
}

TEST_CASE("f_functional special fields") {
    const SpectralField z = SpectralField::zero(4);
    const SpectralField fz = f_functional(z, 4, 3);
    for (auto c : fz.coeff) CHECK(std::abs(c) == 0.0);

    // single mode: F_N(u) = (|c|^2 - 2 sigma_N) c at that mode
    SpectralField one = SpectralField::zero(4);
    const cplx c{0.8, -0.55};
    one.set({2, 1}, c);
    const SpectralField f = f_functional(one, 4, 2);
    const cplx expected = (std::norm(c) - 2.0 * sigma_n(4)) * c;
    const ModeSet& ms = ModeSet::get(4);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i] == Mode{2, 1})
            CHECK(std::abs(f.coeff[i] - expected) < 1e-12);
        else
            CHECK(std::abs(f.coeff[i]) < 1e-12);
    }
}

TEST_CASE("convolution tables") {
    // k = 2 at the origin: sum (1+|j|^2)^{-2}
    for (int n : {0, 1, 3}) {
        const ConvolutionTable t = convolution_table(1, n, ConvKind::even);
        const ModeSet& ms = ModeSet::get(n);
        double direct = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) direct += std::pow(1.0 + double(norm_sq(ms[i])), -2.0);
        CHECK(rel_err(t.at({0, 0}), direct) < 1e-12);
    }
    // N = 0: single lattice point
    for (int m : {2, 3}) {
        const ConvolutionTable t = convolution_table(m, 0, ConvKind::even);
        CHECK(t.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.at({1, 0}) == 0.0);
    }
    // symmetry
    const ConvolutionTable t = convolution_table(2, 2, ConvKind::odd);
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b)
            CHECK(t.at({a, b}) == doctest::Approx(t.at({-a, -b})).epsilon(1e-12));
}

TEST_CASE("transform tables equal nested-loop Gamma_k sums (k <= 6, N <= 2)") {
    for (int n_cut : {0, 1, 2})
        for (int k = 2; k <= 6; ++k) {
            const ConvolutionTable t = k % 2 == 0 ? convolution_table(k / 2, n_cut, ConvKind::even)
                                                  : convolution_table((k + 1) / 2, n_cut, ConvKind::odd);
            double worst = 0.0;
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b) {
                    const double brute = gamma_k_bruteforce(k, n_cut, {a, b});
                    worst = std::max(worst, rel_err(t.at({a, b}), brute));
                }
            INFO("k=", k, " N=", n_cut, " worst=", worst);
            CHECK(worst < 1e-10);
        }
    CHECK_THROWS_AS(gamma_k_bruteforce(6, 3, {0, 0}), resource_error);
}

TEST_CASE("g_l2_distance_exact basics") {
    CHECK(g_l2_distance_exact(2, 3, 3) == 0.0);
    CHECK(g_l2_distance_exact(3, 5, 5) == 0.0);
    // m=2, N=0, M=1 against the Gamma_4(0) brute force
    const double c1 = gamma_k_bruteforce(4, 1, {0, 0});
    const double c0 = gamma_k_bruteforce(4, 0, {0, 0});
    const double expected = factorial(2) / 4.0 * std::sqrt(c1 - c0);
    CHECK(rel_err(g_l2_distance_exact(2, 0, 1), expected) < 1e-10);
    CHECK_THROWS_AS(g_l2_distance_exact(1, 0, 1), std::domain_error);
    CHECK_THROWS_AS(g_l2_distance_exact(2, 3, 1), std::domain_error);
}

TEST_CASE("MC variance of G_M - G_N matches the closed form (light)") {
    const std::size_t n = 20000;
    for (int m : {2, 3}) {
        const int n_small = 2, n_large = 4;
        const double exact = g_l2_distance_exact(m, n_small, n_large);
        std::vector<double> diff(n);
        WickEvaluator ev_large(m, n_large);
        WickEvaluator ev_small(m, n_small, 2 * m * n_small + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const SpectralField u = sample_gff(rng::sample_stream(2000 + m, i), n_large);
            const SpectralField low = project(u, n_small);
            diff[i] = ev_large.g_value(u.coeff.data()) - ev_small.g_value(low.coeff.data());
        }
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = diff[i] * diff[i];
        const MeanStderr s = mean_stderr(sq);
        INFO("m=", m, " mc=", s.mean, " exact^2=", exact * exact);
        CHECK(std::abs(s.mean - exact * exact) <= 4.0 * s.stderr_);
    }
}

TEST_CASE("f_coeff_l2_exact basics and brute force") {
    // m=2, N=1, n=0: 2 * Gamma_3(0) sum
    const double expected = 2.0 * gamma_k_bruteforce(3, 1, {0, 0});
    CHECK(rel_err(f_coeff_l2_exact(2, 1, {0, 0}), expected) < 1e-10);
    CHECK(f_coeff_l2_exact(2, 1, {2, 2}) == 0.0);
    CHECK(f_coeff_l2_exact(3, 4, {5, 0}) == 0.0);
}

TEST_CASE("MC second moment of <F_N, e_n> matches (Z7) (light)") {
    const int m = 2, n_cut = 3;
    const std::size_t n = 20000;
    const ConvolutionTable table = convolution_table(m, n_cut, ConvKind::odd);
    const std::vector<Mode> probes{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 0}};
    std::vector<std::vector<double>> sq(probes.size(), std::vector<double>(n));
    WickEvaluator ev(m, n_cut, (2 * m - 1) * n_cut + 1);
    SpectralField f = SpectralField::zero(n_cut);
    const ModeSet& ms = ModeSet::get(n_cut);
    for (std::size_t i = 0; i < n; ++i) {
        const SpectralField u = sample_gff(rng::sample_stream(888, i), n_cut);
        ev.f_value(u.coeff.data(), f.coeff.data());
        for (std::size_t p = 0; p < probes.size(); ++p)
            sq[p][i] = std::norm(f.coeff[std::size_t(ms.index_of(probes[p]))]);
    }
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const MeanStderr s = mean_stderr(sq[p]);
        const double exact = f_coeff_l2_exact(table, m, n_cut, probes[p]);
        INFO("n=(", probes[p].n1, ",", probes[p].n2, ") mc=", s.mean, " exact=", exact);
        CHECK(std::abs(s.mean - exact) <= 4.0 * s.stderr_);
    }
}

TEST_CASE("(Z8) decay exponent for the F coefficient norms") {
    // The constant d_{m,theta} is fitted, only the exponent is asserted: on the
    // outer radial band r in [N/2, N] the coefficients fall at least like
    // (1+|n|^2)^{-(1-theta)}, theta = 0.25. The fitted constant's growth ratio
    // across doublings of N must shrink (log-correction saturation), which a
    // genuinely worse power law would not do.
    const int m = 2;
    const double theta = 0.25;
    std::vector<double> fitted;
    for (int n_cut : {8, 16, 32, 64}) {
        const ConvolutionTable t = convolution_table(m, n_cut, ConvKind::odd);
        const ModeSet& ms = ModeSet::get(n_cut);
        double d = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i)
            d = std::max(d, t.at(ms[i]) * std::pow(1.0 + double(norm_sq(ms[i])), 1.0 - theta));
        fitted.push_back(d);
        if (n_cut >= 16) {
            std::vector<double> lx, ly;
            for (int r = n_cut / 2; r <= n_cut; r += n_cut / 8) {
                lx.push_back(std::log(1.0 + double(r) * r));
                ly.push_back(std::log(t.at({r, 0})));
            }
            const double slope = fit_slope(lx, ly);
            INFO("N=", n_cut, " outer slope=", slope);
            CHECK(slope <= -(1.0 - theta));
        }
    }
    for (std::size_t i = 2; i < fitted.size(); ++i)
        CHECK(fitted[i] / fitted[i - 1] < fitted[i - 1] / fitted[i - 2]);
}

TEST_CASE("H^s distance of F_M - F_N decreases in N (s = -1/2, m = 2)") {
    // fixed M: every n-term of the (Z9) sum is monotone in N
    const int n_large = 64;
    double prev = 1e300;
    for (int n : {4, 8, 16, 32}) {
        const double v = f_distance_hs_sq_exact(2, n, n_large, -0.5);
        INFO("N=", n, " value=", v);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("appendix decomposition identities per sample") {
    for (int n_cut : {1, 2}) {
        double worst_a2 = 0.0, worst_a9 = 0.0, worst_a10 = 0.0, worst_part = 0.0;
        for (int i = 0; i < 40; ++i) {
            const SpectralField u = sample_gff(rng::hash2(700 + n_cut, i), n_cut);
            const AppendixTerms t = appendix_decomposition_m3(u, n_cut);
            const double g = g_functional(u, n_cut, 3);
            worst_a2 = std::max(worst_a2, rel_err(t.combined, g));
            // (A9) display: II_3 + I_321 + I_332 = 9 (sigma - s2) q4
            worst_a9 = std::max(worst_a9, rel_err(t.term_ii3 + t.term_i321 + t.term_i332,
                                                  9.0 * (t.sigma - t.s2) * t.q4));
            // (A10) display: III + IV + II_2 + I_331 = 6 (s2 - sigma)^3
            worst_a10 = std::max(worst_a10, rel_err(t.term_iii + t.term_iv + t.term_ii2 + t.term_i331,
                                                    6.0 * std::pow(t.s2 - t.sigma, 3)));
            const cplx limbs = t.term_i1 + t.term_i2 + cplx{t.term_i31 + t.term_i32 + t.term_i33, 0.0};
            worst_part = std::max(worst_part, std::abs(limbs - t.term_i));
        }
        INFO("N=", n_cut, " a2=", worst_a2, " a9=", worst_a9, " a10=", worst_a10);
        CHECK(worst_a2 < 1e-9);
        CHECK(worst_a9 < 1e-9);
        CHECK(worst_a10 < 1e-9);
        CHECK(worst_part == 0.0);
    }
    CHECK_THROWS_AS(appendix_decomposition_m3(sample_gff(1, 3), 3), resource_error);
}

TEST_CASE("appendix three-pair classes match closed forms") {
    const int n_cut = 2;
    for (int i = 0; i < 10; ++i) {
        const SpectralField u = sample_gff(rng::hash2(901, i), n_cut);
        const AppendixTerms t = appendix_decomposition_m3(u, n_cut);
        double c6 = 0.0;
        for (auto c : project(u, n_cut).coeff) c6 += std::pow(std::norm(c), 3);
        CHECK(rel_err(t.term_i31, c6) < 1e-12);
        CHECK(rel_err(t.term_i32, 9.0 * (t.q4 * t.s2 - c6)) < 1e-12);
        CHECK(rel_err(t.term_i33, 6.0 * (std::pow(t.s2, 3) - 3.0 * t.s2 * t.q4 + 2.0 * c6)) < 1e-12);
    }
}

TEST_CASE("hypercontractivity sanity for G_N (light)") {
    const std::size_t n = 40000;
    for (int m : {2, 3}) {
        const int n_cut = 4;
        std::vector<double> g2(n), g4(n);
        WickEvaluator ev(m, n_cut);
        for (std::size_t i = 0; i < n; ++i) {
            const SpectralField u = sample_gff(rng::sample_stream(3100 + m, i), n_cut);
            const double g = ev.g_value(u.coeff.data());
            g2[i] = g * g;
            g4[i] = g * g * g * g;
        }
        const MeanStderr m2 = mean_stderr(g2), m4 = mean_stderr(g4);
        const double ratio = std::pow(m4.mean, 0.25) / std::sqrt(m2.mean);
        const double rel = 0.25 * m4.stderr_ / m4.mean + 0.5 * m2.stderr_ / m2.mean;
        INFO("m=", m, " ratio=", ratio, " bound=", std::pow(3.0, m / 2.0));
        CHECK(ratio <= std::pow(3.0, m / 2.0) * (1.0 + 3.0 * rel));
    }
}
