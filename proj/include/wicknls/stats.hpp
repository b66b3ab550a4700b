#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wicknls {

// Pairwise (cascade) summation; result depends only on element order, never on
// how the fill was scheduled across threads.
double pairwise_sum(std::span<const double> x);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> x);

// Self-normalized importance statistics: mean = sum(w O)/sum(w), delta-method
// standard error, effective sample size (sum w)^2 / sum w^2.
struct WeightedSummary {
    double mean = 0.0;
    double stderr_ = 0.0;
    double ess = 0.0;
};

WeightedSummary weighted_mean_stderr(std::span<const double> values, std::span<const double> weights);

// log(sum(exp(x_i))) without overflow
double log_sum_exp(std::span<const double> x);

// Mean with a batch-means standard error (for autocorrelated chain output).
MeanStderr chain_mean_stderr(std::span<const double> x, std::size_t n_batches = 64);

// Wilson score interval for a binomial proportion at z standard deviations.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval wilson_interval(double successes, double n, double z);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov distance between weighted empirical CDFs.
// Both samples carry their own weights (normalized internally).
double weighted_ks_distance(std::span<const double> a, std::span<const double> wa,
                            std::span<const double> b, std::span<const double> wb);

// Permutation p-value for the paired two-sample KS statistic: samples i of the
// two columns share weight w_i and are exchangeable under the null, so each
// permutation swaps pre/post per index. Returns P(KS_perm >= KS_obs).
double paired_ks_permutation_pvalue(std::span<const double> pre, std::span<const double> post,
                                    std::span<const double> w, int n_permutations, uint64_t seed,
                                    double* ks_out = nullptr);

} // namespace wicknls
