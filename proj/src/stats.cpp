#include "wicknls/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/rng.hpp"

namespace wicknls {

double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

MeanStderr mean_stderr(std::span<const double> x) {
    MeanStderr out;
    out.n = x.size();
    if (x.empty()) return out;
    out.mean = pairwise_sum(x) / double(x.size());
    if (x.size() < 2) return out;
    std::vector<double> d2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - out.mean;
        d2[i] = d * d;
    }
    const double var = pairwise_sum(d2) / double(x.size() - 1);
    out.stderr_ = std::sqrt(var / double(x.size()));
    return out;
}

WeightedSummary weighted_mean_stderr(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("weighted_mean_stderr: size mismatch");
    const double sw = pairwise_sum(weights);
    if (!(sw > 0.0)) throw estimation_error("weighted_mean_stderr: total weight is zero");
    std::vector<double> tmp(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) tmp[i] = weights[i] * values[i];
    WeightedSummary out;
    out.mean = pairwise_sum(tmp) / sw;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = weights[i] * (values[i] - out.mean);
        tmp[i] = d * d;
    }
    out.stderr_ = std::sqrt(pairwise_sum(tmp)) / sw;
    for (std::size_t i = 0; i < weights.size(); ++i) tmp[i] = weights[i] * weights[i];
    const double sw2 = pairwise_sum(tmp);
    out.ess = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
    return out;
}

double log_sum_exp(std::span<const double> x) {
    if (x.empty()) return -INFINITY;
    const double m = *std::max_element(x.begin(), x.end());
    if (!std::isfinite(m)) return m;
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(x[i] - m);
    return m + std::log(pairwise_sum(e));
}

MeanStderr chain_mean_stderr(std::span<const double> x, std::size_t n_batches) {
    MeanStderr out;
    out.n = x.size();
    if (x.empty()) return out;
    out.mean = pairwise_sum(x) / double(x.size());
    n_batches = std::min(n_batches, x.size());
    if (n_batches < 2) return out;
    const std::size_t len = x.size() / n_batches;
    std::vector<double> bm(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b)
        bm[b] = pairwise_sum(x.subspan(b * len, len)) / double(len);
    const MeanStderr batch = mean_stderr(bm);
    out.stderr_ = batch.stderr_;
    return out;
}

Interval wilson_interval(double successes, double n, double z) {
    if (n <= 0.0) return {0.0, 1.0};
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
    const double n = double(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

namespace {

// Merge-based sup over the combined order of |CDF_a - CDF_b|.
double ks_of_sorted(const std::vector<std::pair<double, double>>& a, double wa_tot,
                    const std::vector<std::pair<double, double>>& b, double wb_tot) {
    std::size_t i = 0, j = 0;
    double ca = 0.0, cb = 0.0, ks = 0.0;
    while (i < a.size() || j < b.size()) {
        double t;
        if (j >= b.size() || (i < a.size() && a[i].first <= b[j].first))
            t = a[i].first;
        else
            t = b[j].first;
        while (i < a.size() && a[i].first <= t) ca += a[i++].second;
        while (j < b.size() && b[j].first <= t) cb += b[j++].second;
        ks = std::max(ks, std::abs(ca / wa_tot - cb / wb_tot));
    }
    return ks;
}

} // namespace

double weighted_ks_distance(std::span<const double> a, std::span<const double> wa,
                            std::span<const double> b, std::span<const double> wb) {
    std::vector<std::pair<double, double>> sa(a.size()), sb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) sa[i] = {a[i], wa[i]};
    for (std::size_t i = 0; i < b.size(); ++i) sb[i] = {b[i], wb[i]};
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double ta = pairwise_sum(wa), tb = pairwise_sum(wb);
    if (!(ta > 0.0) || !(tb > 0.0)) throw estimation_error("weighted_ks_distance: zero total weight");
    return ks_of_sorted(sa, ta, sb, tb);
}

double paired_ks_permutation_pvalue(std::span<const double> pre, std::span<const double> post,
                                    std::span<const double> w, int n_permutations, uint64_t seed,
                                    double* ks_out) {
    const std::size_t n = pre.size();
    if (post.size() != n || w.size() != n || n == 0)
        throw std::invalid_argument("paired_ks_permutation_pvalue: size mismatch");

    // Pool the 2n (value, signed weight) events once; a permutation only flips
    // which column an index contributes to, i.e. the sign of its weight.
    struct Event {
        double value;
        double weight;
        uint32_t index;
        bool from_pre;
    };
    std::vector<Event> ev(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[2 * i] = {pre[i], w[i], uint32_t(i), true};
        ev[2 * i + 1] = {post[i], w[i], uint32_t(i), false};
    }
    std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.value < y.value; });
    const double tot = pairwise_sum(w);
    if (!(tot > 0.0)) throw estimation_error("paired_ks_permutation_pvalue: zero total weight");

    auto ks_for = [&](auto&& swapped) {
        double diff = 0.0, ks = 0.0;
        for (std::size_t k = 0; k < ev.size(); ++k) {
            const bool counts_as_pre = swapped(ev[k].index) ? !ev[k].from_pre : ev[k].from_pre;
            diff += counts_as_pre ? ev[k].weight : -ev[k].weight;
            // sup only moves at the last event of a tie group
            if (k + 1 == ev.size() || ev[k + 1].value > ev[k].value)
                ks = std::max(ks, std::abs(diff) / tot);
        }
        return ks;
    };

    const double observed = ks_for([](uint32_t) { return false; });
    if (ks_out) *ks_out = observed;

    int at_least = 0;
    for (int p = 0; p < n_permutations; ++p) {
        const uint64_t stream = rng::hash2(seed, uint64_t(p) + 1);
        auto swapped = [&](uint32_t i) { return (rng::hash2(stream, i) & 1u) != 0u; };
        if (ks_for(swapped) >= observed - 1e-15) ++at_least;
    }
    // add-one rule keeps the p-value away from an impossible exact zero
    return (double(at_least) + 1.0) / (double(n_permutations) + 1.0);
}

} // namespace wicknls
