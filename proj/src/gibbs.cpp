#include "wicknls/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/parallel.hpp"

namespace wicknls {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= double(j);
    return f;
}

double neg_pow_laguerre(int m, double t) { // (-1)^m L_m(t)
    return (m % 2 == 0 ? 1.0 : -1.0) * laguerre(m, t);
}

} // namespace

double nelson_constant(int m) {
    if (m < 1) throw std::domain_error("nelson_constant: m must be >= 1");
    // critical points: d/dt L_m(t) = -L_{m-1}^{(1)}(t)
    auto deriv = [m](double t) { return -generalized_laguerre(m - 1, 1, t); };
    double lo = 0.0;
    const double hi = 4.0 * m + 8.0; // all zeros of L_{m-1}^{(1)} lie well below this
    double best = neg_pow_laguerre(m, 0.0);
    const int scan = 4096;
    double prev_t = 0.0, prev_d = deriv(0.0);
    for (int i = 1; i <= scan; ++i) {
        const double t = lo + (hi - lo) * double(i) / scan;
        const double d = deriv(t);
        if ((prev_d <= 0.0 && d >= 0.0) || (prev_d >= 0.0 && d <= 0.0)) {
            double a = prev_t, b = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                if ((deriv(a) <= 0.0) == (deriv(mid) <= 0.0))
                    a = mid;
                else
                    b = mid;
            }
            best = std::min(best, neg_pow_laguerre(m, 0.5 * (a + b)));
        }
        prev_t = t;
        prev_d = d;
    }
    return -best;
}

double NelsonBound::bound_value(double sigma) const {
    return factorial(m) / double(2 * m) * a_m * std::pow(sigma, m);
}

double density_weight(const SpectralField& field, int n_cut, int m) {
    return std::exp(-g_functional(field, n_cut, m));
}

WeightedSummary SampleBatch::summarize(std::size_t column) const {
    return weighted_mean_stderr(columns.at(column), weight);
}

namespace {

void finalize_weights(SampleBatch& batch) {
    const double mx = *std::max_element(batch.log_weight.begin(), batch.log_weight.end());
    batch.weight.resize(batch.log_weight.size());
    for (std::size_t i = 0; i < batch.log_weight.size(); ++i)
        batch.weight[i] = std::exp(batch.log_weight[i] - mx);
}

} // namespace

SampleBatch importance_batch(const std::vector<NamedObservable>& observables, int n_cut, int m,
                             std::size_t n_samples, uint64_t seed, bool keep_fields) {
    if (n_samples < 1) throw std::invalid_argument("importance_batch: need samples");
    SampleBatch batch;
    batch.n_cut = n_cut;
    batch.m = m;
    batch.sampler = "importance";
    batch.seeds.resize(n_samples);
    batch.log_weight.resize(n_samples);
    batch.columns.assign(observables.size(), std::vector<double>(n_samples));
    for (const auto& o : observables) batch.column_names.push_back(o.name);
    if (keep_fields) batch.fields.resize(n_samples);

    const NelsonBound nelson(m);
    const double bound = nelson.bound_value(sigma_n(n_cut));
    std::vector<uint8_t> violated(n_samples, 0);

    parallel_for_chunks(n_samples, [&](std::size_t b, std::size_t e) {
        WickEvaluator ev(m, n_cut);
        for (std::size_t i = b; i < e; ++i) {
            const uint64_t stream = rng::sample_stream(seed, i);
            batch.seeds[i] = stream;
            SpectralField u = sample_gff(stream, n_cut);
            const double g = ev.g_value(u.coeff.data());
            batch.log_weight[i] = -g;
            violated[i] = (-g > bound + 1e-9 * std::max(1.0, std::abs(bound))) ? 1 : 0;
            for (std::size_t c = 0; c < observables.size(); ++c)
                batch.columns[c][i] = observables[c].fn(u);
            if (keep_fields) batch.fields[i] = std::move(u);
        }
    });
    for (uint8_t v : violated) batch.nelson_violations += v;
    finalize_weights(batch);
    return batch;
}

Estimate importance_estimate(const Observable& observable, int n_cut, int m,
                             std::size_t n_samples, uint64_t seed) {
    if (n_samples < 100) throw std::invalid_argument("importance_estimate: need >= 100 samples");
    SampleBatch batch = importance_batch({{"obs", observable}}, n_cut, m, n_samples, seed);
    const double sw = pairwise_sum(batch.weight);
    if (!(sw > 0.0)) throw estimation_error("importance_estimate: degenerate weights");
    const WeightedSummary s = batch.summarize(0);
    return {s.mean, s.stderr_, s.ess, n_samples};
}

SampleBatch pcn_chain(int n_cut, int m, std::size_t steps, double beta, uint64_t seed,
                      const std::vector<NamedObservable>& observables,
                      std::function<double(const SpectralField&)> energy_override) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("pcn_chain: beta must be in (0, 1]");
    if (steps < 10) throw std::invalid_argument("pcn_chain: need steps >= 10");

    WickEvaluator ev(m, n_cut);
    auto energy = [&](const SpectralField& u) -> double {
        if (energy_override) return energy_override(u);
        return ev.g_value(u.coeff.data());
    };

    const NelsonBound nelson(m);
    const double bound = nelson.bound_value(sigma_n(n_cut));
    const std::size_t burnin = steps / 10;
    const double keep_ratio = std::sqrt(1.0 - beta * beta);

    SampleBatch batch;
    batch.n_cut = n_cut;
    batch.m = m;
    batch.sampler = "pcn";
    batch.columns.assign(observables.size(), {});
    for (const auto& o : observables) batch.column_names.push_back(o.name);

    const uint64_t chain_seed = rng::hash2(seed, 0x70636eULL);
    SpectralField u = sample_gff(rng::sample_stream(chain_seed, 0), n_cut);
    double e_u = energy(u);
    std::size_t accepted = 0, proposed = 0;

    for (std::size_t step = 1; step <= steps; ++step) {
        const uint64_t stream = rng::sample_stream(chain_seed, step);
        SpectralField xi = sample_gff(stream, n_cut);
        SpectralField prop = u;
        for (std::size_t i = 0; i < prop.coeff.size(); ++i)
            prop.coeff[i] = keep_ratio * prop.coeff[i] + beta * xi.coeff[i];
        const double e_prop = energy(prop);
        const double log_alpha = e_u - e_prop;
        const double urand = rng::uniform01(rng::hash2(stream, 0xacceULL));
        ++proposed;
        if (std::log(urand) < log_alpha) {
            u = std::move(prop);
            e_u = e_prop;
            ++accepted;
        }
        if (step > burnin) {
            if (!energy_override && -e_u > bound + 1e-9 * std::max(1.0, std::abs(bound)))
                ++batch.nelson_violations;
            batch.log_weight.push_back(0.0);
            for (std::size_t c = 0; c < observables.size(); ++c)
                batch.columns[c].push_back(observables[c].fn(u));
        }
    }
    batch.acceptance_rate = proposed ? double(accepted) / double(proposed) : 1.0;
    batch.weight.assign(batch.log_weight.size(), 1.0);
    return batch;
}

TailCurve tail_curve(int m, int n_small, int n_large, std::size_t n_samples, uint64_t seed,
                     std::size_t n_lambda) {
    if (n_large < n_small) throw std::domain_error("tail_curve: need M >= N");
    std::vector<double> diff(n_samples);
    parallel_for_chunks(n_samples, [&](std::size_t b, std::size_t e) {
        // one grid sized for the larger cutoff serves both energies exactly
        WickEvaluator ev_large(m, n_large);
        WickEvaluator ev_small(m, n_small, 2 * m * n_small + 1);
        for (std::size_t i = b; i < e; ++i) {
            SpectralField u = sample_gff(rng::sample_stream(seed, i), n_large);
            SpectralField low = project(u, n_small);
            diff[i] = std::abs(ev_large.g_value(u.coeff.data()) - ev_small.g_value(low.coeff.data()));
        }
    });
    std::vector<double> sorted = diff;
    std::sort(sorted.begin(), sorted.end());

    TailCurve curve;
    curve.lambda.push_back(0.0);
    for (std::size_t j = 1; j < n_lambda; ++j) {
        // quantile-spaced thresholds keep every bin populated
        const double q = 0.3 + 0.68 * double(j - 1) / double(n_lambda - 2);
        curve.lambda.push_back(sorted[std::size_t(q * double(n_samples - 1))]);
    }
    for (double lam : curve.lambda) {
        const auto above = double(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lam));
        const double p = above / double(n_samples);
        curve.survival.push_back(p);
        const Interval band = wilson_interval(above, double(n_samples), 3.0);
        curve.lo.push_back(band.lo);
        curve.hi.push_back(band.hi);
    }
    return curve;
}

} // namespace wicknls
