#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wicknls/stats.hpp"
#include "wicknls/torus_field.hpp"
#include "wicknls/wick_functionals.hpp"

namespace wicknls {

// a_m = -min_{t>=0} (-1)^m L_m(t), located by root-finding on the derivative
// (the zeros of L_{m-1}^{(1)}) plus the endpoint t = 0.
double nelson_constant(int m);

// Pointwise lower bound on the Wick energy: -G_N(u) <= (m!/(2m)) a_m sigma_N^m.
struct NelsonBound {
    int m = 2;
    double a_m = 0.0;

    explicit NelsonBound(int order) : m(order), a_m(nelson_constant(order)) {}
    double bound_value(double sigma) const;
};

// Gibbs density R_N(u) = exp(-G_N(u)) with respect to the Gaussian field.
double density_weight(const SpectralField& field, int n_cut, int m);

using Observable = std::function<double(const SpectralField&)>;

struct NamedObservable {
    std::string name;
    Observable fn;
};

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double ess = 0.0;
    std::size_t n = 0;
};

// Self-normalized importance sampling from mu with weights R_N(u); log-weights
// are exponentiated against their maximum for stability.
Estimate importance_estimate(const Observable& observable, int n_cut, int m,
                             std::size_t n_samples, uint64_t seed);

// Raw importance batch: per-sample log-weights and observable columns, for
// experiments that reuse draws across observables.
struct SampleBatch {
    int n_cut = 0;
    int m = 2;
    std::string sampler;                       // "importance" or "pcn"
    std::vector<uint64_t> seeds;               // per-sample streams (importance mode)
    std::vector<SpectralField> fields;         // retained states
    std::vector<double> log_weight;            // log R_N (importance) or zero (pcn)
    std::vector<double> weight;                // normalized against max log-weight
    std::vector<std::vector<double>> columns;  // one column per observable
    std::vector<std::string> column_names;
    double acceptance_rate = 1.0;              // pcn only
    std::size_t nelson_violations = 0;         // hard pointwise bound, must stay 0

    WeightedSummary summarize(std::size_t column) const;
};

SampleBatch importance_batch(const std::vector<NamedObservable>& observables, int n_cut, int m,
                             std::size_t n_samples, uint64_t seed, bool keep_fields = false);

// Preconditioned Crank-Nicolson chain targeting Z_N^{-1} e^{-G_N} d mu_N:
// proposal u' = sqrt(1-beta^2) u + beta xi, acceptance min(1, exp(G_N(u)-G_N(u'))).
// First 10% of steps are discarded as burn-in. energy_override is a test hook
// (e.g. zero coupling); by default the energy is G_N.
SampleBatch pcn_chain(int n_cut, int m, std::size_t steps, double beta, uint64_t seed,
                      const std::vector<NamedObservable>& observables,
                      std::function<double(const SpectralField&)> energy_override = {});

// Empirical survival function of |G_M - G_N| over mu with Wilson bands.
struct TailCurve {
    std::vector<double> lambda;
    std::vector<double> survival;
    std::vector<double> lo; // Wilson band at 3 sigma
    std::vector<double> hi;
};

TailCurve tail_curve(int m, int n_small, int n_large, std::size_t n_samples, uint64_t seed,
                     std::size_t n_lambda = 9);

} // namespace wicknls
