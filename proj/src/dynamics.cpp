#include "wicknls/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/parallel.hpp"
#include "wicknls/stats.hpp"

namespace wicknls {

namespace {

// Dormand-Prince 5(4), FSAL
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace

void integrate_rotating_frame(const OdeSystem& sys, std::vector<cplx>& state, double t_final,
                              const IntegratorConfig& config,
                              const std::function<void(double, const std::vector<cplx>&)>& on_accept) {
    const std::size_t n = state.size();
    if (sys.eigen_sq.size() != n) throw std::invalid_argument("integrate_rotating_frame: size mismatch");
    if (!(config.abs_tol > 0.0) || !(config.rel_tol > 0.0) || !(config.max_step > 0.0))
        throw std::domain_error("integrate_rotating_frame: tolerances and max_step must be > 0");

    std::vector<cplx> w = state; // rotating frame; at t=0 frames coincide
    std::vector<cplx> u_lab(n), f(n), w_stage(n), w5(n), w4(n);
    std::vector<std::vector<cplx>> k(7, std::vector<cplx>(n));

    // dw_n/dt = -i e^{+i lam_n t} ( F(u)_n + 2c u_n ),  u_n = e^{-i lam_n t} w_n
    auto rhs = [&](double t, const std::vector<cplx>& win, std::vector<cplx>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -sys.eigen_sq[i] * t;
            u_lab[i] = win[i] * cplx{std::cos(ph), std::sin(ph)};
        }
        sys.nonlinearity(u_lab.data(), f.data());
        for (std::size_t i = 0; i < n; ++i) {
            cplx total = f[i];
            if (config.gauge_shift_c != 0.0) total += 2.0 * config.gauge_shift_c * u_lab[i];
            const double ph = sys.eigen_sq[i] * t;
            out[i] = cplx{0.0, -1.0} * total * cplx{std::cos(ph), std::sin(ph)};
        }
    };

    auto emit = [&](double t, const std::vector<cplx>& win) {
        if (!on_accept) return;
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -sys.eigen_sq[i] * t;
            u_lab[i] = win[i] * cplx{std::cos(ph), std::sin(ph)};
        }
        on_accept(t, u_lab);
    };

    const double dir = t_final >= 0.0 ? 1.0 : -1.0;
    const double t_end_slack = 1e-14 * std::max(1.0, std::abs(t_final));
    double t = 0.0;
    emit(0.0, w);
    if (t_final == 0.0 || n == 0) {
        if (n == 0) return;
        state = w;
        return;
    }

    double h = dir * std::min(config.max_step, std::abs(t_final));
    rhs(t, w, k[0]); // FSAL seed; stays valid across rejected steps

    while (dir * (t_final - t) > t_end_slack) {
        if (std::abs(h) < t_end_slack)
            throw stiffness_error("integrate_rotating_frame: step size underflow at t = " + std::to_string(t));
        if (dir * (t + h - t_final) > 0.0) h = t_final - t;

        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc = w[i];
                for (int j = 0; j < s; ++j)
                    if (kA[s][j] != 0.0) acc += h * kA[s][j] * k[j][i];
                w_stage[i] = acc;
            }
            rhs(t + kC[s] * h, w_stage, k[s]);
        }
        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx y5 = w[i], y4 = w[i];
            for (int s = 0; s < 7; ++s) {
                if (kB5[s] != 0.0) y5 += h * kB5[s] * k[s][i];
                if (kB4[s] != 0.0) y4 += h * kB4[s] * k[s][i];
            }
            w5[i] = y5;
            w4[i] = y4;
            const double sc = config.abs_tol + config.rel_tol * std::max(std::abs(w[i]), std::abs(y5));
            const double e = std::abs(y5 - y4) / sc;
            err_sq += e * e;
        }
        const double err = std::sqrt(err_sq / double(n));
        if (err <= 1.0) {
            t += h;
            w.swap(w5);
            k[0] = k[6]; // FSAL: stage 7 was evaluated at (t+h, y5)
            emit(t, w);
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (std::abs(h) > config.max_step) h = dir * config.max_step;
    }
    t = t_final; // within t_end_slack of the integrated time
    state.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ph = -sys.eigen_sq[i] * t;
        state[i] = w[i] * cplx{std::cos(ph), std::sin(ph)};
    }
}

double mass_low(const SpectralField& field, int n_cut) {
    if (n_cut > field.cutoff) throw std::range_error("mass_low: N exceeds field cutoff");
    return project(field, n_cut).mass();
}

double hamiltonian_wick(const SpectralField& field, int n_cut, int m) {
    if (n_cut > field.cutoff) throw std::range_error("hamiltonian_wick: N exceeds field cutoff");
    const SpectralField low = project(field, n_cut);
    const ModeSet& ms = low.mode_set();
    std::vector<double> kin(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
        kin[i] = double(norm_sq(ms[i])) * std::norm(low.coeff[i]);
    return 0.5 * pairwise_sum(kin) + g_functional(low, n_cut, m);
}

namespace {

struct TorusFlow {
    int n_cut;
    int full_cutoff;
    OdeSystem sys;
    WickEvaluator ev;
    std::vector<std::ptrdiff_t> low_in_full; // low-mode index -> full-field index
    std::vector<double> high_eigen;          // per high-mode index in the full field
    std::vector<std::size_t> high_in_full;

    TorusFlow(int n_cut_, int full_cutoff_, int m)
        : n_cut(n_cut_), full_cutoff(full_cutoff_),
          ev(m, n_cut_, (2 * m - 1) * n_cut_ + 1) {
        const ModeSet& low = ModeSet::get(n_cut);
        const ModeSet& full = ModeSet::get(full_cutoff);
        sys.eigen_sq.resize(low.size());
        low_in_full.resize(low.size());
        for (std::size_t i = 0; i < low.size(); ++i) {
            sys.eigen_sq[i] = double(norm_sq(low[i]));
            low_in_full[i] = full.index_of(low[i]);
        }
        for (std::size_t i = 0; i < full.size(); ++i)
            if (norm_sq(full[i]) > int64_t(n_cut) * n_cut) {
                high_in_full.push_back(i);
                high_eigen.push_back(double(norm_sq(full[i])));
            }
        sys.nonlinearity = [this](const cplx* state, cplx* out) { this->ev.f_value(state, out); };
    }

    std::vector<cplx> low_state(const SpectralField& field) const {
        std::vector<cplx> w(low_in_full.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = field.coeff[std::size_t(low_in_full[i])];
        return w;
    }

    // assembles the full field at time t from integrated low modes + exact phases
    SpectralField assemble(const SpectralField& initial, const std::vector<cplx>& low, double t) const {
        SpectralField out = initial;
        for (std::size_t i = 0; i < low.size(); ++i) out.coeff[std::size_t(low_in_full[i])] = low[i];
        for (std::size_t j = 0; j < high_in_full.size(); ++j) {
            const double ph = -high_eigen[j] * t;
            out.coeff[high_in_full[j]] = initial.coeff[high_in_full[j]] * cplx{std::cos(ph), std::sin(ph)};
        }
        return out;
    }
};

} // namespace

Trajectory evolve(const SpectralField& field, int n_cut, int m, double t_final,
                  const IntegratorConfig& config) {
    if (n_cut > field.cutoff) throw std::range_error("evolve: N exceeds field cutoff");
    TorusFlow flow(n_cut, field.cutoff, m);
    WickEvaluator g_eval(m, n_cut); // monitor path, shared across steps
    const ModeSet& low_modes = ModeSet::get(n_cut);
    Trajectory traj;
    traj.n_cut = n_cut;
    traj.m = m;

    std::vector<cplx> w = flow.low_state(field);
    auto record = [&](double t, const std::vector<cplx>& low_lab) {
        double mass = 0.0, kinetic = 0.0;
        for (std::size_t i = 0; i < low_lab.size(); ++i) {
            const double a2 = std::norm(low_lab[i]);
            mass += a2;
            kinetic += double(norm_sq(low_modes[i])) * a2;
        }
        traj.times.push_back(t);
        traj.mass_low_series.push_back(mass);
        traj.hamiltonian_series.push_back(0.5 * kinetic + g_eval.g_value(low_lab.data()));
        traj.states.push_back(flow.assemble(field, low_lab, t));
    };
    integrate_rotating_frame(flow.sys, w, t_final, config, record);
    traj.steps_accepted = traj.times.size() > 0 ? traj.times.size() - 1 : 0;
    return traj;
}

SpectralField evolve_to(const SpectralField& field, int n_cut, int m, double t_final,
                        const IntegratorConfig& config) {
    if (n_cut > field.cutoff) throw std::range_error("evolve_to: N exceeds field cutoff");
    TorusFlow flow(n_cut, field.cutoff, m);
    std::vector<cplx> w = flow.low_state(field);
    integrate_rotating_frame(flow.sys, w, t_final, config);
    return flow.assemble(field, w, t_final);
}

InvarianceReport invariance_experiment(int n_cut, int m, double t_final, std::size_t n_samples,
                                       const std::vector<NamedObservable>& observables, uint64_t seed,
                                       const IntegratorConfig& config, int n_permutations) {
    if (n_samples < 10) throw std::invalid_argument("invariance_experiment: need >= 10 samples");

    SampleBatch pre = importance_batch(observables, n_cut, m, n_samples, seed, /*keep_fields=*/true);

    std::vector<std::vector<double>> post(observables.size(), std::vector<double>(n_samples));
    std::vector<double> ham_drift(n_samples);
    parallel_for_chunks(n_samples, [&](std::size_t b, std::size_t e) {
        TorusFlow flow(n_cut, n_cut, m);
        for (std::size_t i = b; i < e; ++i) {
            const SpectralField& u0 = pre.fields[i];
            const double h0 = hamiltonian_wick(u0, n_cut, m);
            std::vector<cplx> w = flow.low_state(u0);
            integrate_rotating_frame(flow.sys, w, t_final, config);
            SpectralField ut = flow.assemble(u0, w, t_final);
            const double h1 = hamiltonian_wick(ut, n_cut, m);
            ham_drift[i] = std::abs(h1 - h0) / std::max(1.0, std::abs(h0));
            for (std::size_t c = 0; c < observables.size(); ++c)
                post[c][i] = observables[c].fn(ut);
        }
    });

    InvarianceReport report;
    report.m = m;
    report.n_cut = n_cut;
    report.t_final = t_final;
    report.n = n_samples;
    report.nelson_violations = pre.nelson_violations;
    report.max_hamiltonian_drift = *std::max_element(ham_drift.begin(), ham_drift.end());

    const WeightedSummary any = weighted_mean_stderr(pre.columns[0], pre.weight);
    report.ess = any.ess;

    for (std::size_t c = 0; c < observables.size(); ++c) {
        InvarianceObservable obs;
        obs.name = observables[c].name;
        const WeightedSummary before = weighted_mean_stderr(pre.columns[c], pre.weight);
        const WeightedSummary after = weighted_mean_stderr(post[c], pre.weight);
        obs.pre_mean = before.mean;
        obs.pre_stderr = before.stderr_;
        obs.post_mean = after.mean;
        obs.post_stderr = after.stderr_;
        std::vector<double> diff(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) diff[i] = post[c][i] - pre.columns[c][i];
        const WeightedSummary d = weighted_mean_stderr(diff, pre.weight);
        obs.paired_diff = d.mean;
        obs.paired_stderr = d.stderr_;
        obs.p_value = paired_ks_permutation_pvalue(pre.columns[c], post[c], pre.weight, n_permutations,
                                                   rng::hash2(seed, 0x6b73ULL + c), &obs.ks_distance);
        report.observables.push_back(obs);
    }
    return report;
}

} // namespace wicknls
