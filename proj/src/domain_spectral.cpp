#include "wicknls/domain_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/stats.hpp"
#include "wicknls/wickpoly.hpp"

namespace wicknls {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= double(j);
    return f;
}

// midpoint nodes x_i = pi (i + 1/2) / G; integrates cos(r x) exactly for |r| < 2G
std::vector<double> midpoint_nodes(int grid) {
    std::vector<double> x(grid);
    for (int i = 0; i < grid; ++i) x[std::size_t(i)] = M_PI * (double(i) + 0.5) / double(grid);
    return x;
}

} // namespace

const DirichletBasis& DirichletBasis::get(int cutoff) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<DirichletBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[cutoff];
    if (slot) return *slot;
    slot = std::make_unique<DirichletBasis>();
    slot->cutoff = cutoff;
    const int64_t r2 = int64_t(cutoff) * cutoff;
    for (int j = 1; int64_t(j) * j < r2; ++j)
        for (int k = 1; int64_t(j) * j + int64_t(k) * k <= r2; ++k)
            slot->modes.push_back({j, k});
    std::sort(slot->modes.begin(), slot->modes.end(), [](ModeJK a, ModeJK b) {
        if (a.eigen_sq() != b.eigen_sq()) return a.eigen_sq() < b.eigen_sq();
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    return *slot;
}

int weyl_count(int n_cut) {
    if (n_cut < 1) throw std::domain_error("weyl_count: N must be >= 1");
    return int(DirichletBasis::get(n_cut).size());
}

double phi_jk(ModeJK n, double x1, double x2) {
    return (2.0 / M_PI) * std::sin(n.j * x1) * std::sin(n.k * x2);
}

DomainField sample_domain_gff(uint64_t seed, int n_cut) {
    const DirichletBasis& basis = DirichletBasis::get(n_cut);
    DomainField f = DomainField::zero(n_cut);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const ModeJK n = basis.modes[i];
        const cplx g = rng::standard_complex_gaussian(rng::mode_key(seed, Mode{n.j, n.k}));
        f.coeff[i] = g / std::sqrt(1.0 + double(n.eigen_sq()));
    }
    return f;
}

DomainField project_domain(const DomainField& field, int n_cut) {
    if (n_cut > field.cutoff) throw std::range_error("project_domain: N exceeds field cutoff");
    // modes sorted by eigenvalue, so the sub-basis is a prefix
    DomainField out = DomainField::zero(n_cut);
    std::copy_n(field.coeff.begin(), out.coeff.size(), out.coeff.begin());
    return out;
}

double domain_field_eval_abs2_sum(const DomainField& field) {
    std::vector<double> sq(field.coeff.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(field.coeff[i]);
    return pairwise_sum(sq);
}

cplx domain_field_eval(const DomainField& field, double x1, double x2) {
    const DirichletBasis& basis = DirichletBasis::get(field.cutoff);
    cplx sum{0, 0};
    for (std::size_t i = 0; i < basis.size(); ++i) sum += field.coeff[i] * phi_jk(basis.modes[i], x1, x2);
    return sum;
}

double sigma_domain_at(int n_cut, double x1, double x2) {
    const DirichletBasis& basis = DirichletBasis::get(n_cut);
    double sum = 0.0;
    for (const ModeJK n : basis.modes) {
        const double p = phi_jk(n, x1, x2);
        sum += p * p / (1.0 + double(n.eigen_sq()));
    }
    return sum;
}

VarianceField sigma_field(int n_cut, int grid) {
    if (n_cut < 2) throw std::domain_error("sigma_field: N must be >= 2");
    if (grid <= 0) grid = 4 * n_cut + 4;
    VarianceField vf{n_cut, grid, std::vector<double>(std::size_t(grid) * grid)};
    const std::vector<double> x = midpoint_nodes(grid);
    for (int i1 = 0; i1 < grid; ++i1)
        for (int i2 = 0; i2 < grid; ++i2)
            vf.values[std::size_t(i1) * grid + i2] = sigma_domain_at(n_cut, x[std::size_t(i1)], x[std::size_t(i2)]);
    return vf;
}

double spectral_band(int j, double x1, double x2, double y1, double y2) {
    if (j < 0) throw std::domain_error("spectral_band: j must be >= 0");
    const DirichletBasis& basis = DirichletBasis::get(j);
    const double lo = double(j - 1) * (j - 1); // lambda^2 in ((j-1)^2, j^2]
    double sum = 0.0;
    for (const ModeJK n : basis.modes) {
        const double e = double(n.eigen_sq());
        if (e > lo && e <= double(j) * j && j >= 1)
            sum += phi_jk(n, x1, x2) * phi_jk(n, y1, y2);
    }
    return sum;
}

double gamma_s_domain(double s, int n_cut, double x1, double x2, double y1, double y2) {
    const DirichletBasis& basis = DirichletBasis::get(n_cut);
    double sum = 0.0;
    for (const ModeJK n : basis.modes)
        sum += phi_jk(n, x1, x2) * phi_jk(n, y1, y2) * std::pow(1.0 + double(n.eigen_sq()), -s / 2.0);
    return sum;
}

namespace {

// Values of every basis mode (lambda <= cutoff) on the tensor grid, point-major.
struct ModeValueTable {
    int grid = 0;
    std::size_t n_modes = 0;
    std::vector<double> psi; // [point][mode]

    ModeValueTable(int cutoff, int grid_size) : grid(grid_size) {
        const DirichletBasis& basis = DirichletBasis::get(cutoff);
        n_modes = basis.size();
        const std::vector<double> x = midpoint_nodes(grid);
        const std::size_t points = std::size_t(grid) * grid;
        psi.resize(points * n_modes);
        for (int i1 = 0; i1 < grid; ++i1)
            for (int i2 = 0; i2 < grid; ++i2) {
                double* row = &psi[(std::size_t(i1) * grid + i2) * n_modes];
                for (std::size_t n = 0; n < n_modes; ++n)
                    row[n] = phi_jk(basis.modes[n], x[std::size_t(i1)], x[std::size_t(i2)]);
            }
    }
};

} // namespace

double gamma_lp_distance(double s, int p, int n_small, int n_large) {
    if (n_large < n_small || n_small < 0) throw std::domain_error("gamma_lp_distance: need M >= N >= 0");
    if (!(s > 1.0)) throw std::domain_error("gamma_lp_distance: Cauchy estimate needs s > 1");
    if (p < 2 || p % 2 != 0) throw std::domain_error("gamma_lp_distance: p must be an even integer >= 2");
    if (s < 2.0 && double(p) >= 2.0 / (2.0 - s))
        throw std::domain_error("gamma_lp_distance: p outside the admissible range for this s");
    if (n_large == n_small) return 0.0;

    const DirichletBasis& basis = DirichletBasis::get(n_large);
    const int64_t r_small = int64_t(n_small) * n_small;

    if (p == 2) {
        // orthonormality: ||gamma_{s,M} - gamma_{s,N}||_2^2 = sum (1+lambda^2)^{-s}
        std::vector<double> terms;
        for (const ModeJK n : basis.modes)
            if (n.eigen_sq() > r_small) terms.push_back(std::pow(1.0 + double(n.eigen_sq()), -s));
        return std::sqrt(pairwise_sum(terms));
    }

    // tensor midpoint quadrature; integrand degree p*M per axis needs 2*grid > p*M
    const int grid = p * n_large / 2 + 1;
    const std::size_t points = std::size_t(grid) * grid;
    if (points * points > 800ULL * 1000 * 1000)
        throw resource_error("gamma_lp_distance: quadrature grid too large");
    ModeValueTable table(n_large, grid);
    std::vector<double> d(basis.size(), 0.0);
    for (std::size_t n = 0; n < basis.size(); ++n)
        if (basis.modes[n].eigen_sq() > r_small)
            d[n] = std::pow(1.0 + double(basis.modes[n].eigen_sq()), -s / 2.0);
    const double w4 = std::pow(M_PI / grid, 4);
    double acc = 0.0;
    std::vector<double> scaled(basis.size());
    for (std::size_t py = 0; py < points; ++py) {
        const double* ry = &table.psi[py * basis.size()];
        for (std::size_t n = 0; n < basis.size(); ++n) scaled[n] = d[n] * ry[n];
        for (std::size_t px = 0; px < points; ++px) {
            const double* rx = &table.psi[px * basis.size()];
            double g = 0.0;
            for (std::size_t n = 0; n < basis.size(); ++n) g += rx[n] * scaled[n];
            double gp = 1.0;
            for (int e = 0; e < p; ++e) gp *= g;
            acc += gp;
        }
    }
    return std::pow(acc * w4, 1.0 / double(p));
}

DomainEvaluator::DomainEvaluator(int m, int n_cut) : m_(m), n_cut_(n_cut), grid_(4 * m * n_cut) {
    if (m < 1 || n_cut < 1) throw std::domain_error("DomainEvaluator: need m >= 1, N >= 1");
    const std::vector<double> x = midpoint_nodes(grid_);
    sin_node_.resize(std::size_t(n_cut) * grid_);
    for (int j = 1; j <= n_cut; ++j)
        for (int i = 0; i < grid_; ++i)
            sin_node_[std::size_t(j - 1) * grid_ + i] = std::sin(j * x[std::size_t(i)]);
    sigma_.resize(std::size_t(grid_) * grid_);
    for (int i1 = 0; i1 < grid_; ++i1)
        for (int i2 = 0; i2 < grid_; ++i2)
            sigma_[std::size_t(i1) * grid_ + i2] = sigma_domain_at(n_cut, x[std::size_t(i1)], x[std::size_t(i2)]);
    stage_.resize(std::size_t(n_cut) * grid_);
    values_.resize(std::size_t(grid_) * grid_);
}

void DomainEvaluator::synthesize(const cplx* coeff) {
    const DirichletBasis& basis = DirichletBasis::get(n_cut_);
    std::fill(stage_.begin(), stage_.end(), cplx{0, 0});
    // stage[j][i2] = sum_k c_{jk} sin(k x_{i2})
    for (std::size_t n = 0; n < basis.size(); ++n) {
        const ModeJK jk = basis.modes[n];
        const cplx c = coeff[n];
        if (c == cplx{0, 0}) continue;
        const double* sk = &sin_node_[std::size_t(jk.k - 1) * grid_];
        cplx* row = &stage_[std::size_t(jk.j - 1) * grid_];
        for (int i = 0; i < grid_; ++i) row[i] += c * sk[i];
    }
    std::fill(values_.begin(), values_.end(), cplx{0, 0});
    const double scale = 2.0 / M_PI;
    for (int j = 1; j <= n_cut_; ++j) {
        const double* sj = &sin_node_[std::size_t(j - 1) * grid_];
        const cplx* row = &stage_[std::size_t(j - 1) * grid_];
        for (int i1 = 0; i1 < grid_; ++i1) {
            const double sv = scale * sj[i1];
            if (sv == 0.0) continue;
            cplx* out = &values_[std::size_t(i1) * grid_];
            for (int i2 = 0; i2 < grid_; ++i2) out[i2] += sv * row[i2];
        }
    }
}

double DomainEvaluator::g_value(const cplx* coeff) {
    synthesize(coeff);
    const std::size_t points = std::size_t(grid_) * grid_;
    const double sign = (m_ % 2 == 0) ? 1.0 : -1.0;
    const double pref = sign * factorial(m_) / double(2 * m_);
    double acc = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double s = sigma_[i];
        acc += std::pow(s, m_) * laguerre(m_, std::norm(values_[i]) / s);
    }
    const double w = (M_PI / grid_) * (M_PI / grid_);
    return pref * acc * w;
}

void DomainEvaluator::f_value(const cplx* coeff, cplx* out) {
    synthesize(coeff);
    const std::size_t points = std::size_t(grid_) * grid_;
    const double sign = (m_ % 2 == 0) ? -1.0 : 1.0;
    const double pref = sign * factorial(m_ - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double s = sigma_[i];
        values_[i] *= pref * std::pow(s, m_ - 1) * generalized_laguerre(m_ - 1, 1, std::norm(values_[i]) / s);
    }
    // project: f_n = int w(x) phi_n dx, midpoint quadrature (exact, degree 2mN)
    const DirichletBasis& basis = DirichletBasis::get(n_cut_);
    std::fill(stage_.begin(), stage_.end(), cplx{0, 0});
    // stage[j][i2] = sum_{i1} w(i1,i2) sin(j x_{i1})
    for (int j = 1; j <= n_cut_; ++j) {
        const double* sj = &sin_node_[std::size_t(j - 1) * grid_];
        cplx* row = &stage_[std::size_t(j - 1) * grid_];
        for (int i1 = 0; i1 < grid_; ++i1) {
            const double sv = sj[i1];
            if (sv == 0.0) continue;
            const cplx* src = &values_[std::size_t(i1) * grid_];
            for (int i2 = 0; i2 < grid_; ++i2) row[i2] += sv * src[i2];
        }
    }
    const double wq = (2.0 / M_PI) * (M_PI / grid_) * (M_PI / grid_);
    for (std::size_t n = 0; n < basis.size(); ++n) {
        const ModeJK jk = basis.modes[n];
        const double* sk = &sin_node_[std::size_t(jk.k - 1) * grid_];
        const cplx* row = &stage_[std::size_t(jk.j - 1) * grid_];
        cplx acc{0, 0};
        for (int i2 = 0; i2 < grid_; ++i2) acc += sk[i2] * row[i2];
        out[n] = wq * acc;
    }
}

double g_functional_domain(const DomainField& field, int n_cut, int m) {
    if (n_cut > field.cutoff) throw std::range_error("g_functional_domain: N exceeds field cutoff");
    DomainField low = project_domain(field, n_cut);
    DomainEvaluator ev(m, n_cut);
    return ev.g_value(low.coeff.data());
}

namespace {

// streams gamma_K rows over the tensor grid and applies `accumulate(py, row)`
// where row[px] = gamma_K(x_px, y_py); shared by the distance and J kernels.
template <class F>
void for_each_gamma_row(const ModeValueTable& table, int n_cut, F&& accumulate) {
    // basis(n_cut) is a prefix of the table's mode list (sorted by eigenvalue)
    const DirichletBasis& basis = DirichletBasis::get(n_cut);
    const std::size_t points = std::size_t(table.grid) * table.grid;
    const std::size_t all_modes = table.n_modes;
    const std::size_t k_modes = basis.size();
    std::vector<double> weighted(k_modes), row(points);
    std::vector<double> d(k_modes);
    for (std::size_t n = 0; n < k_modes; ++n)
        d[n] = 1.0 / (1.0 + double(basis.modes[n].eigen_sq()));
    for (std::size_t py = 0; py < points; ++py) {
        const double* ry = &table.psi[py * all_modes];
        for (std::size_t n = 0; n < k_modes; ++n) weighted[n] = d[n] * ry[n];
        for (std::size_t px = 0; px < points; ++px) {
            const double* rx = &table.psi[px * all_modes];
            double g = 0.0;
            for (std::size_t n = 0; n < k_modes; ++n) g += rx[n] * weighted[n];
            row[px] = g;
        }
        accumulate(py, row);
    }
}

} // namespace

double g_l2_distance_exact_domain(int m, int n_small, int n_large) {
    if (m < 2) throw std::domain_error("g_l2_distance_exact_domain: m must be >= 2");
    if (n_large < n_small || n_small < 1)
        throw std::domain_error("g_l2_distance_exact_domain: need M >= N >= 1");
    if (n_large == n_small) return 0.0;
    // integrand gamma^{2m} has degree 2mM per axis; midpoint needs 2*grid > 2mM
    const int grid = m * n_large + 1;
    const std::size_t points = std::size_t(grid) * grid;
    if (points * points > 200ULL * 1000 * 1000)
        throw resource_error("g_l2_distance_exact_domain: quadrature grid too large");
    ModeValueTable table(n_large, grid);
    const double w4 = std::pow(M_PI / grid, 4);

    double acc_large = 0.0, acc_small = 0.0;
    for_each_gamma_row(table, n_large, [&](std::size_t, const std::vector<double>& row) {
        for (double g : row) acc_large += std::pow(g, 2 * m);
    });
    for_each_gamma_row(table, n_small, [&](std::size_t, const std::vector<double>& row) {
        for (double g : row) acc_small += std::pow(g, 2 * m);
    });
    const double diff = std::max(0.0, (acc_large - acc_small) * w4);
    return factorial(m) / double(2 * m) * std::sqrt(diff);
}

std::vector<double> f_coeff_l2_exact_domain(int m, int n_cut, int lambda_max) {
    if (m < 2) throw std::domain_error("f_coeff_l2_exact_domain: m must be >= 2");
    const DirichletBasis& out_basis = DirichletBasis::get(lambda_max);
    // integrand gamma^{2m-1} phi_n phi_n has degree (2m-1)N + lambda_max per axis
    const int grid = ((2 * m - 1) * n_cut + lambda_max) / 2 + 1;
    const std::size_t points = std::size_t(grid) * grid;
    if (points * points > 200ULL * 1000 * 1000)
        throw resource_error("f_coeff_l2_exact_domain: quadrature grid too large");
    const int table_cut = std::max(n_cut, lambda_max);
    ModeValueTable table(table_cut, grid);
    const DirichletBasis& table_basis = DirichletBasis::get(table_cut);

    // indices of the output modes inside the table
    std::vector<std::size_t> out_index(out_basis.size());
    for (std::size_t n = 0; n < out_basis.size(); ++n) {
        const ModeJK target = out_basis.modes[n];
        for (std::size_t i = 0; i < table_basis.size(); ++i)
            if (table_basis.modes[i].j == target.j && table_basis.modes[i].k == target.k) {
                out_index[n] = i;
                break;
            }
    }

    std::vector<double> acc(out_basis.size(), 0.0);
    std::vector<double> proj(table_basis.size());
    for_each_gamma_row(table, n_cut, [&](std::size_t py, const std::vector<double>& row) {
        std::fill(proj.begin(), proj.end(), 0.0);
        for (std::size_t px = 0; px < points; ++px) {
            const double g = std::pow(row[px], 2 * m - 1);
            const double* rx = &table.psi[px * table_basis.size()];
            for (std::size_t n = 0; n < table_basis.size(); ++n) proj[n] += g * rx[n];
        }
        const double* ry = &table.psi[py * table_basis.size()];
        for (std::size_t n = 0; n < out_basis.size(); ++n)
            acc[n] += proj[out_index[n]] * ry[out_index[n]];
    });
    const double w4 = std::pow(M_PI / grid, 4);
    const double cm = factorial(m) * factorial(m - 1);
    for (double& v : acc) v *= cm * w4;
    return acc;
}

double f_distance_heps_sq_domain(int m, int n_small, int n_large, double eps) {
    if (n_large < n_small || n_small < 1)
        throw std::domain_error("f_distance_heps_sq_domain: need M >= N >= 1");
    const std::vector<double> j_small = f_coeff_l2_exact_domain(m, n_small, n_large);
    const std::vector<double> j_large = f_coeff_l2_exact_domain(m, n_large, n_large);
    const DirichletBasis& basis = DirichletBasis::get(n_large);
    const int64_t r_small = int64_t(n_small) * n_small;
    double acc = 0.0;
    for (std::size_t n = 0; n < basis.size(); ++n) {
        const double weight = std::pow(1.0 + double(basis.modes[n].eigen_sq()), -eps);
        if (basis.modes[n].eigen_sq() <= r_small)
            acc += weight * (j_large[n] - j_small[n]);
        else
            acc += weight * j_large[n];
    }
    return acc;
}

DomainField evolve_domain_to(const DomainField& field, int n_cut, int m, double t_final,
                             const IntegratorConfig& config) {
    if (n_cut > field.cutoff) throw std::range_error("evolve_domain_to: N exceeds field cutoff");
    const DirichletBasis& low = DirichletBasis::get(n_cut);
    DomainEvaluator ev(m, n_cut);
    OdeSystem sys;
    sys.eigen_sq.resize(low.size());
    for (std::size_t i = 0; i < low.size(); ++i) sys.eigen_sq[i] = double(low.modes[i].eigen_sq());
    sys.nonlinearity = [&ev](const cplx* state, cplx* out) { ev.f_value(state, out); };

    std::vector<cplx> w(field.coeff.begin(), field.coeff.begin() + std::ptrdiff_t(low.size()));
    integrate_rotating_frame(sys, w, t_final, config);

    DomainField out = field;
    std::copy(w.begin(), w.end(), out.coeff.begin());
    const DirichletBasis& full = DirichletBasis::get(field.cutoff);
    for (std::size_t i = low.size(); i < full.size(); ++i) {
        const double ph = -double(full.modes[i].eigen_sq()) * t_final;
        out.coeff[i] = field.coeff[i] * cplx{std::cos(ph), std::sin(ph)};
    }
    return out;
}

double mass_domain(const DomainField& field, int n_cut) {
    return domain_field_eval_abs2_sum(project_domain(field, n_cut));
}

double hamiltonian_wick_domain(const DomainField& field, int n_cut, int m) {
    const DomainField low = project_domain(field, n_cut);
    const DirichletBasis& basis = DirichletBasis::get(n_cut);
    std::vector<double> kin(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        kin[i] = double(basis.modes[i].eigen_sq()) * std::norm(low.coeff[i]);
    return 0.5 * pairwise_sum(kin) + g_functional_domain(low, n_cut, m);
}

} // namespace wicknls
