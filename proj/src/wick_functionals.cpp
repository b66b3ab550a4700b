#include "wicknls/wick_functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/stats.hpp"

namespace wicknls {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= double(j);
    return f;
}

} // namespace

namespace {

int evaluator_grid(int m, int n_cut, int min_grid) {
    // default sizes for exact quadrature of the degree-2mN Wick integrand;
    // an explicit min_grid only has to cover the degree-(2m-1)N product in f.
    int need = min_grid > 0 ? std::max(min_grid, (2 * m - 1) * n_cut + 1) : 2 * m * n_cut + 1;
    need = std::max({need, 2 * n_cut + 1, 1});
    return fft_friendly_size(need);
}

} // namespace

WickEvaluator::WickEvaluator(int m, int n_cut, int min_grid)
    : m_(m), n_cut_(n_cut), sigma_(sigma_n(n_cut)), grid_(n_cut, evaluator_grid(m, n_cut, min_grid)) {
    if (m < 1) throw std::domain_error("WickEvaluator: m must be >= 1");
}

double WickEvaluator::g_value(const cplx* low_coeff) {
    if (grid_.grid_size() < 2 * m_ * n_cut_ + 1)
        throw aliasing_error("WickEvaluator::g_value: grid too small for degree-2mN integrand");
    grid_.synthesize(low_coeff);
    const std::size_t np = std::size_t(grid_.grid_size()) * grid_.grid_size();
    const double pref = (m_ % 2 == 0 ? 1.0 : -1.0) * factorial(m_) * std::pow(sigma_, m_);
    const cplx* v = grid_.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) acc += laguerre(m_, std::norm(v[i]) / sigma_);
    return pref * acc / double(np) / double(2 * m_);
}

void WickEvaluator::f_value(const cplx* low_coeff, cplx* f_out) {
    grid_.synthesize(low_coeff);
    const std::size_t np = std::size_t(grid_.grid_size()) * grid_.grid_size();
    const double pref = (m_ % 2 == 0 ? -1.0 : 1.0) * factorial(m_ - 1) * std::pow(sigma_, m_ - 1);
    cplx* v = grid_.values();
    for (std::size_t i = 0; i < np; ++i)
        v[i] *= pref * generalized_laguerre(m_ - 1, 1, std::norm(v[i]) / sigma_);
    grid_.analyze(f_out);
}

double g_functional(const SpectralField& field, int n_cut, const WickContext& ctx) {
    ctx.validate();
    if (n_cut > field.cutoff) throw std::range_error("g_functional: N exceeds field cutoff");
    SpectralField low = project(field, n_cut);
    WickEvaluator ev(ctx.order, n_cut);
    if (std::abs(ev.sigma() - ctx.variance) > 1e-9 * std::max(1.0, ev.sigma()))
        throw std::domain_error("g_functional: ctx.variance must equal sigma_n(N)");
    return ev.g_value(low.coeff.data());
}

double g_functional(const SpectralField& field, int n_cut, int m) {
    return g_functional(field, n_cut, WickContext{m, sigma_n(n_cut)});
}

SpectralField f_functional(const SpectralField& field, int n_cut, const WickContext& ctx) {
    ctx.validate();
    if (n_cut > field.cutoff) throw std::range_error("f_functional: N exceeds field cutoff");
    SpectralField low = project(field, n_cut);
    WickEvaluator ev(ctx.order, n_cut, (2 * ctx.order - 1) * n_cut + 1);
    if (std::abs(ev.sigma() - ctx.variance) > 1e-9 * std::max(1.0, ev.sigma()))
        throw std::domain_error("f_functional: ctx.variance must equal sigma_n(N)");
    SpectralField out = SpectralField::zero(n_cut);
    ev.f_value(low.coeff.data(), out.coeff.data());
    return out;
}

SpectralField f_functional(const SpectralField& field, int n_cut, int m) {
    return f_functional(field, n_cut, WickContext{m, sigma_n(n_cut)});
}

double ConvolutionTable::at(Mode n) const {
    if (std::abs(n.n1) > radius || std::abs(n.n2) > radius) return 0.0;
    return values[std::size_t(n.n1 + radius) * side() + std::size_t(n.n2 + radius)];
}

namespace {

// gamma_{2,K} on the periodic lattice of size p, then pointwise k-th power.
void fill_gamma_power(Fft2d& fft, int n_cut, int k) {
    fft.zero();
    const ModeSet& ms = ModeSet::get(n_cut);
    const int p = fft.size();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const int r = ((ms[i].n1 % p) + p) % p;
        const int c = ((ms[i].n2 % p) + p) % p;
        fft.data()[std::size_t(r) * p + c] += 1.0 / (1.0 + double(norm_sq(ms[i])));
    }
    fft.synthesize();
    const std::size_t np = fft.points();
    for (std::size_t i = 0; i < np; ++i) {
        const double g = fft.data()[i].real(); // gamma is real
        fft.data()[i] = std::pow(g, k);
    }
}

// F[gamma_K^k](0) = int gamma_K^k dx; grid mean, exact for p > k*n_cut.
double conv_value_zero(int k, int n_cut) {
    Fft2d fft(fft_friendly_size(k * n_cut + 1));
    fill_gamma_power(fft, n_cut, k);
    std::vector<double> re(fft.points());
    for (std::size_t i = 0; i < fft.points(); ++i) re[i] = fft.data()[i].real();
    return pairwise_sum(re) / double(fft.points());
}

} // namespace

ConvolutionTable convolution_table(int m, int n_cut, ConvKind kind) {
    if (m < 1 || n_cut < 0) throw std::domain_error("convolution_table: bad arguments");
    const int k = kind == ConvKind::even ? 2 * m : 2 * m - 1;
    const int radius = k * n_cut;
    const long side = 2L * radius + 1;
    if (side * side > 64L * 1024 * 1024)
        throw resource_error("convolution_table: lattice too large");
    Fft2d fft(fft_friendly_size(int(2 * radius + 1)));
    fill_gamma_power(fft, n_cut, k);
    fft.analyze();
    ConvolutionTable table{k, n_cut, radius, std::vector<double>(std::size_t(side) * side)};
    const int p = fft.size();
    for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b) {
            const int r = ((a % p) + p) % p;
            const int c = ((b % p) + p) % p;
            table.values[std::size_t(a + radius) * side + (b + radius)] =
                fft.data()[std::size_t(r) * p + c].real();
        }
    return table;
}

namespace {

void gamma_k_recurse(int level, int k, const ModeSet& ms, Mode n, Mode partial, double prod, double& acc) {
    if (level == k - 1) {
        // alternating constraint fixes the last index
        const int sign_last = (k % 2 == 1) ? 1 : -1;
        Mode last{};
        if (sign_last == 1)
            last = {n.n1 - partial.n1, n.n2 - partial.n2};
        else
            last = {partial.n1 - n.n1, partial.n2 - n.n2};
        if (!ms.contains(last)) return;
        acc += prod / (1.0 + double(norm_sq(last)));
        return;
    }
    const int sign = (level % 2 == 0) ? 1 : -1;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Mode nj = ms[i];
        gamma_k_recurse(level + 1, k, ms, n,
                        {partial.n1 + sign * nj.n1, partial.n2 + sign * nj.n2},
                        prod / (1.0 + double(norm_sq(nj))), acc);
    }
}

} // namespace

double gamma_k_bruteforce(int k, int n_cut, Mode n) {
    if (k < 2 || k > 6 || n_cut > 2)
        throw resource_error("gamma_k_bruteforce: oracle limited to k <= 6, N <= 2");
    const ModeSet& ms = ModeSet::get(n_cut);
    double acc = 0.0;
    gamma_k_recurse(0, k, ms, n, Mode{0, 0}, 1.0, acc);
    return acc;
}

double g_l2_distance_exact(int m, int n_small, int n_large) {
    if (m < 2) throw std::domain_error("g_l2_distance_exact: m must be >= 2");
    if (n_large < n_small || n_small < 0) throw std::domain_error("g_l2_distance_exact: need M >= N >= 0");
    if (n_large == n_small) return 0.0;
    const double c_large = conv_value_zero(2 * m, n_large);
    const double c_small = conv_value_zero(2 * m, n_small);
    return factorial(m) / double(2 * m) * std::sqrt(std::max(0.0, c_large - c_small));
}

double f_coeff_l2_exact(const ConvolutionTable& odd_table, int m, int n_cut, Mode n) {
    if (odd_table.order != 2 * m - 1 || odd_table.n_cut != n_cut)
        throw std::invalid_argument("f_coeff_l2_exact: table mismatch");
    if (norm_sq(n) > int64_t(n_cut) * n_cut) return 0.0; // <F_N, e_n> vanishes above the cutoff
    return factorial(m) * factorial(m - 1) * odd_table.at(n);
}

double f_coeff_l2_exact(int m, int n_cut, Mode n) {
    if (m < 2) throw std::domain_error("f_coeff_l2_exact: m must be >= 2");
    if (norm_sq(n) > int64_t(n_cut) * n_cut) return 0.0;
    const ConvolutionTable table = convolution_table(m, n_cut, ConvKind::odd);
    return f_coeff_l2_exact(table, m, n_cut, n);
}

double f_distance_hs_sq_exact(int m, int n_small, int n_large, double s) {
    if (m < 2) throw std::domain_error("f_distance_hs_sq_exact: m must be >= 2");
    if (n_large < n_small || n_small < 0)
        throw std::domain_error("f_distance_hs_sq_exact: need M >= N >= 0");
    const ConvolutionTable tn = convolution_table(m, n_small, ConvKind::odd);
    const ConvolutionTable tm = convolution_table(m, n_large, ConvKind::odd);
    const double cm = factorial(m) * factorial(m - 1);
    const ModeSet& ms = ModeSet::get(n_large);
    const int64_t r_small = int64_t(n_small) * n_small;
    std::vector<double> terms(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Mode n = ms[i];
        const double weight = std::pow(1.0 + double(norm_sq(n)), s);
        const double diff =
            norm_sq(n) <= r_small ? tm.at(n) - tn.at(n) : tm.at(n);
        terms[i] = weight * cm * diff;
    }
    return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Appendix decomposition, m = 3
// ---------------------------------------------------------------------------

namespace {

enum TupleClass : uint8_t { kNoPair = 0, kOnePair = 1, kAllEqual = 2, kTwoEqual = 3, kDistinct = 4 };

struct PackedTuple {
    std::array<uint8_t, 6> idx;
    uint8_t cls;
};

TupleClass classify(const std::array<uint8_t, 6>& t) {
    // odd slots 0,2,4 hold u factors; even slots 1,3,5 hold conjugates.
    std::array<uint8_t, 3> odd{t[0], t[2], t[4]};
    std::array<uint8_t, 3> even{t[1], t[3], t[5]};
    std::array<uint8_t, 3> so = odd, se = even;
    std::sort(so.begin(), so.end());
    std::sort(se.begin(), se.end());
    if (so == se) {
        if (so[0] == so[2]) return kAllEqual;
        if (so[0] == so[1] || so[1] == so[2]) return kTwoEqual;
        return kDistinct;
    }
    for (uint8_t a : odd)
        for (uint8_t b : even)
            if (a == b) return kOnePair;
    return kNoPair;
}

struct AppendixCache {
    std::vector<PackedTuple> gamma6; // Gamma_6(0)
    std::vector<std::array<uint8_t, 4>> gamma4; // Gamma_4(0)
};

const AppendixCache& appendix_cache(int n_cut) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<AppendixCache>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n_cut];
    if (slot) return *slot;
    slot = std::make_unique<AppendixCache>();
    const ModeSet& ms = ModeSet::get(n_cut);
    const int k = int(ms.size());
    for (int i1 = 0; i1 < k; ++i1)
        for (int i2 = 0; i2 < k; ++i2)
            for (int i3 = 0; i3 < k; ++i3) {
                // Gamma_4 while the first three indices are in hand
                {
                    const Mode n4{ms[std::size_t(i1)].n1 - ms[std::size_t(i2)].n1 + ms[std::size_t(i3)].n1,
                                  ms[std::size_t(i1)].n2 - ms[std::size_t(i2)].n2 + ms[std::size_t(i3)].n2};
                    const auto j4 = ms.index_of(n4);
                    if (j4 >= 0)
                        slot->gamma4.push_back({uint8_t(i1), uint8_t(i2), uint8_t(i3), uint8_t(j4)});
                }
                for (int i4 = 0; i4 < k; ++i4)
                    for (int i5 = 0; i5 < k; ++i5) {
                        const Mode n6{ms[std::size_t(i1)].n1 - ms[std::size_t(i2)].n1 + ms[std::size_t(i3)].n1 -
                                          ms[std::size_t(i4)].n1 + ms[std::size_t(i5)].n1,
                                      ms[std::size_t(i1)].n2 - ms[std::size_t(i2)].n2 + ms[std::size_t(i3)].n2 -
                                          ms[std::size_t(i4)].n2 + ms[std::size_t(i5)].n2};
                        const auto j6 = ms.index_of(n6);
                        if (j6 < 0) continue;
                        PackedTuple pt;
                        pt.idx = {uint8_t(i1), uint8_t(i2), uint8_t(i3), uint8_t(i4), uint8_t(i5), uint8_t(j6)};
                        pt.cls = classify(pt.idx);
                        slot->gamma6.push_back(pt);
                    }
            }
    return *slot;
}

} // namespace

AppendixTerms appendix_decomposition_m3(const SpectralField& field, int n_cut) {
    if (n_cut > 2) throw resource_error("appendix_decomposition_m3: limited to N <= 2");
    if (n_cut > field.cutoff) throw std::range_error("appendix_decomposition_m3: N exceeds field cutoff");
    const SpectralField low = project(field, n_cut);
    const ModeSet& ms = ModeSet::get(n_cut);
    const std::size_t k = ms.size();
    const AppendixCache& cache = appendix_cache(n_cut);

    std::vector<cplx> a(k), abar(k);
    for (std::size_t i = 0; i < k; ++i) {
        a[i] = low.coeff[i];
        abar[i] = std::conj(a[i]);
    }

    AppendixTerms out;
    out.sigma = sigma_n(n_cut);
    for (std::size_t i = 0; i < k; ++i) {
        const double t = std::norm(a[i]);
        out.s2 += t;
        out.q4 += t * t;
    }

    cplx acc_class[5] = {};
    for (const PackedTuple& t : cache.gamma6) {
        const cplx prod = a[t.idx[0]] * abar[t.idx[1]] * a[t.idx[2]] * abar[t.idx[3]] *
                          a[t.idx[4]] * abar[t.idx[5]];
        acc_class[t.cls] += prod;
    }
    out.term_i1 = acc_class[kNoPair];
    out.term_i2 = acc_class[kOnePair];
    out.term_i31 = acc_class[kAllEqual].real();
    out.term_i32 = acc_class[kTwoEqual].real();
    out.term_i33 = acc_class[kDistinct].real();
    out.term_i = out.term_i1 + out.term_i2 + cplx{out.term_i31 + out.term_i32 + out.term_i33, 0.0};

    cplx g4{0.0, 0.0};
    for (const auto& t : cache.gamma4) g4 += a[t[0]] * abar[t[1]] * a[t[2]] * abar[t[3]];
    out.term_ii = -9.0 * out.sigma * g4;
    out.term_iii = 18.0 * out.sigma * out.sigma * out.s2;
    out.term_iv = -6.0 * out.sigma * out.sigma * out.sigma;

    out.term_ii2 = -18.0 * out.sigma * out.s2 * out.s2;
    out.term_ii3 = 9.0 * out.sigma * out.q4;
    out.term_i321 = 9.0 * out.s2 * out.q4;
    out.term_i331 = 6.0 * out.s2 * out.s2 * out.s2;
    out.term_i332 = -18.0 * out.s2 * out.q4;

    out.combined = (out.term_i + out.term_ii + cplx{out.term_iii + out.term_iv, 0.0}).real() / 6.0;
    return out;
}

} // namespace wicknls
