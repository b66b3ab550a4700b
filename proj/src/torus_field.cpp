#include "wicknls/torus_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wicknls/errors.hpp"
#include "wicknls/stats.hpp"

namespace wicknls {

void SpectralField::set(Mode n, cplx v) {
    const auto i = mode_set().index_of(n);
    if (i < 0) throw std::range_error("SpectralField::set: mode outside cutoff ball");
    coeff[std::size_t(i)] = v;
}

double SpectralField::mass() const {
    std::vector<double> sq(coeff.size());
    for (std::size_t i = 0; i < coeff.size(); ++i) sq[i] = std::norm(coeff[i]);
    return pairwise_sum(sq);
}

SpectralField field_from_noise(const NoiseVector& noise) {
    const ModeSet& ms = ModeSet::get(noise.cutoff);
    SpectralField f = SpectralField::zero(noise.cutoff);
    for (std::size_t i = 0; i < ms.size(); ++i)
        f.coeff[i] = noise.g[i] / std::sqrt(1.0 + double(norm_sq(ms[i])));
    return f;
}

SpectralField sample_gff(uint64_t seed, int n_max) {
    return field_from_noise(NoiseVector::draw(seed, n_max));
}

SpectralField project(const SpectralField& field, int n_cut) {
    if (n_cut > field.cutoff) throw std::range_error("project: N exceeds field cutoff");
    if (n_cut == field.cutoff) return field;
    const ModeSet& sub = ModeSet::get(n_cut);
    SpectralField out = SpectralField::zero(n_cut);
    for (std::size_t i = 0; i < sub.size(); ++i) out.coeff[i] = field.at(sub[i]);
    return out;
}

double sigma_n(int n_cut) {
    if (n_cut < 0) throw std::domain_error("sigma_n: N must be >= 0");
    const ModeSet& ms = ModeSet::get(n_cut);
    std::vector<double> terms(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) terms[i] = 1.0 / (1.0 + double(norm_sq(ms[i])));
    return pairwise_sum(terms);
}

CovarianceKernel gamma_kernel(double s, int n_cut) {
    if (n_cut < 0) throw std::domain_error("gamma_kernel: N must be >= 0");
    const ModeSet& ms = ModeSet::get(n_cut);
    CovarianceKernel k{s, n_cut, std::vector<double>(ms.size())};
    for (std::size_t i = 0; i < ms.size(); ++i)
        k.coeff[i] = std::pow(1.0 + double(norm_sq(ms[i])), -s / 2.0);
    return k;
}

cplx gamma_eval(const CovarianceKernel& kernel, double x1, double x2) {
    const ModeSet& ms = ModeSet::get(kernel.cutoff);
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double phase = ms[i].n1 * x1 + ms[i].n2 * x2;
        sum += kernel.coeff[i] * cplx{std::cos(phase), std::sin(phase)};
    }
    return sum;
}

cplx white_noise_functional(const SpectralField& f, const NoiseVector& noise) {
    if (f.cutoff > noise.cutoff)
        throw std::range_error("white_noise_functional: f support exceeds noise mode set");
    const ModeSet& fm = ModeSet::get(f.cutoff);
    const ModeSet& nm = ModeSet::get(noise.cutoff);
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < fm.size(); ++i) {
        const auto j = nm.index_of(fm[i]);
        sum += f.coeff[i] * std::conj(noise.g[std::size_t(j)]);
    }
    return sum;
}

SpectralField eta_n(double x1, double x2, int n_cut) {
    const double inv_sqrt_sigma = 1.0 / std::sqrt(sigma_n(n_cut));
    const ModeSet& ms = ModeSet::get(n_cut);
    SpectralField f = SpectralField::zero(n_cut);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double phase = -(ms[i].n1 * x1 + ms[i].n2 * x2);
        f.coeff[i] = inv_sqrt_sigma / std::sqrt(1.0 + double(norm_sq(ms[i]))) *
                     cplx{std::cos(phase), std::sin(phase)};
    }
    return f;
}

cplx l2_inner(const SpectralField& f, const SpectralField& h) {
    const SpectralField& small = f.cutoff <= h.cutoff ? f : h;
    const ModeSet& ms = small.mode_set();
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < ms.size(); ++i) sum += f.at(ms[i]) * std::conj(h.at(ms[i]));
    return sum;
}

int default_grid_size(int n_cut) {
    int g = 2;
    while (g < 2 * n_cut + 2) g *= 2;
    return g;
}

TorusGrid::TorusGrid(int n_cut, int grid_size)
    : n_cut_(n_cut), fft_(grid_size) {
    if (grid_size < 2 * n_cut + 1)
        throw aliasing_error("TorusGrid: grid size " + std::to_string(grid_size) +
                             " < 2N+1 for N = " + std::to_string(n_cut));
    const ModeSet& ms = ModeSet::get(n_cut);
    embed_.resize(ms.size());
    const int g = grid_size;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const int r = ((ms[i].n1 % g) + g) % g;
        const int c = ((ms[i].n2 % g) + g) % g;
        embed_[i] = std::size_t(r) * g + c;
    }
}

void TorusGrid::synthesize(const cplx* coeff) {
    fft_.zero();
    for (std::size_t i = 0; i < embed_.size(); ++i) fft_.data()[embed_[i]] = coeff[i];
    fft_.synthesize();
}

void TorusGrid::analyze(cplx* coeff_out) {
    fft_.analyze();
    for (std::size_t i = 0; i < embed_.size(); ++i) coeff_out[i] = fft_.data()[embed_[i]];
}

std::vector<cplx> to_physical(const SpectralField& field, int grid_size) {
    if (grid_size < 2 * field.cutoff + 1)
        throw aliasing_error("to_physical: grid size < 2N+1, lossless synthesis impossible");
    TorusGrid grid(field.cutoff, grid_size);
    grid.synthesize(field.coeff.data());
    return std::vector<cplx>(grid.values(), grid.values() + grid.grid_size() * std::size_t(grid.grid_size()));
}

std::vector<cplx> to_physical(const SpectralField& field) {
    return to_physical(field, default_grid_size(field.cutoff));
}

SpectralField to_spectral(const std::vector<cplx>& values, int grid_size, int n_cut) {
    if (std::size_t(grid_size) * grid_size != values.size())
        throw std::invalid_argument("to_spectral: values size does not match grid");
    if (grid_size < 2 * n_cut + 1)
        throw aliasing_error("to_spectral: grid size < 2N+1, coefficients would alias");
    TorusGrid grid(n_cut, grid_size);
    std::memcpy(grid.values(), values.data(), sizeof(cplx) * values.size());
    SpectralField f = SpectralField::zero(n_cut);
    grid.analyze(f.coeff.data());
    return f;
}

namespace {

template <class T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("load_field: truncated stream");
    return v;
}

} // namespace

void save_field(const SpectralField& field, std::ostream& os) {
    os.write("WGF1", 4);
    write_raw(os, uint32_t(field.cutoff));
    write_raw(os, uint32_t(field.coeff.size()));
    const ModeSet& ms = field.mode_set();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        write_raw(os, int32_t(ms[i].n1));
        write_raw(os, int32_t(ms[i].n2));
        write_raw(os, field.coeff[i].real());
        write_raw(os, field.coeff[i].imag());
    }
}

SpectralField load_field(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "WGF1", 4) != 0)
        throw std::runtime_error("load_field: bad magic, not a WGF1 field");
    const auto cutoff = read_raw<uint32_t>(is);
    const auto count = read_raw<uint32_t>(is);
    SpectralField f = SpectralField::zero(int(cutoff));
    for (uint32_t i = 0; i < count; ++i) {
        Mode n{read_raw<int32_t>(is), read_raw<int32_t>(is)};
        const double re = read_raw<double>(is);
        const double im = read_raw<double>(is);
        f.set(n, {re, im});
    }
    return f;
}

void save_field_file(const SpectralField& field, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_field_file: cannot open " + path);
    save_field(field, os);
}

SpectralField load_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_field_file: cannot open " + path);
    return load_field(is);
}

std::string field_to_json(const SpectralField& field) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"coeffs\":[";
    const ModeSet& ms = field.mode_set();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (i) os << ",";
        os << "[" << ms[i].n1 << "," << ms[i].n2 << "," << field.coeff[i].real() << ","
           << field.coeff[i].imag() << "]";
    }
    os << "],\"cutoff\":" << field.cutoff << "}";
    return os.str();
}

} // namespace wicknls
