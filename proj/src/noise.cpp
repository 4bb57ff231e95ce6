// noise.cpp

#include "dephasim/noise.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "dephasim/errors.hpp"

namespace dephasim::noise {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace

// SplitMix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization_index) {
    return mix64(mix64(master_seed ^ 0x6a09e667f3bcc908ULL) + kGolden * (realization_index + 1));
}

double uniform01(std::uint64_t key, std::uint64_t counter) {
    const std::uint64_t bits = mix64(key + kGolden * (counter + 1));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void EnsembleSpec::validate() const {
    if (num_realizations < 1) throw ConfigError("ensemble.num_realizations must be >= 1");
    if (binning) {
        if (binning->num_bins < 1 || binning->bin_size < 1)
            throw ConfigError("ensemble.binning needs num_bins >= 1 and bin_size >= 1");
        if (binning->num_bins * binning->bin_size > num_realizations)
            throw ConfigError("ensemble.binning: num_bins * bin_size exceeds num_realizations");
    }
}

void draw_phases(std::uint64_t seed, std::span<double> phases) {
    for (std::size_t k = 0; k < phases.size(); ++k)
        phases[k] = std::numbers::pi * (2.0 * uniform01(seed, k) - 1.0);
}

NoiseRealization sample_realization(std::shared_ptr<const spectra::NoiseModel> model,
                                    std::uint64_t seed) {
    if (!model) throw std::invalid_argument("sample_realization: null model");
    model->validate();
    NoiseRealization r;
    r.phases.resize(model->num_harmonics());
    draw_phases(seed, r.phases);
    r.model = std::move(model);
    r.seed = seed;
    return r;
}

double evaluate_xi(const NoiseRealization& r, double t) {
    const auto& m = *r.model;
    double sum = 0.0;
    for (std::size_t k = 1; k <= m.num_harmonics(); ++k)
        sum += m.amplitudes[k - 1] * std::cos(m.harmonic(k) * t + r.phases[k - 1]);
    return m.gamma * sum;
}

std::vector<double> accumulate_phase(const NoiseRealization& r,
                                     const sequences::PulseSequence& seq,
                                     std::span<const double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] > seq.total_time())
            throw std::domain_error("accumulate_phase: grid point beyond total_time");
        if (grid[i] < 0.0 || (i > 0 && grid[i] < grid[i - 1]))
            throw std::domain_error("accumulate_phase: grid must be ascending and >= 0");
    }
    const auto& m = *r.model;
    std::vector<double> phi(grid.size(), 0.0);
    std::vector<std::complex<double>> f(grid.size());
    // int f cos(w t' + p) dt' = Re(e^{ip} conj(F(w, t)))
    for (std::size_t k = 1; k <= m.num_harmonics(); ++k) {
        const double amp = m.gamma * m.amplitudes[k - 1];
        if (amp == 0.0) continue;
        sequences::filter_function_grid(seq, m.harmonic(k), grid, f);
        const std::complex<double> rot = std::polar(1.0, r.phases[k - 1]);
        for (std::size_t i = 0; i < grid.size(); ++i) phi[i] += amp * (rot * std::conj(f[i])).real();
    }
    return phi;
}

void write_phase_traces_csv(std::ostream& os, std::span<const std::vector<double>> traces,
                            std::span<const double> grid, std::size_t first_index) {
    os << "realization_index,t,phi\n";
    os.precision(17);
    for (std::size_t j = 0; j < traces.size(); ++j) {
        if (traces[j].size() != grid.size())
            throw std::invalid_argument("write_phase_traces_csv: trace/grid size mismatch");
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << first_index + j << ',' << grid[i] << ',' << traces[j][i] << '\n';
    }
}

} // namespace dephasim::noise
