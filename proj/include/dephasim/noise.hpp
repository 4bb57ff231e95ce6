// noise.hpp: seeded realizations of the engineered stochastic field xi(t)

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dephasim/sequences.hpp"
#include "dephasim/spectra.hpp"

namespace dephasim::noise {

// Counter-based stream: the k-th draw of a key is a pure function of (key, k),
// so realizations can be generated in any order or in parallel.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization_index);
double uniform01(std::uint64_t key, std::uint64_t counter);  // [0, 1)

struct NoiseRealization {
    std::shared_ptr<const spectra::NoiseModel> model;
    std::vector<double> phases;  // one per harmonic, uniform on [-pi, pi)
    std::uint64_t seed{0};
};

struct Binning {
    std::size_t num_bins{10};
    std::size_t bin_size{900};
};

struct EnsembleSpec {
    std::size_t num_realizations{1000};
    std::uint64_t master_seed{0};
    std::optional<Binning> binning;

    void validate() const;
};

NoiseRealization sample_realization(std::shared_ptr<const spectra::NoiseModel> model,
                                    std::uint64_t seed);

// Fills phases for harmonics 1..phases.size() from a realization seed.
void draw_phases(std::uint64_t seed, std::span<double> phases);

double evaluate_xi(const NoiseRealization& r, double t);

// phi(t_i) = int_0^{t_i} f(t') xi(t') dt', integrated in closed form per harmonic.
std::vector<double> accumulate_phase(const NoiseRealization& r,
                                     const sequences::PulseSequence& seq,
                                     std::span<const double> grid);

// CSV with columns realization_index,t,phi.
void write_phase_traces_csv(std::ostream& os, std::span<const std::vector<double>> traces,
                            std::span<const double> grid, std::size_t first_index = 0);

} // namespace dephasim::noise
