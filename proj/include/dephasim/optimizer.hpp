// optimizer.hpp: genetic-algorithm synthesis of decoupling sequences (NDD)
//
// Genes are the n+1 delays between switching points. Every genome lives on the
// simplex sum(d) = T with d >= min_delay; crossover and mutation are followed by
// a projection back onto it.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dephasim/dynamics.hpp"
#include "dephasim/sequences.hpp"
#include "dephasim/spectra.hpp"

namespace dephasim::optimizer {

// A target environment with both representations of the noise: the smooth
// spectral density (continuum route) and the engineered comb.
struct Environment {
    spectra::EnvironmentSpec spec;
    spectra::NoiseModel comb;
    dynamics::ContinuumScale scale;
};

// Comb from build_noise_model and the matching emulated continuum scale.
Environment make_environment(const spectra::EnvironmentSpec& spec, double omega_b,
                             std::size_t num_harmonics);

struct FitnessSettings {
    dynamics::Method method{dynamics::Method::comb};  // comb or continuum
    std::size_t grid_points{500};
    double horizon{0.0};  // 0 means the sequence total time
};

struct GaConfig {
    std::size_t population_size{64};
    std::size_t max_generations{500};
    double min_delay{50e-6};
    double mutation_scale{0.02};   // sigma as a fraction of T
    double mutation_decay{0.995};  // per generation
    double mutation_rate{0.3};     // per-gene probability
    double swap_rate{0.1};         // per-offspring probability of exchanging two delays
    double crossover_rate{0.9};
    double blend_alpha{0.3};
    std::size_t tournament_size{4};
    std::size_t elitism_count{2};
    std::size_t stall_generations{80};
    std::uint64_t seed{0};
    bool seed_cpmg{true};
    FitnessSettings fitness{};

    void validate(double total_time, std::size_t pulses) const;
};

struct OptimizationResult {
    sequences::PulseSequence best_sequence;
    double best_fitness{0.0};
    std::vector<double> fitness_history;  // best-so-far per generation
    sequences::PulseSequence baseline_sequence;  // CPMG as placed in the population
    double baseline{0.0};
    std::size_t generations{0};
    std::size_t evaluations{0};
};

// Trace on a uniform grid over [0, horizon] by the chosen route.
dynamics::DecoherenceTrace fitness_trace(const Environment& env, const sequences::PulseSequence& seq,
                                         const FitnessSettings& settings = {});

// Coherence protection P of seq over the configured horizon.
double fitness(const Environment& env, const sequences::PulseSequence& seq,
               const FitnessSettings& settings = {});

// Clip to min_delay, then rescale the slack so the delays sum to total_time.
void project_to_simplex(std::span<double> delays, double total_time, double min_delay);

sequences::PulseSequence decode(std::span<const double> delays, double total_time,
                                std::string label = "NDD");

OptimizationResult optimize_ndd(const Environment& env, double total_time, std::size_t pulses,
                                const GaConfig& cfg = {});

struct SweepRow {
    std::size_t n{0};
    double p_cpmg{0.0}, p_udd{0.0}, p_ndd{0.0};
    double n_cpmg{0.0}, n_udd{0.0}, n_ndd{0.0};
    sequences::PulseSequence ndd;
};

struct SweepOptions {
    bool optimize{true};  // false skips NDD (columns left at 0)
    std::size_t grid_points{500};
};

// Protection and BLP on continuum traces for CPMG, UDD and the optimized NDD.
std::vector<SweepRow> sweep_pulse_count(const Environment& env, double total_time,
                                        std::span<const std::size_t> pulse_counts,
                                        const GaConfig& cfg = {}, const SweepOptions& opts = {});

} // namespace dephasim::optimizer
