// dynamics.hpp: decoherence traces by continuum quadrature, exact comb sums and
// Monte Carlo ensembles

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dephasim/noise.hpp"
#include "dephasim/sequences.hpp"
#include "dephasim/spectra.hpp"

namespace dephasim::dynamics {

enum class Method { continuum, comb, monte_carlo };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct EnsembleMeta {
    std::size_t num_realizations{0};
    std::uint64_t master_seed{0};
    std::vector<std::vector<double>> bin_traces;  // empty unless binning requested
    std::vector<double> bin_stddev;               // pointwise sample stddev across bins
    std::vector<double> sine_residual;            // (1/N) sum sin(phi), zero-mean diagnostic
};

struct DecoherenceTrace {
    std::vector<double> grid;   // s, ascending
    std::vector<double> gamma;  // Gamma(t_i)
    Method method{Method::comb};
    bool smoothed{false};
    std::optional<EnsembleMeta> ensemble;
};

// num_points samples on [0, t_max], both ends included.
std::vector<double> uniform_grid(double t_max, std::size_t num_points);

// Multiplier applied to the thermal integral 2 int J coth sin^2/w^2.
//   bath():       the integral as written (reservoir with spectral density J).
//   emulated(wb): 1/wb, the smooth limit of the comb built with gamma^2 = 2 lambda,
//                 i.e. what the engineered field actually realizes.
struct ContinuumScale {
    double factor{1.0};
    static ContinuumScale bath() { return {1.0}; }
    static ContinuumScale emulated(double omega_b) { return {1.0 / omega_b}; }
};

struct ContinuumOptions {
    ContinuumScale scale{};
    double rel_tol{1e-8};
};

// factor * (1/2) int_0^inf J(w) coth(w/2kT) |F(w,t)|^2 dw by adaptive Gauss-Kronrod
// on panels no wider than half an oscillation period of |F|^2.
double chi_continuum(const spectra::EnvironmentSpec& env, const sequences::PulseSequence& seq,
                     double t, const ContinuumOptions& opts = {});

// (gamma^2/4) sum_k a^2(k) |F(k wb, t)|^2
double chi_comb(const spectra::NoiseModel& model, const sequences::PulseSequence& seq, double t);

DecoherenceTrace continuum_trace(const spectra::EnvironmentSpec& env,
                                 const sequences::PulseSequence& seq, std::span<const double> grid,
                                 const ContinuumOptions& opts = {});

// chi values of the comb on a grid (fast path used by the optimizer).
std::vector<double> comb_chi_trace(const spectra::NoiseModel& model,
                                   const sequences::PulseSequence& seq,
                                   std::span<const double> grid);

DecoherenceTrace comb_trace(const spectra::NoiseModel& model, const sequences::PulseSequence& seq,
                            std::span<const double> grid);

struct MonteCarloOptions {
    // When set, phase traces for realizations [0, dump_count) are kept.
    std::size_t dump_count{0};
};

struct MonteCarloResult {
    DecoherenceTrace trace;
    std::vector<std::vector<double>> dumped_phases;
};

// Gamma_hat(t_i) = (1/N) sum_j cos(phi_j(t_i)), realizations keyed by
// noise::realization_seed(master_seed, j). Bit-identical for any thread count.
MonteCarloResult monte_carlo(const spectra::NoiseModel& model, const sequences::PulseSequence& seq,
                             std::span<const double> grid, const noise::EnsembleSpec& ens,
                             const MonteCarloOptions& opts = {});

DecoherenceTrace monte_carlo_trace(const spectra::NoiseModel& model,
                                   const sequences::PulseSequence& seq,
                                   std::span<const double> grid, const noise::EnsembleSpec& ens);

// gamma_0(t) = -d ln Gamma / dt; central differences, one-sided at the ends.
// Throws NumericalError on nonpositive samples.
std::vector<double> decay_rate(const DecoherenceTrace& trace);

// Copy with samples raised to at least floor (Monte Carlo traces before logs).
DecoherenceTrace clip_floor(DecoherenceTrace trace, double floor = 1e-6);

// Pairwise (tree) summation; the association depends only on the length.
double pairwise_sum(std::span<const double> v);

} // namespace dephasim::dynamics
