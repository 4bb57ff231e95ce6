// spectra.hpp: Ohmic-family spectral densities and the engineered harmonic comb
//
// Frequencies are angular (rad/s) and hbar = 1, so temperature enters only as
// the energy k_B*T in the same units as omega.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dephasim::spectra {

// J(w) = lambda * exp(-w/omega_c) * w^s / omega_c^(s-1)
struct EnvironmentSpec {
    double s{1.0};                   // ohmicity exponent
    double lambda{10.0};             // dimensionless coupling
    double omega_c{0.0};             // cutoff, rad/s
    double temperature_energy{0.0};  // k_B*T; 0 is the zero-temperature limit

    void validate() const;  // throws ConfigError naming the offending field
};

// xi(t) = gamma * sum_k a(k) cos(k*omega_b*t + phi_k), k = 1..M
struct NoiseModel {
    double gamma{0.0};
    double omega_b{0.0};  // rad/s
    std::vector<double> amplitudes;  // a(1..M), index 0 holds a(1)

    std::size_t num_harmonics() const { return amplitudes.size(); }
    double harmonic(std::size_t k) const { return static_cast<double>(k) * omega_b; }  // k is 1-based
    void validate() const;
};

struct BuildOptions {
    bool strict{false};  // coverage shortfall becomes a ConfigError
};

double spectral_density(const EnvironmentSpec& env, double omega);

// coth(omega / 2kT), exactly 1 at zero temperature.
double thermal_factor(const EnvironmentSpec& env, double omega);

// Comb amplitudes a^2(k) = (k wb)^s / wc^(s-1) * exp(-k wb/wc) * coth(k wb / 2kT)
// and gamma = sqrt(2 lambda).
NoiseModel build_noise_model(const EnvironmentSpec& env, double omega_b, std::size_t num_harmonics,
                             const BuildOptions& opts = {});

// Returns a message when M*omega_b < 5*omega_c (spectrum tail truncated by more than ~1%).
std::optional<std::string> coverage_warning(const EnvironmentSpec& env, double omega_b,
                                            std::size_t num_harmonics);

struct SpectralLine {
    double omega;   // k*omega_b
    double weight;  // delta weight on the positive axis, (pi gamma^2 / 2) a^2(k)
};

std::vector<SpectralLine> power_spectrum_weights(const NoiseModel& model);

// Riemann sum of the free-evolution thermal integral over the comb lines:
//   omega_b * sum_k J(k wb) coth(k wb / 2kT) * 4 sin^2(k wb t/2)/(k wb)^2 * 1/2
// Converges to the free-evolution continuum chi as omega_b -> 0 at fixed M*omega_b.
double riemann_free_chi(const EnvironmentSpec& env, double omega_b, std::size_t num_harmonics,
                        double t);

} // namespace dephasim::spectra
