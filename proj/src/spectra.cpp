// spectra.cpp

#include "dephasim/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dephasim/errors.hpp"

namespace dephasim::spectra {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

// Same as spectral_density()*thermal_factor() without the domain checks.
double weighted_density(const EnvironmentSpec& env, double omega) {
    if (omega <= 0.0) return 0.0;
    return spectral_density(env, omega) * thermal_factor(env, omega);
}

} // namespace

void EnvironmentSpec::validate() const {
    require(std::isfinite(s) && s > 0.0, "environment.s must be > 0");
    require(std::isfinite(lambda) && lambda > 0.0, "environment.lambda must be > 0");
    require(std::isfinite(omega_c) && omega_c > 0.0, "environment.omega_c_rad_s must be > 0");
    require(std::isfinite(temperature_energy) && temperature_energy >= 0.0,
            "environment.temperature_energy must be >= 0");
}

void NoiseModel::validate() const {
    require(std::isfinite(gamma) && gamma >= 0.0, "noise.gamma must be finite and >= 0");
    require(std::isfinite(omega_b) && omega_b > 0.0, "noise.omega_b_rad_s must be > 0");
    require(!amplitudes.empty(), "noise.M must be >= 1");
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        if (!std::isfinite(amplitudes[k]) || amplitudes[k] < 0.0) {
            std::ostringstream os;
            os << "noise.amplitudes[" << k << "] must be finite and >= 0";
            throw ConfigError(os.str());
        }
    }
}

double spectral_density(const EnvironmentSpec& env, double omega) {
    if (!(omega >= 0.0)) throw std::domain_error("spectral_density: omega must be >= 0");
    if (omega == 0.0) return 0.0;
    const double x = omega / env.omega_c;
    // lambda * omega_c * x^s * e^-x, evaluated in log space to avoid overflow at large s
    return env.lambda * env.omega_c * std::exp(env.s * std::log(x) - x);
}

double thermal_factor(const EnvironmentSpec& env, double omega) {
    if (!(omega > 0.0)) throw std::domain_error("thermal_factor: omega must be > 0");
    if (env.temperature_energy == 0.0) return 1.0;
    const double x = omega / (2.0 * env.temperature_energy);
    if (x > 40.0) return 1.0;
    return 1.0 / std::tanh(x);
}

std::optional<std::string> coverage_warning(const EnvironmentSpec& env, double omega_b,
                                            std::size_t num_harmonics) {
    const double span = static_cast<double>(num_harmonics) * omega_b;
    if (span >= 5.0 * env.omega_c) return std::nullopt;
    std::ostringstream os;
    os << "comb covers M*omega_b = " << span / env.omega_c
       << " omega_c; at least 5 omega_c is needed to keep the truncated tail below ~1%";
    return os.str();
}

NoiseModel build_noise_model(const EnvironmentSpec& env, double omega_b, std::size_t num_harmonics,
                             const BuildOptions& opts) {
    env.validate();
    require(std::isfinite(omega_b) && omega_b > 0.0, "noise.omega_b_rad_s must be > 0");
    require(num_harmonics >= 1, "noise.M must be >= 1");
    if (opts.strict) {
        if (auto w = coverage_warning(env, omega_b, num_harmonics)) throw ConfigError(*w);
    }

    NoiseModel model;
    model.gamma = std::sqrt(2.0 * env.lambda);
    model.omega_b = omega_b;
    model.amplitudes.resize(num_harmonics);
    for (std::size_t k = 1; k <= num_harmonics; ++k) {
        const double w = static_cast<double>(k) * omega_b;
        // a^2 = J(w)/lambda * coth
        model.amplitudes[k - 1] = std::sqrt(weighted_density(env, w) / env.lambda);
    }
    return model;
}

std::vector<SpectralLine> power_spectrum_weights(const NoiseModel& model) {
    model.validate();
    const double scale = std::numbers::pi * model.gamma * model.gamma / 2.0;
    std::vector<SpectralLine> lines(model.num_harmonics());
    for (std::size_t k = 1; k <= lines.size(); ++k) {
        const double a = model.amplitudes[k - 1];
        lines[k - 1] = {model.harmonic(k), scale * a * a};
    }
    return lines;
}

double riemann_free_chi(const EnvironmentSpec& env, double omega_b, std::size_t num_harmonics,
                        double t) {
    env.validate();
    double sum = 0.0;
    for (std::size_t k = 1; k <= num_harmonics; ++k) {
        const double w = static_cast<double>(k) * omega_b;
        const double sn = std::sin(0.5 * w * t);
        sum += weighted_density(env, w) * 2.0 * sn * sn / (w * w);
    }
    return omega_b * sum;
}

} // namespace dephasim::spectra
