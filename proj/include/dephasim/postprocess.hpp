// postprocess.hpp: Fourier-domain smoothing of finite-ensemble traces and
// bin-based error bars

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dephasim/dynamics.hpp"

namespace dephasim::postprocess {

enum class Taper { raised_cosine, rectangular };

std::string to_string(Taper t);
Taper taper_from_string(const std::string& s);

struct SmoothingConfig {
    // Fraction of the (mirrored) spectrum kept at full weight. Unset selects the
    // smallest low-frequency band holding energy_fraction of the spectral energy.
    std::optional<double> passband_fraction;
    double energy_fraction{0.9999};
    Taper taper{Taper::raised_cosine};
    double taper_width{1.0};  // taper length as a multiple of the passband
    bool preserve_peak{true};

    void validate() const;
};

struct SmoothingReport {
    std::size_t spectrum_bins{0};
    std::size_t passband_bins{0};  // bins [0, passband_bins) kept at full weight
    std::size_t peak_bin{0};
    double total_energy{0.0};
    double passband_energy{0.0};
    double removed_energy{0.0};  // time-domain energy of the complementary high-pass part
    double imag_residual{0.0};   // max |imag| of the inverse transform before symmetrization
};

struct SmoothingResult {
    dynamics::DecoherenceTrace trace;
    SmoothingReport report;
};

// Detrends by the final value, mirrors the trace to an even periodic signal,
// filters its spectrum, transforms back, restores the trend, renormalizes
// Gamma(0) = 1 and clips to [0, 1]. Requires a uniform grid.
SmoothingResult smooth_with_report(const dynamics::DecoherenceTrace& trace,
                                   const SmoothingConfig& cfg = {});
dynamics::DecoherenceTrace smooth(const dynamics::DecoherenceTrace& trace,
                                  const SmoothingConfig& cfg = {});

struct ErrorBars {
    std::vector<double> mean;
    std::vector<double> stddev;  // sample standard deviation (n - 1)
};

ErrorBars binned_errorbars(const std::vector<std::vector<double>>& per_bin_traces);

} // namespace dephasim::postprocess
