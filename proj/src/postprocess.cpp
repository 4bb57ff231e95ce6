// postprocess.cpp

#include "dephasim/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>

#include <fftw3.h>

#include "dephasim/errors.hpp"

namespace dephasim::postprocess {

std::string to_string(Taper t) {
    return t == Taper::raised_cosine ? "raised_cosine" : "rectangular";
}

Taper taper_from_string(const std::string& s) {
    if (s == "raised_cosine") return Taper::raised_cosine;
    if (s == "rectangular") return Taper::rectangular;
    throw ConfigError("unknown taper '" + s + "'");
}

void SmoothingConfig::validate() const {
    if (passband_fraction && !(*passband_fraction > 0.0 && *passband_fraction <= 1.0))
        throw ConfigError("smoothing.passband_fraction must lie in (0, 1]");
    if (!(energy_fraction > 0.0 && energy_fraction <= 1.0))
        throw ConfigError("smoothing.energy_fraction must lie in (0, 1]");
    if (!(taper_width >= 0.0)) throw ConfigError("smoothing.taper_width must be >= 0");
}

namespace {

// FFTW planning is not thread-safe.
std::mutex g_plan_mutex;

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        real_ = fftw_alloc_real(n);
        spec_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard lock(g_plan_mutex);
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(g_plan_mutex);
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::vector<std::complex<double>> forward(const std::vector<double>& x) {
        std::copy(x.begin(), x.end(), real_);
        fftw_execute(forward_);
        std::vector<std::complex<double>> out(n_ / 2 + 1);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
        return out;
    }
    // c2r assumes Hermitian symmetry, so the output is real by construction.
    std::vector<double> inverse(const std::vector<std::complex<double>>& s) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            spec_[k][0] = s[k].real();
            spec_[k][1] = s[k].imag();
        }
        fftw_execute(backward_);
        std::vector<double> out(real_, real_ + n_);
        for (double& v : out) v /= static_cast<double>(n_);
        return out;
    }

private:
    std::size_t n_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan forward_;
    fftw_plan backward_;
};

// Weight of a half-spectrum bin in the full-length Parseval sum.
double bin_multiplicity(std::size_t k, std::size_t len) {
    return (k == 0 || 2 * k == len) ? 1.0 : 2.0;
}

} // namespace

SmoothingResult smooth_with_report(const dynamics::DecoherenceTrace& trace,
                                   const SmoothingConfig& cfg) {
    cfg.validate();
    const auto& t = trace.grid;
    const std::size_t n = trace.gamma.size();
    if (n < 4 || t.size() != n) throw std::invalid_argument("smooth: need at least 4 samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * dt)
            throw std::domain_error("smooth: grid is not uniform");

    const double tail = trace.gamma.back();
    const std::size_t len = 2 * n - 2;
    std::vector<double> x(len);
    for (std::size_t i = 0; i < n; ++i) x[i] = trace.gamma[i] - tail;
    for (std::size_t i = n; i < len; ++i) x[i] = x[len - i];

    RealFft fft(len);
    auto spec = fft.forward(x);
    const std::size_t bins = spec.size();

    SmoothingReport rep;
    rep.spectrum_bins = bins;
    std::vector<double> energy(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        energy[k] = bin_multiplicity(k, len) * std::norm(spec[k]) / static_cast<double>(len);
        rep.total_energy += energy[k];
    }
    rep.peak_bin = static_cast<std::size_t>(
        std::max_element(spec.begin(), spec.end(),
                         [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); }) -
        spec.begin());

    std::size_t keep;
    if (cfg.passband_fraction) {
        keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(*cfg.passband_fraction *
                                                                            static_cast<double>(bins))));
    } else {
        // 5-bin running median, so isolated narrowband lines do not extend the passband
        std::vector<double> envelope(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            const std::size_t lo = k < 2 ? 0 : k - 2;
            const std::size_t hi = std::min(bins, k + 3);
            std::vector<double> w(energy.begin() + static_cast<std::ptrdiff_t>(lo),
                                  energy.begin() + static_cast<std::ptrdiff_t>(hi));
            std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2), w.end());
            envelope[k] = w[w.size() / 2];
        }
        const auto prefix = [&](const std::vector<double>& e) {
            const double total = std::accumulate(e.begin(), e.end(), 0.0);
            double acc = 0.0;
            std::size_t k = 0;
            while (k < bins && acc < cfg.energy_fraction * total) acc += e[k++];
            return std::max<std::size_t>(k, 1);
        };
        // running minimum of the envelope ignores lines that sit above the decayed signal tail
        std::vector<double> floor_env(bins);
        std::inclusive_scan(envelope.begin(), envelope.end(), floor_env.begin(),
                            [](double a, double b) { return std::min(a, b); });
        keep = std::min(prefix(envelope), prefix(floor_env));
    }
    if (cfg.preserve_peak) keep = std::max(keep, rep.peak_bin + 1);
    keep = std::min(keep, bins);
    rep.passband_bins = keep;
    for (std::size_t k = 0; k < keep; ++k) rep.passband_energy += energy[k];

    const auto width = static_cast<std::size_t>(
        cfg.taper == Taper::raised_cosine ? std::ceil(cfg.taper_width * static_cast<double>(keep)) : 0.0);
    std::vector<std::complex<double>> filtered(bins), removed(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        double w = 0.0;
        if (k < keep) {
            w = 1.0;
        } else if (k < keep + width) {
            const double u = static_cast<double>(k - keep + 1) / static_cast<double>(width + 1);
            w = 0.5 * (1.0 + std::cos(std::numbers::pi * u));
        }
        filtered[k] = w * spec[k];
        removed[k] = (k < keep) ? std::complex<double>{0.0, 0.0} : spec[k];
    }
    // the mirrored input is real and even; keep the filtered spectrum exactly so
    for (auto& c : filtered) {
        rep.imag_residual = std::max(rep.imag_residual, std::abs(c.imag()));
        c = {c.real(), 0.0};
    }
    rep.imag_residual /= std::max(1e-300, std::abs(spec[0]) + rep.total_energy);

    const auto high = fft.inverse(removed);
    for (double v : high) rep.removed_energy += v * v;

    const auto y = fft.inverse(filtered);
    dynamics::DecoherenceTrace out = trace;
    out.smoothed = true;
    out.ensemble.reset();
    const double head = y[0];
    const double target = 1.0 - tail;
    for (std::size_t i = 0; i < n; ++i) {
        double v = y[i];
        if (std::abs(head) > 1e-12) v *= target / head;
        out.gamma[i] = std::clamp(tail + v, 0.0, 1.0);
    }
    out.gamma[0] = 1.0;
    return {std::move(out), rep};
}

dynamics::DecoherenceTrace smooth(const dynamics::DecoherenceTrace& trace, const SmoothingConfig& cfg) {
    return smooth_with_report(trace, cfg).trace;
}

ErrorBars binned_errorbars(const std::vector<std::vector<double>>& per_bin_traces) {
    if (per_bin_traces.size() < 2) throw std::invalid_argument("binned_errorbars: need at least 2 bins");
    const std::size_t n = per_bin_traces.front().size();
    for (const auto& b : per_bin_traces)
        if (b.size() != n) throw std::invalid_argument("binned_errorbars: mismatched bin grids");
    const auto bins = static_cast<double>(per_bin_traces.size());
    ErrorBars eb{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (const auto& b : per_bin_traces) m += b[i];
        m /= bins;
        double ss = 0.0;
        for (const auto& b : per_bin_traces) ss += (b[i] - m) * (b[i] - m);
        eb.mean[i] = m;
        eb.stddev[i] = std::sqrt(ss / (bins - 1.0));
    }
    return eb;
}

} // namespace dephasim::postprocess
