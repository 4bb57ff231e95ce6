#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dephasim/errors.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/postprocess.hpp"

using namespace dephasim;
using namespace dephasim::postprocess;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double T = 2.5e-3;
const spectra::EnvironmentSpec reference_env{4.0, 10.0, 2 * pi * 320, 0.0};

dynamics::DecoherenceTrace clean() {
    const auto g = dynamics::uniform_grid(T, 500);
    return dynamics::continuum_trace(reference_env, sequences::PulseSequence::free_evolution(T), g,
                                     {dynamics::ContinuumScale::emulated(2 * pi * 4), 1e-9});
}

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}
} // namespace

TEST_CASE("smoothing leaves a clean trace nearly unchanged") {
    const auto c = clean();
    const auto r = smooth_with_report(c);
    CHECK(r.trace.smoothed);
    CHECK(r.trace.gamma[0] == 1.0);
    CHECK(max_dev(r.trace.gamma, c.gamma) < 2e-3);
    CHECK(r.report.imag_residual < 1e-10);
    CHECK(r.report.passband_bins <= r.report.spectrum_bins);
    CHECK(r.report.passband_bins > r.report.peak_bin);
    CHECK(measures::blp_measure(r.trace) == doctest::Approx(measures::blp_measure(c)).epsilon(0.02));
}

TEST_CASE("high-frequency dither is removed") {
    const auto c = clean();
    for (double f : {0.1, 0.21, 0.33, 0.45}) {
        CAPTURE(f);
        auto noisy = c;
        for (std::size_t i = 1; i < noisy.gamma.size(); ++i) noisy.gamma[i] += 0.03 * std::sin(2 * pi * f * i);
        noisy.method = dynamics::Method::monte_carlo;
        const auto r = smooth(noisy);
        CHECK(max_dev(r.gamma, c.gamma) < 0.01);
        CHECK(std::abs(measures::blp_measure(r) - measures::blp_measure(c)) <
              std::abs(measures::blp_measure(noisy) - measures::blp_measure(c)));
    }
}

TEST_CASE("output stays in [0, 1]") {
    auto t = clean();
    for (std::size_t i = 0; i < t.gamma.size(); ++i) t.gamma[i] = (i % 2) ? 1.0 : 0.0;
    const auto r = smooth(t, SmoothingConfig{0.5});
    for (double g : r.gamma) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
    }
}

TEST_CASE("fixed passband and rectangular taper") {
    const auto c = clean();
    SmoothingConfig cfg;
    cfg.passband_fraction = 0.1;
    cfg.taper = Taper::rectangular;
    const auto r = smooth_with_report(c, cfg);
    CHECK(r.report.passband_bins == static_cast<std::size_t>(std::ceil(0.1 * r.report.spectrum_bins)));
    CHECK(taper_from_string(to_string(Taper::rectangular)) == Taper::rectangular);
    cfg.passband_fraction = 1.5;
    CHECK_THROWS_AS(smooth(c, cfg), ConfigError);
}

TEST_CASE("grid must be uniform") {
    auto c = clean();
    c.grid[3] += 1e-6;
    CHECK_THROWS_AS(smooth(c), std::domain_error);
}

TEST_CASE("binned error bars") {
    const std::vector<std::vector<double>> bins{{1.0, 0.5}, {1.0, 0.7}, {1.0, 0.6}};
    const auto eb = binned_errorbars(bins);
    CHECK(eb.mean[1] == doctest::Approx(0.6));
    CHECK(eb.stddev[0] == 0.0);
    CHECK(eb.stddev[1] == doctest::Approx(0.1));
    CHECK_THROWS_AS(binned_errorbars({{1.0}}), std::invalid_argument);
}
