#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/parallel.hpp"

using namespace dephasim;
using namespace dephasim::dynamics;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double T = 2.5e-3;
constexpr double wb = 2 * pi * 4;
const spectra::EnvironmentSpec reference_env{4.0, 10.0, 2 * pi * 320, 0.0};

double closed_form_chi(const spectra::EnvironmentSpec& e, double t) {
    const double tau = e.omega_c * t;
    if (e.s == 1.0) return 0.5 * e.lambda * std::log1p(tau * tau);
    const double a = e.s - 1.0;
    return e.lambda * std::tgamma(a) * (1.0 - std::cos(a * std::atan(tau)) / std::pow(1.0 + tau * tau, 0.5 * a));
}
} // namespace

TEST_CASE("continuum chi against the closed-form Ohmic integral") {
    const auto free = sequences::PulseSequence::free_evolution(T);
    for (double s : {1.0, 1.5, 2.0, 3.0, 4.0, 5.5})
        for (double t : {0.05e-3, 0.497e-3, 1.2e-3, 2.5e-3}) {
            auto e = reference_env;
            e.s = s;
            const double got = chi_continuum(e, free, t, {ContinuumScale::bath(), 1e-10});
            CHECK(got == doctest::Approx(closed_form_chi(e, t)).epsilon(1e-7));
        }
    CHECK(chi_continuum(reference_env, free, 0.0) == 0.0);
    CHECK_THROWS_AS(chi_continuum(reference_env, free, 3e-3), std::domain_error);
}

TEST_CASE("emulated scale divides by omega_b") {
    const auto seq = sequences::make_cpmg(T, 3);
    const double bath = chi_continuum(reference_env, seq, 1.3e-3, {ContinuumScale::bath(), 1e-10});
    const double emu = chi_continuum(reference_env, seq, 1.3e-3, {ContinuumScale::emulated(wb), 1e-10});
    CHECK(emu == doctest::Approx(bath / wb).epsilon(1e-9));
}

TEST_CASE("comb chi is the weighted line sum") {
    const auto model = spectra::build_noise_model(reference_env, wb, 300);
    const auto seq = sequences::make_udd(T, 5);
    const double t = 1.7e-3;
    double acc = 0;
    for (std::size_t k = 1; k <= 300; ++k)
        acc += model.amplitudes[k - 1] * model.amplitudes[k - 1] * sequences::filter_power(seq, k * wb, t);
    CHECK(chi_comb(model, seq, t) == doctest::Approx(model.gamma * model.gamma / 4 * acc).epsilon(1e-12));

    const auto grid = uniform_grid(T, 77);
    const auto chis = comb_chi_trace(model, seq, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(chis[i] == doctest::Approx(chi_comb(model, seq, grid[i])).epsilon(1e-10));
    const auto tr = comb_trace(model, seq, grid);
    CHECK(tr.method == Method::comb);
    CHECK(tr.gamma[10] == doctest::Approx(std::exp(-chis[10])));
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(T, 501);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == T);
    CHECK(g[250] == doctest::Approx(T / 2));
    CHECK_THROWS_AS(uniform_grid(T, 1), ConfigError);
}

TEST_CASE("Monte Carlo mean equals the average over sampled realizations") {
    const auto model = std::make_shared<const spectra::NoiseModel>(spectra::build_noise_model(reference_env, wb, 50));
    const auto seq = sequences::make_cpmg(T, 2);
    const auto grid = uniform_grid(T, 40);
    const noise::EnsembleSpec ens{16, 99, noise::Binning{4, 4}};
    const auto tr = monte_carlo_trace(*model, seq, grid, ens);
    std::vector<double> mean(grid.size(), 0.0);
    std::vector<std::vector<double>> per(16);
    for (std::uint64_t j = 0; j < 16; ++j) {
        const auto r = noise::sample_realization(model, noise::realization_seed(99, j));
        const auto phi = noise::accumulate_phase(r, seq, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mean[i] += std::cos(phi[i]) / 16.0;
            per[j].push_back(std::cos(phi[i]));
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(tr.gamma[i] == doctest::Approx(mean[i]).epsilon(1e-10));
    REQUIRE(tr.ensemble);
    CHECK(tr.ensemble->num_realizations == 16);
    REQUIRE(tr.ensemble->bin_traces.size() == 4);
    // bin 2 holds realizations 8..11
    const std::size_t i = 25;
    const double b2 = (per[8][i] + per[9][i] + per[10][i] + per[11][i]) / 4;
    CHECK(tr.ensemble->bin_traces[2][i] == doctest::Approx(b2).epsilon(1e-10));
}

TEST_CASE("Monte Carlo is deterministic and thread-count independent") {
    const auto model = spectra::build_noise_model(reference_env, wb, 200);
    const auto seq = sequences::PulseSequence::free_evolution(T);
    const auto grid = uniform_grid(T, 60);
    const noise::EnsembleSpec ens{300, 5, std::nullopt};
    set_thread_count(1);
    const auto a = monte_carlo_trace(model, seq, grid, ens);
    set_thread_count(4);
    const auto b = monte_carlo_trace(model, seq, grid, ens);
    set_thread_count(0);
    CHECK(a.gamma == b.gamma);
    const auto c = monte_carlo_trace(model, seq, grid, {300, 6, std::nullopt});
    CHECK(a.gamma != c.gamma);
}

TEST_CASE("Monte Carlo converges to the comb trace") {
    const auto model = spectra::build_noise_model(reference_env, wb, 1000);
    const auto seq = sequences::PulseSequence::free_evolution(T);
    const auto grid = uniform_grid(T, 11);
    const auto exact = comb_trace(model, seq, grid);
    const auto mc = monte_carlo_trace(model, seq, grid, {4000, 1, std::nullopt});
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(mc.gamma[i] - exact.gamma[i]) < 5.0 / std::sqrt(2.0 * 4000));
}

TEST_CASE("decay rate, clipping and pairwise sums") {
    DecoherenceTrace tr;
    tr.grid = uniform_grid(1.0, 101);
    for (double t : tr.grid) tr.gamma.push_back(std::exp(-3.0 * t));
    for (double r : decay_rate(tr)) CHECK(r == doctest::Approx(3.0).epsilon(1e-3));
    tr.gamma[50] = 0.0;
    CHECK_THROWS_AS(decay_rate(tr), NumericalError);
    const auto c = clip_floor(tr);
    CHECK(c.gamma[50] == 1e-6);
    CHECK(c.gamma[10] == tr.gamma[10]);

    std::vector<double> v;
    long double ref = 0;
    for (int i = 0; i < 100001; ++i) {
        const double x = 1.0 / (1.0 + i) * (i % 3 ? 1 : -1);
        v.push_back(x);
        ref += x;
    }
    CHECK(pairwise_sum(v) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("method names") {
    CHECK(method_from_string(to_string(Method::monte_carlo)) == Method::monte_carlo);
    CHECK_THROWS_AS(method_from_string("bogus"), ConfigError);
}
