#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "dephasim/errors.hpp"
#include "dephasim/noise.hpp"

using namespace dephasim;
using namespace dephasim::noise;

namespace {
constexpr double pi = std::numbers::pi;

std::shared_ptr<const spectra::NoiseModel> small_model(std::size_t m = 6) {
    const spectra::EnvironmentSpec env{4.0, 10.0, 2 * pi * 320, 0.0};
    return std::make_shared<const spectra::NoiseModel>(spectra::build_noise_model(env, 2 * pi * 300, m));
}
} // namespace

TEST_CASE("counter-based uniforms") {
    double sum = 0.0;
    constexpr int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double u = uniform01(42, k);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(uniform01(42, 7) == uniform01(42, 7));
    CHECK(uniform01(42, 7) != uniform01(43, 7));
}

TEST_CASE("realization seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t j = 0; j < 10000; ++j) seen.insert(realization_seed(5, j));
    CHECK(seen.size() == 10000);
    CHECK(realization_seed(5, 3) != realization_seed(6, 3));
}

TEST_CASE("phases are uniform on [-pi, pi)") {
    std::vector<double> p(50000);
    draw_phases(9, p);
    double c = 0, s = 0;
    for (double x : p) {
        REQUIRE(x >= -pi);
        REQUIRE(x < pi);
        c += std::cos(x);
        s += std::sin(x);
    }
    CHECK(std::abs(c / p.size()) < 0.02);
    CHECK(std::abs(s / p.size()) < 0.02);
}

TEST_CASE("xi is the cosine superposition") {
    const auto model = small_model();
    const auto r = sample_realization(model, 11);
    const double t = 0.37e-3;
    double sum = 0;
    for (std::size_t k = 1; k <= model->num_harmonics(); ++k)
        sum += model->amplitudes[k - 1] * std::cos(k * model->omega_b * t + r.phases[k - 1]);
    CHECK(evaluate_xi(r, t) == doctest::Approx(model->gamma * sum));
    CHECK_THROWS_AS(sample_realization(nullptr, 1), std::invalid_argument);
}

TEST_CASE("accumulated phase matches direct integration of xi f") {
    const auto model = small_model();
    const auto r = sample_realization(model, 21);
    const auto seq = sequences::make_cpmg(2.5e-3, 4);
    const std::vector<double> grid{0.0, 0.3e-3, 1.0e-3, 1.9e-3, 2.5e-3};
    const auto phi = accumulate_phase(r, seq, grid);
    // composite Simpson on each constant-sign segment
    auto direct = [&](double t) {
        std::vector<double> edges{0.0};
        for (double tj : seq.pulse_times())
            if (tj < t) edges.push_back(tj);
        edges.push_back(t);
        double acc = 0;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            const double a = edges[k], b = edges[k + 1];
            const int m = 2000;
            const double h = (b - a) / m;
            double s = evaluate_xi(r, a) + evaluate_xi(r, b);
            for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * evaluate_xi(r, a + i * h);
            acc += (k % 2 == 0 ? 1.0 : -1.0) * s * h / 3.0;
        }
        return acc;
    };
    CHECK(phi[0] == 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(phi[i] == doctest::Approx(direct(grid[i])).epsilon(1e-8));
    const std::vector<double> bad{0.0, 3e-3};
    CHECK_THROWS_AS(accumulate_phase(r, seq, bad), std::domain_error);
}

TEST_CASE("ensemble validation") {
    EnsembleSpec e;
    CHECK_NOTHROW(e.validate());
    e.num_realizations = 0;
    CHECK_THROWS_AS(e.validate(), ConfigError);
    e.num_realizations = 100;
    e.binning = Binning{10, 20};
    CHECK_THROWS_AS(e.validate(), ConfigError);
    e.binning = Binning{10, 10};
    CHECK_NOTHROW(e.validate());
}

TEST_CASE("phase trace export") {
    std::ostringstream os;
    const std::vector<std::vector<double>> traces{{0.0, 0.5}, {0.0, -0.25}};
    const std::vector<double> grid{0.0, 1e-3};
    write_phase_traces_csv(os, traces, grid, 3);
    CHECK(os.str() == "realization_index,t,phi\n3,0,0\n3,0.001,0.5\n4,0,0\n4,0.001,-0.25\n");
}
