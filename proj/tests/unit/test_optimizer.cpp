#include <doctest.h>

#include <numbers>
#include <numeric>
#include <random>

#include "dephasim/errors.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/optimizer.hpp"
#include "dephasim/parallel.hpp"

using namespace dephasim;
using namespace dephasim::optimizer;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double T = 2.5e-3;
const spectra::EnvironmentSpec reference_env{4.0, 10.0, 2 * pi * 320, 0.0};
} // namespace

TEST_CASE("simplex projection") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(2e-4, 3e-4);
    for (int q = 0; q < 200; ++q) {
        std::vector<double> d(11);
        for (double& x : d) x = g(rng);
        project_to_simplex(d, T, 50e-6);
        CHECK(std::accumulate(d.begin(), d.end(), 0.0) == doctest::Approx(T).epsilon(1e-15));
        for (double x : d) CHECK(x >= 50e-6 * (1 - 1e-12));
    }
    // feasible input is left alone
    std::vector<double> ok{1e-3, 0.5e-3, 1e-3};
    project_to_simplex(ok, T, 50e-6);
    CHECK(ok[0] == doctest::Approx(1e-3));
    CHECK(ok[1] == doctest::Approx(0.5e-3));
    // slack is rescaled proportionally
    std::vector<double> s{150e-6, 250e-6, 50e-6};
    project_to_simplex(s, 600e-6, 50e-6);
    CHECK(s[0] == doctest::Approx(50e-6 + 100e-6 * 450.0 / 300.0));
    CHECK(s[2] == doctest::Approx(50e-6));
}

TEST_CASE("decode uses prefix sums") {
    const std::vector<double> d{0.5e-3, 1e-3, 1e-3};
    const auto seq = decode(d, T);
    REQUIRE(seq.size() == 2);
    CHECK(seq.pulse_times()[0] == doctest::Approx(0.5e-3));
    CHECK(seq.pulse_times()[1] == doctest::Approx(1.5e-3));
    CHECK(seq.label() == "NDD");
}

TEST_CASE("GA configuration feasibility") {
    GaConfig c;
    CHECK_NOTHROW(c.validate(T, 10));
    CHECK_THROWS_AS(c.validate(T, 60), ConfigError);
    CHECK_THROWS_AS(c.validate(T, 0), ConfigError);
    c.elitism_count = c.population_size;
    CHECK_THROWS_AS(c.validate(T, 3), ConfigError);
}

TEST_CASE("fitness is the protection of the comb trace") {
    const auto env = make_environment(reference_env, 2 * pi * 4, 1000);
    const auto seq = sequences::make_cpmg(T, 4);
    const auto tr = dynamics::comb_trace(env.comb, seq, dynamics::uniform_grid(T, 500));
    CHECK(fitness(env, seq) == doctest::Approx(measures::protection(tr, T)));
    FitnessSettings cont;
    cont.method = dynamics::Method::continuum;
    CHECK(fitness(env, seq, cont) == doctest::Approx(fitness(env, seq)).epsilon(0.01));
    FitnessSettings mc;
    mc.method = dynamics::Method::monte_carlo;
    CHECK_THROWS_AS(fitness(env, seq, mc), ConfigError);
}

TEST_CASE("small GA run is deterministic and never worse than its CPMG seed") {
    const auto env = make_environment(reference_env, 2 * pi * 4, 400);
    GaConfig c;
    c.population_size = 16;
    c.max_generations = 15;
    c.seed = 3;
    c.fitness.grid_points = 100;
    set_thread_count(1);
    const auto a = optimize_ndd(env, T, 3, c);
    set_thread_count(3);
    const auto b = optimize_ndd(env, T, 3, c);
    set_thread_count(0);
    CHECK(a.best_sequence == b.best_sequence);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.fitness_history == b.fitness_history);
    CHECK(a.best_fitness >= a.baseline);
    for (std::size_t i = 1; i < a.fitness_history.size(); ++i) CHECK(a.fitness_history[i] >= a.fitness_history[i - 1]);
    CHECK(a.best_sequence.min_gap() >= c.min_delay * (1 - 1e-9));
    CHECK(a.generations <= 15);
    c.seed = 4;
    CHECK_FALSE(optimize_ndd(env, T, 3, c).best_sequence == a.best_sequence);
}

TEST_CASE("pulse-count sweep columns") {
    const auto env = make_environment(reference_env, 2 * pi * 4, 400);
    const std::vector<std::size_t> counts{1, 4};
    SweepOptions o;
    o.optimize = false;
    o.grid_points = 100;
    const auto rows = sweep_pulse_count(env, T, counts, {}, o);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].n == 4);
    CHECK(rows[1].p_cpmg > 0.0);
    CHECK(rows[1].p_ndd == 0.0);
}
