#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "dephasim/errors.hpp"
#include "dephasim/sequences.hpp"

using namespace dephasim;
using namespace dephasim::sequences;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double T = 2.5e-3;

// textbook piecewise form: sum over segments of sign (e^{-iwa} - e^{-iwb}) / (iw)
std::complex<double> piecewise_oracle(const PulseSequence& seq, double w, double t) {
    const std::complex<double> i{0.0, 1.0};
    std::complex<double> acc{0, 0};
    double a = 0, sign = 1;
    auto seg = [&](double b) {
        if (w == 0.0)
            acc += sign * (b - a);
        else
            acc += sign * (std::exp(-i * w * a) - std::exp(-i * w * b)) / (i * w);
    };
    for (double tj : seq.pulse_times()) {
        if (tj >= t) break;
        seg(tj);
        a = tj;
        sign = -sign;
    }
    seg(t);
    return acc;
}
} // namespace

TEST_CASE("standard families") {
    const auto cpmg = make_cpmg(T, 4);
    const auto pdd = make_pdd(T, 4);
    const auto udd = make_udd(T, 4);
    for (std::size_t j = 1; j <= 4; ++j) {
        CHECK(cpmg.pulse_times()[j - 1] == doctest::Approx((2.0 * j - 1) * T / 8));
        CHECK(pdd.pulse_times()[j - 1] == doctest::Approx(j * T / 5));
        const double sn = std::sin(pi * j / 10.0);
        CHECK(udd.pulse_times()[j - 1] == doctest::Approx(T * sn * sn));
    }
    CHECK(make_udd(T, 1).pulse_times()[0] == doctest::Approx(T / 2));
    CHECK_THROWS_AS(make_cpmg(T, 0), ConfigError);
    CHECK(PulseSequence::free_evolution(T).size() == 0);
}

TEST_CASE("sequence validation") {
    CHECK_THROWS_AS(PulseSequence(T, {1e-3, 0.5e-3}), ConfigError);
    CHECK_THROWS_AS(PulseSequence(T, {1e-3, 1e-3}), ConfigError);
    CHECK_THROWS_AS(PulseSequence(T, {0.0}), ConfigError);
    CHECK_THROWS_AS(PulseSequence(T, {T}), ConfigError);
    CHECK_THROWS_AS(PulseSequence(-1.0, {}), ConfigError);
}

TEST_CASE("delays round trip") {
    const auto udd = make_udd(T, 7);
    const auto d = udd.delays();
    REQUIRE(d.size() == 8);
    double sum = 0;
    for (double x : d) sum += x;
    CHECK(sum == doctest::Approx(T).epsilon(1e-14));
    const auto back = from_delays(d, "UDD");
    for (std::size_t j = 0; j < 7; ++j) CHECK(back.pulse_times()[j] == doctest::Approx(udd.pulse_times()[j]).epsilon(1e-14));
    CHECK(udd.min_gap() == doctest::Approx(*std::min_element(d.begin(), d.end())));
}

TEST_CASE("modulation is right-continuous") {
    const PulseSequence s(T, {1e-3, 2e-3});
    CHECK(modulation_at(s, 0.0) == 1);
    CHECK(modulation_at(s, 0.999e-3) == 1);
    CHECK(modulation_at(s, 1e-3) == -1);
    CHECK(modulation_at(s, 1.5e-3) == -1);
    CHECK(modulation_at(s, 2e-3) == 1);
    CHECK(s.pulses_before(1e-3) == 0);
    CHECK(s.pulses_before(1.0001e-3) == 1);
    CHECK_THROWS_AS(modulation_at(s, T * 1.1), std::domain_error);
}

TEST_CASE("filter function matches the piecewise exponential form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 50; ++q) {
        std::vector<double> tt;
        for (int j = 0; j < 12; ++j) tt.push_back(T * (0.01 + 0.98 * u(rng)));
        std::sort(tt.begin(), tt.end());
        const PulseSequence seq(T, tt);
        const double t = T * (0.1 + 0.9 * u(rng));
        for (double w : {1.0, 50.0, 2e3, 2e4, 1e5}) {
            const auto ref = piecewise_oracle(seq, w, t);
            const auto got = filter_function(seq, w, t);
            CHECK(std::abs(got - ref) <= 1e-9 * std::max(std::abs(ref), 1e-6));
        }
    }
}

TEST_CASE("filter function at and near zero frequency") {
    const PulseSequence s(T, {0.5e-3, 2e-3});
    // F(0,t) is the signed area of the modulation
    CHECK(filter_function(s, 0.0, T).real() == doctest::Approx(0.5e-3 - 1.5e-3 + 0.5e-3));
    CHECK(std::abs(filter_function(s, 1e-9, T) - filter_function(s, 0.0, T)) < 1e-15);
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(0.99e-4) == doctest::Approx(std::sin(0.99e-4) / 0.99e-4).epsilon(1e-15));
    CHECK(sinc(1.01e-4) == doctest::Approx(std::sin(1.01e-4) / 1.01e-4).epsilon(1e-15));
}

TEST_CASE("free evolution filter power") {
    const auto f = PulseSequence::free_evolution(T);
    for (double w : {10.0, 1e3, 3e4}) {
        const double t = 1.7e-3;
        CHECK(filter_power(f, w, t) == doctest::Approx(4 * std::pow(std::sin(w * t / 2), 2) / (w * w)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(filter_function(f, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(filter_function(f, -1.0, T), std::domain_error);
}

TEST_CASE("only pulses before t contribute") {
    const auto cpmg = make_cpmg(T, 6);
    const double t = 1.1e-3;
    std::vector<double> early;
    for (double tj : cpmg.pulse_times())
        if (tj < t) early.push_back(tj);
    const PulseSequence truncated(t, early);
    for (double w : {100.0, 5e3, 4e4})
        CHECK(std::abs(filter_function(cpmg, w, t) - filter_function(truncated, w, t)) < 1e-15);
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
    const auto udd = make_udd(T, 9);
    std::vector<double> grid(700);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = T * i / (grid.size() - 1);
    std::vector<std::complex<double>> out(grid.size());
    for (double w : {0.0, 25.0, 2e3, 6e4}) {
        filter_function_grid(udd, w, grid, out);
        CHECK(std::abs(out[0]) == 0.0);
        for (std::size_t i = 1; i < grid.size(); ++i)
            CHECK(std::abs(out[i] - filter_function(udd, w, grid[i])) < 1e-12 * T);
    }
    // nonuniform grid takes the general path
    std::vector<double> g2{0.1e-3, 0.2e-3, 0.7e-3, 2.4e-3};
    std::vector<std::complex<double>> o2(4);
    filter_function_grid(udd, 3e3, g2, o2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(o2[i] - filter_function(udd, 3e3, g2[i])) < 1e-15);
}

TEST_CASE("normalized form is stable") {
    const PulseSequence s(T, {1e-3}, "X");
    CHECK(s.normalized() == "X T=2.500000000e-03 n=1 [1.000000000e-03]");
    CHECK(s == PulseSequence(T, {1e-3}, "X"));
}
