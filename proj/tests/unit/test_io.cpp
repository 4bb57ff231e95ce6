#include <doctest.h>

#include <filesystem>
#include <numbers>

#include "dephasim/errors.hpp"
#include "dephasim/io.hpp"

using namespace dephasim;
using namespace dephasim::io;

namespace {
constexpr double pi = std::numbers::pi;
const spectra::EnvironmentSpec reference_env{4.0, 10.0, 2 * pi * 320, 0.0};
} // namespace

TEST_CASE("environment document round trip") {
    const auto model = spectra::build_noise_model(reference_env, 2 * pi * 4, 20);
    const auto doc = environment_from_json(environment_to_json(reference_env, &model));
    CHECK(doc.env.s == reference_env.s);
    CHECK(doc.env.omega_c == reference_env.omega_c);
    REQUIRE(doc.model);
    CHECK(doc.model->amplitudes == model.amplitudes);
    CHECK(doc.model->gamma == model.gamma);

    json partial = environment_to_json(reference_env);
    partial["omega_b_rad_s"] = 2 * pi * 4;
    partial["M"] = 20;
    CHECK(environment_from_json(partial).model->amplitudes == model.amplitudes);
    partial["amplitudes"] = std::vector<double>(3, 1.0);
    CHECK_THROWS_AS(environment_from_json(partial), ConfigError);

    json missing = environment_to_json(reference_env);
    missing.erase("lambda");
    CHECK_THROWS_WITH_AS(environment_from_json(missing), doctest::Contains("environment.lambda"), ConfigError);
    json bad = environment_to_json(reference_env);
    bad["lambda"] = -3.0;
    CHECK_THROWS_WITH_AS(environment_from_json(bad), doctest::Contains("lambda"), ConfigError);
}

TEST_CASE("sequence round trip") {
    const auto udd = sequences::make_udd(2.5e-3, 6);
    CHECK(sequence_from_json(sequence_to_json(udd)) == udd);
    CHECK_THROWS_AS(sequence_from_json(json::parse(R"({"pulse_times_s":[1e-3]})")), ConfigError);
}

TEST_CASE("trace CSV round trip is exact") {
    dynamics::DecoherenceTrace t;
    t.grid = dynamics::uniform_grid(1e-3, 33);
    for (double x : t.grid) t.gamma.push_back(std::exp(-x * 1234.5678));
    const auto back = trace_from_csv(trace_to_csv(t));
    CHECK(back.grid == t.grid);
    CHECK(back.gamma == t.gamma);
    CHECK_THROWS(trace_from_csv("t_s,gamma\n0,abc\n"));
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-6) == "1e-06");
    CHECK(std::stod(format_double(pi)) == pi);
}

TEST_CASE("GA and smoothing configs round trip") {
    optimizer::GaConfig g;
    g.population_size = 33;
    g.seed = 77;
    g.swap_rate = 0.25;
    optimizer::GaConfig h;
    ga_config_from_json(ga_config_to_json(g), h);
    CHECK(h.population_size == 33);
    CHECK(h.seed == 77);
    CHECK(h.swap_rate == 0.25);
    postprocess::SmoothingConfig s;
    s.passband_fraction = 0.2;
    s.taper = postprocess::Taper::rectangular;
    const auto s2 = smoothing_config_from_json(smoothing_config_to_json(s));
    CHECK(s2.passband_fraction == 0.2);
    CHECK(s2.taper == postprocess::Taper::rectangular);
}

TEST_CASE("file errors") {
    CHECK_THROWS_AS(read_text("/nonexistent/dir/file.json"), IoError);
    const auto p = std::filesystem::temp_directory_path() / "dephasim_bad.json";
    write_text(p, "{not json");
    CHECK_THROWS_AS(read_json(p), ConfigError);
    std::filesystem::remove(p);
}
