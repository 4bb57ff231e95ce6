#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dephasim/cli.hpp"
#include "dephasim/io.hpp"

using namespace dephasim;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "dephasim");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("dephasim_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("analytic run prints the summary line") {
    const auto dir = scratch_dir("analytic");
    const auto r = invoke({"analytic", "--s", "4", "--points", "200", "--out", (dir / "t.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("analytic N=") != std::string::npos);
    CHECK(r.out.find(" P=") != std::string::npos);
    CHECK(r.out.find("runtime_s=") != std::string::npos);
    CHECK(r.out.find("seed=") != std::string::npos);
    CHECK(io::read_text(dir / "t.csv").rfind("t_s,gamma\n", 0) == 0);
}

TEST_CASE("exit codes") {
    const auto dir = scratch_dir("codes");
    auto r = invoke({"analytic", "--lambda", "-1", "--out", (dir / "x.csv").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("environment.lambda") != std::string::npos);
    CHECK(invoke({"measure", "--in", (dir / "missing.csv").string()}).code == 3);
    CHECK(invoke({"reproduce", "fig9"}).code == 1);
    CHECK(invoke({"bogus"}).code == 1);
    CHECK(invoke({"analytic", "--method", "quantum", "--out", (dir / "x.csv").string()}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file with flag overrides") {
    const auto dir = scratch_dir("config");
    const auto cfg = dir / "run.json";
    io::write_text(cfg, R"({"environment": {"s": 2.0, "lambda": 10, "omega_c_rad_s": 2010.6},
                            "sequence": {"family": "cpmg", "pulses": 4, "total_time_s": 2.5e-3},
                            "grid": {"num_points": 100}})");
    const auto r = invoke({"analytic", "--config", cfg.string(), "--s", "3.5", "--print-config"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["environment"]["s"] == 3.5);
    CHECK(doc["environment"]["lambda"] == 10);
    CHECK(doc["sequence"]["family"] == "cpmg");
    CHECK(doc["grid"]["num_points"] == 100);
    CHECK(doc["mode"] == "analytic");

    const auto hz = invoke({"analytic", "--omega-c-hz", "100", "--print-config"});
    CHECK(nlohmann::json::parse(hz.out)["environment"]["omega_c_rad_s"].get<double>() ==
          doctest::Approx(2 * 3.141592653589793 * 100));
}

TEST_CASE("simulate, smooth and measure chain") {
    const auto dir = scratch_dir("chain");
    const auto raw = dir / "raw.csv";
    auto r = invoke({"simulate", "--realizations", "200", "--seed", "4", "--harmonics", "1000", "--points", "250",
                     "--bins", "4", "--bin-size", "50", "--out", raw.string(), "--json", (dir / "raw.json").string()});
    REQUIRE(r.code == 0);
    CHECK(io::read_text(raw).rfind("t_s,gamma,stderr\n", 0) == 0);
    r = invoke({"smooth", "--in", raw.string(), "--out", (dir / "sm.csv").string(), "--report"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("N_before=") != std::string::npos);
    r = invoke({"measure", "--in", (dir / "sm.csv").string(), "--input-kind", "smoothed", "--out",
                (dir / "rep.json").string()});
    REQUIRE(r.code == 0);
    const auto rep = io::read_json(dir / "rep.json");
    CHECK(rep["blp_overestimated"] == false);
}

TEST_CASE("sweep over s writes a table") {
    const auto dir = scratch_dir("sweep");
    const auto r = invoke({"sweep", "--param", "s", "--from", "1", "--to", "2", "--step", "0.5", "--points", "100",
                           "--out", (dir / "s.csv").string()});
    REQUIRE(r.code == 0);
    const auto text = io::read_text(dir / "s.csv");
    CHECK(text.rfind("s,blp,protection\n1,", 0) == 0);
}

TEST_CASE("filter output") {
    const auto dir = scratch_dir("filter");
    const auto r = invoke({"filter", "--family", "udd", "--pulses", "5", "--filter-points", "50", "--out",
                           (dir / "f.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(io::read_text(dir / "f.csv").rfind("omega_rad_s,filter_power,noise_spectrum\n", 0) == 0);
    CHECK(r.out.find("overlap=") != std::string::npos);
}

TEST_CASE("figure reproduction is byte-identical across runs") {
    const auto a = scratch_dir("fig_a"), b = scratch_dir("fig_b");
    cli::FigureOptions o;
    o.out_dir = a;
    const auto pa = cli::reproduce_figure("fig2d", o);
    o.out_dir = b;
    const auto pb = cli::reproduce_figure("fig2d", o);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(io::read_text(pa[i]) == io::read_text(pb[i]));
    const auto manifest = io::read_json(a / "fig2d_manifest.json");
    CHECK(manifest["figure"] == "fig2d");
    CHECK(manifest["files"].size() == 1);
    CHECK(manifest.contains("version"));
}
