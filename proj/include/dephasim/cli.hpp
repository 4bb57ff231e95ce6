// cli.hpp: batch front-end: run configuration, subcommand dispatch and
// figure-data reproduction

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephasim/noise.hpp"
#include "dephasim/optimizer.hpp"
#include "dephasim/postprocess.hpp"
#include "dephasim/sequences.hpp"
#include "dephasim/spectra.hpp"

namespace dephasim::cli {

enum class Mode { simulate, analytic, filter, measure, optimize, smooth, sweep, reproduce };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Either an explicit sequence file or a generated family.
struct SequenceSpec {
    std::string family{"free"};  // free | pdd | cpmg | udd
    std::size_t pulses{0};
    double total_time{2.5e-3};   // s
    std::optional<sequences::PulseSequence> explicit_sequence;

    sequences::PulseSequence build() const;
};

struct GridSpec {
    double t_max{2.5e-3};  // s; clipped to the sequence total time
    std::size_t num_points{500};
};

struct SweepSpec {
    std::string param{"s"};  // s | lambda | pulses
    double from{1.0};
    double to{6.0};
    double step{0.25};
    bool optimize{true};  // pulses sweep: run the GA for NDD columns
};

struct FilterSpec {
    double omega_max{0.0};  // rad/s; 0 means 10 omega_c
    std::size_t num_points{1000};
    double at_time{0.0};    // s; 0 means the sequence total time
};

struct OutputSpec {
    std::filesystem::path out;           // primary artifact (CSV or JSON by subcommand)
    std::filesystem::path json;          // optional JSON companion
    std::filesystem::path history;       // optimize: fitness history CSV
    std::filesystem::path entropy_csv;   // measure: entropy / trace-distance CSV
    std::filesystem::path phase_dump;    // simulate: per-realization phase traces
    std::size_t phase_dump_count{0};
    std::filesystem::path input;         // measure / smooth: input trace CSV
    std::string input_kind{"monte_carlo"};  // measure: monte_carlo | smoothed | analytic
    std::filesystem::path out_dir{"figures"};  // reproduce
    bool report{false};                  // smooth: print the pre/post report
};

struct RunConfig {
    Mode mode{Mode::analytic};
    spectra::EnvironmentSpec environment{4.0, 10.0, 2.0 * 3.14159265358979323846 * 320.0, 0.0};
    double omega_b{2.0 * 3.14159265358979323846 * 4.0};  // rad/s
    std::size_t harmonics{1000};
    bool strict{false};
    std::string method{"continuum"};          // analytic: continuum | comb
    std::string continuum_scale{"emulated"};  // emulated | bath
    noise::EnsembleSpec ensemble{1000, 1, std::nullopt};
    SequenceSpec sequence;
    GridSpec grid;
    optimizer::GaConfig ga;
    postprocess::SmoothingConfig smoothing;
    SweepSpec sweep;
    FilterSpec filter;
    std::optional<double> horizon;  // protection horizon, s; default grid end
    double entropy_epsilon{1.0};
    std::string figure;
    OutputSpec outputs;
    std::size_t threads{0};  // 0 keeps the default

    void validate() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
// Fields absent from doc keep the values already in cfg.
void apply_config_json(const nlohmann::json& doc, RunConfig& cfg);

// Executes cfg.mode, writes artifacts and prints a one-line summary to out.
// Returns 0 on success; exceptions propagate (see main_entry for exit codes).
int run(const RunConfig& cfg, std::ostream& out);

// Parses argv, runs, and maps ConfigError -> 1, NumericalError -> 2, IoError -> 3.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

// ---- figure datasets ----

struct FigureOptions {
    std::filesystem::path out_dir{"figures"};
    std::uint64_t seed{2019};
    std::size_t realizations{1000};
    optimizer::GaConfig ga{};
};

inline const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig2a", "fig2b", "fig2c", "fig2d",
                                              "fig3ab", "fig4a", "fig5"};
    return ids;
}

// Writes the CSV datasets for one figure plus <id>_manifest.json; returns the
// written paths.
std::vector<std::filesystem::path> reproduce_figure(const std::string& figure_id,
                                                    const FigureOptions& opts);

} // namespace dephasim::cli
