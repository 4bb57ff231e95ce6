// io.hpp: JSON and CSV formats for environments, sequences, traces and reports

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephasim/dynamics.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/optimizer.hpp"
#include "dephasim/postprocess.hpp"
#include "dephasim/sequences.hpp"
#include "dephasim/spectra.hpp"

namespace dephasim::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

// Keys: s, lambda, omega_c_rad_s, temperature_energy, gamma, omega_b_rad_s, M, amplitudes.
struct EnvironmentDocument {
    spectra::EnvironmentSpec env;
    std::optional<spectra::NoiseModel> model;
};

json environment_to_json(const spectra::EnvironmentSpec& env,
                         const spectra::NoiseModel* model = nullptr);
// Regenerates amplitudes from the environment when omega_b_rad_s and M are
// given without them.
EnvironmentDocument environment_from_json(const json& doc);

// {total_time_s, pulse_times_s, label}
json sequence_to_json(const sequences::PulseSequence& seq);
sequences::PulseSequence sequence_from_json(const json& doc);

// t_s,gamma[,stderr]
std::string trace_to_csv(const dynamics::DecoherenceTrace& trace);
dynamics::DecoherenceTrace trace_from_csv(const std::string& text);

struct TraceContext {
    const spectra::EnvironmentSpec* env{nullptr};
    const spectra::NoiseModel* model{nullptr};
    const sequences::PulseSequence* sequence{nullptr};
};
json trace_to_json(const dynamics::DecoherenceTrace& trace, const TraceContext& ctx = {});

json report_to_json(const measures::MeasureReport& report, const json& settings = json::object());

// t_s,<name1>,<name2>,... with one column per series
std::string series_to_csv(const std::vector<double>& grid, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns,
                          const std::string& grid_name = "t_s");

json optimization_to_json(const optimizer::OptimizationResult& result,
                          const optimizer::GaConfig& cfg);
std::string fitness_history_csv(const optimizer::OptimizationResult& result);

json ga_config_to_json(const optimizer::GaConfig& cfg);
void ga_config_from_json(const json& doc, optimizer::GaConfig& cfg);

json smoothing_config_to_json(const postprocess::SmoothingConfig& cfg);
postprocess::SmoothingConfig smoothing_config_from_json(const json& doc);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace dephasim::io
