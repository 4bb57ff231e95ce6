// io.cpp

#include "dephasim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dephasim/errors.hpp"

namespace dephasim::io {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T field(const json& doc, const char* key, const char* scope) {
    if (!doc.contains(key)) throw ConfigError(std::string(scope) + "." + key + " is required");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(scope) + "." + key + " has the wrong type");
    }
}

template <typename T>
std::optional<T> optional_field(const json& doc, const char* key, const char* scope) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return field<T>(doc, key, scope);
}

} // namespace

json environment_to_json(const spectra::EnvironmentSpec& env, const spectra::NoiseModel* model) {
    json doc{{"s", env.s},
             {"lambda", env.lambda},
             {"omega_c_rad_s", env.omega_c},
             {"temperature_energy", env.temperature_energy}};
    if (model) {
        doc["gamma"] = model->gamma;
        doc["omega_b_rad_s"] = model->omega_b;
        doc["M"] = model->num_harmonics();
        doc["amplitudes"] = model->amplitudes;
    }
    return doc;
}

EnvironmentDocument environment_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("environment document must be a JSON object");
    EnvironmentDocument out;
    out.env.s = field<double>(doc, "s", "environment");
    out.env.lambda = field<double>(doc, "lambda", "environment");
    out.env.omega_c = field<double>(doc, "omega_c_rad_s", "environment");
    out.env.temperature_energy =
        optional_field<double>(doc, "temperature_energy", "environment").value_or(0.0);
    out.env.validate();

    const auto wb = optional_field<double>(doc, "omega_b_rad_s", "noise");
    const auto m = optional_field<std::size_t>(doc, "M", "noise");
    const auto amps = optional_field<std::vector<double>>(doc, "amplitudes", "noise");
    if (!wb && !m && !amps) return out;
    if (!wb || !m) throw ConfigError("noise.omega_b_rad_s and noise.M must be given together");
    if (amps) {
        if (amps->size() != *m) throw ConfigError("noise.amplitudes must have exactly M entries");
        spectra::NoiseModel model;
        model.omega_b = *wb;
        model.amplitudes = *amps;
        model.gamma = optional_field<double>(doc, "gamma", "noise").value_or(std::sqrt(2.0 * out.env.lambda));
        model.validate();
        out.model = std::move(model);
    } else {
        out.model = spectra::build_noise_model(out.env, *wb, *m);
        if (auto g = optional_field<double>(doc, "gamma", "noise")) out.model->gamma = *g;
    }
    return out;
}

json sequence_to_json(const sequences::PulseSequence& seq) {
    return json{{"total_time_s", seq.total_time()},
                {"pulse_times_s", seq.pulse_times()},
                {"label", seq.label()}};
}

sequences::PulseSequence sequence_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("sequence document must be a JSON object");
    return sequences::PulseSequence(
        field<double>(doc, "total_time_s", "sequence"),
        optional_field<std::vector<double>>(doc, "pulse_times_s", "sequence").value_or(std::vector<double>{}),
        optional_field<std::string>(doc, "label", "sequence").value_or(""));
}

std::string trace_to_csv(const dynamics::DecoherenceTrace& trace) {
    const bool with_err = trace.ensemble && !trace.ensemble->bin_stddev.empty();
    std::string out = with_err ? "t_s,gamma,stderr\n" : "t_s,gamma\n";
    for (std::size_t i = 0; i < trace.grid.size(); ++i) {
        out += format_double(trace.grid[i]);
        out += ',';
        out += format_double(trace.gamma[i]);
        if (with_err) {
            out += ',';
            out += format_double(trace.ensemble->bin_stddev[i]);
        }
        out += '\n';
    }
    return out;
}

dynamics::DecoherenceTrace trace_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_s,gamma", 0) != 0)
        throw ConfigError("trace CSV must start with header 't_s,gamma'");
    const bool with_err = line.find(",stderr") != std::string::npos;
    dynamics::DecoherenceTrace tr;
    tr.method = dynamics::Method::monte_carlo;
    std::vector<double> err;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("trace CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
            }
        }
        if (vals.size() < 2) throw ConfigError("trace CSV row " + std::to_string(row) + ": expected t_s,gamma");
        tr.grid.push_back(vals[0]);
        tr.gamma.push_back(vals[1]);
        if (with_err && vals.size() > 2) err.push_back(vals[2]);
    }
    if (with_err && err.size() == tr.grid.size()) {
        tr.ensemble = dynamics::EnsembleMeta{};
        tr.ensemble->bin_stddev = std::move(err);
    }
    return tr;
}

json trace_to_json(const dynamics::DecoherenceTrace& trace, const TraceContext& ctx) {
    json doc{{"method", dynamics::to_string(trace.method)},
             {"smoothed", trace.smoothed},
             {"t_s", trace.grid},
             {"gamma", trace.gamma}};
    if (trace.ensemble) {
        const auto& e = *trace.ensemble;
        doc["ensemble"] = {{"num_realizations", e.num_realizations},
                           {"master_seed", e.master_seed},
                           {"bin_stddev", e.bin_stddev},
                           {"sine_residual", e.sine_residual},
                           {"num_bins", e.bin_traces.size()}};
    }
    if (ctx.env) doc["environment"] = environment_to_json(*ctx.env);
    if (ctx.model) {
        doc["noise"] = {{"gamma", ctx.model->gamma},
                        {"omega_b_rad_s", ctx.model->omega_b},
                        {"M", ctx.model->num_harmonics()}};
    }
    if (ctx.sequence) doc["sequence"] = sequence_to_json(*ctx.sequence);
    return doc;
}

json report_to_json(const measures::MeasureReport& report, const json& settings) {
    json intervals = json::array();
    for (const auto& [a, b] : report.backflow_intervals) intervals.push_back({a, b});
    json doc{{"blp", report.blp},
             {"protection", report.protection},
             {"horizon_s", report.horizon},
             {"backflow_intervals", intervals},
             {"blp_overestimated", report.overestimated},
             {"settings", settings}};
    return doc;
}

std::string series_to_csv(const std::vector<double>& grid, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns, const std::string& grid_name) {
    if (names.size() != columns.size()) throw std::invalid_argument("series_to_csv: names/columns mismatch");
    std::string out = grid_name;
    for (const auto& n : names) out += "," + n;
    out += '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += format_double(grid[i]);
        for (const auto& c : columns) {
            out += ',';
            out += format_double(c.at(i));
        }
        out += '\n';
    }
    return out;
}

json ga_config_to_json(const optimizer::GaConfig& cfg) {
    return json{{"population_size", cfg.population_size},
                {"max_generations", cfg.max_generations},
                {"min_delay_s", cfg.min_delay},
                {"mutation_scale", cfg.mutation_scale},
                {"mutation_decay", cfg.mutation_decay},
                {"mutation_rate", cfg.mutation_rate},
                {"swap_rate", cfg.swap_rate},
                {"crossover_rate", cfg.crossover_rate},
                {"blend_alpha", cfg.blend_alpha},
                {"tournament_size", cfg.tournament_size},
                {"elitism_count", cfg.elitism_count},
                {"stall_generations", cfg.stall_generations},
                {"seed", cfg.seed},
                {"seed_cpmg", cfg.seed_cpmg},
                {"fitness_method", dynamics::to_string(cfg.fitness.method)},
                {"fitness_grid_points", cfg.fitness.grid_points},
                {"horizon_s", cfg.fitness.horizon}};
}

void ga_config_from_json(const json& doc, optimizer::GaConfig& cfg) {
    auto set = [&](const char* key, auto& target) {
        using T = std::remove_reference_t<decltype(target)>;
        if (auto v = optional_field<T>(doc, key, "ga")) target = *v;
    };
    set("population_size", cfg.population_size);
    set("max_generations", cfg.max_generations);
    set("min_delay_s", cfg.min_delay);
    set("mutation_scale", cfg.mutation_scale);
    set("mutation_decay", cfg.mutation_decay);
    set("mutation_rate", cfg.mutation_rate);
    set("swap_rate", cfg.swap_rate);
    set("crossover_rate", cfg.crossover_rate);
    set("blend_alpha", cfg.blend_alpha);
    set("tournament_size", cfg.tournament_size);
    set("elitism_count", cfg.elitism_count);
    set("stall_generations", cfg.stall_generations);
    set("seed", cfg.seed);
    set("seed_cpmg", cfg.seed_cpmg);
    set("fitness_grid_points", cfg.fitness.grid_points);
    set("horizon_s", cfg.fitness.horizon);
    if (auto m = optional_field<std::string>(doc, "fitness_method", "ga"))
        cfg.fitness.method = dynamics::method_from_string(*m);
}

json optimization_to_json(const optimizer::OptimizationResult& result, const optimizer::GaConfig& cfg) {
    return json{{"best_sequence", sequence_to_json(result.best_sequence)},
                {"best_fitness", result.best_fitness},
                {"baseline_sequence", sequence_to_json(result.baseline_sequence)},
                {"baseline_fitness", result.baseline},
                {"generations", result.generations},
                {"evaluations", result.evaluations},
                {"fitness_history", result.fitness_history},
                {"ga", ga_config_to_json(cfg)}};
}

std::string fitness_history_csv(const optimizer::OptimizationResult& result) {
    std::string out = "generation,best_fitness\n";
    for (std::size_t g = 0; g < result.fitness_history.size(); ++g)
        out += std::to_string(g) + "," + format_double(result.fitness_history[g]) + "\n";
    return out;
}

json smoothing_config_to_json(const postprocess::SmoothingConfig& cfg) {
    json doc{{"energy_fraction", cfg.energy_fraction},
             {"taper", postprocess::to_string(cfg.taper)},
             {"taper_width", cfg.taper_width},
             {"preserve_peak", cfg.preserve_peak}};
    doc["passband_fraction"] = cfg.passband_fraction ? json(*cfg.passband_fraction) : json(nullptr);
    return doc;
}

postprocess::SmoothingConfig smoothing_config_from_json(const json& doc) {
    postprocess::SmoothingConfig cfg;
    cfg.passband_fraction = optional_field<double>(doc, "passband_fraction", "smoothing");
    if (auto v = optional_field<double>(doc, "energy_fraction", "smoothing")) cfg.energy_fraction = *v;
    if (auto v = optional_field<std::string>(doc, "taper", "smoothing")) cfg.taper = postprocess::taper_from_string(*v);
    if (auto v = optional_field<double>(doc, "taper_width", "smoothing")) cfg.taper_width = *v;
    if (auto v = optional_field<bool>(doc, "preserve_peak", "smoothing")) cfg.preserve_peak = *v;
    cfg.validate();
    return cfg;
}

} // namespace dephasim::io
