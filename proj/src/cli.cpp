// cli.cpp

#include "dephasim/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/io.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/parallel.hpp"

namespace dephasim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

const std::vector<std::pair<Mode, const char*>> mode_names{
    {Mode::simulate, "simulate"}, {Mode::analytic, "analytic"}, {Mode::filter, "filter"},
    {Mode::measure, "measure"},   {Mode::optimize, "optimize"}, {Mode::smooth, "smooth"},
    {Mode::sweep, "sweep"},       {Mode::reproduce, "reproduce"}};

template <typename T>
void take(const json& doc, const char* key, T& dst, const char* scope) {
    if (!doc.contains(key) || doc.at(key).is_null()) return;
    try {
        dst = doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(scope) + "." + key + " has the wrong type");
    }
}

void take_path(const json& doc, const char* key, fs::path& dst) {
    std::string s;
    take(doc, key, s, "outputs");
    if (!s.empty()) dst = s;
}

std::string summary_line(Mode mode, double blp, double prot, double seconds, std::uint64_t seed) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s N=%.6g P=%.6g runtime_s=%.3f seed=%llu", to_string(mode).c_str(),
                  blp, prot, seconds, static_cast<unsigned long long>(seed));
    return buf;
}

double horizon_for(const RunConfig& cfg, const dynamics::DecoherenceTrace& trace) {
    return cfg.horizon.value_or(trace.grid.back());
}

spectra::NoiseModel noise_model(const RunConfig& cfg) {
    spectra::BuildOptions opts;
    opts.strict = cfg.strict;
    if (auto w = spectra::coverage_warning(cfg.environment, cfg.omega_b, cfg.harmonics); w && !cfg.strict)
        std::cerr << "warning: " << *w << '\n';
    return spectra::build_noise_model(cfg.environment, cfg.omega_b, cfg.harmonics, opts);
}

dynamics::ContinuumOptions continuum_options(const RunConfig& cfg) {
    dynamics::ContinuumOptions opts;
    if (cfg.continuum_scale == "emulated")
        opts.scale = dynamics::ContinuumScale::emulated(cfg.omega_b);
    else if (cfg.continuum_scale == "bath")
        opts.scale = dynamics::ContinuumScale::bath();
    else
        throw ConfigError("continuum_scale must be 'emulated' or 'bath'");
    return opts;
}

std::vector<double> run_grid(const RunConfig& cfg, const sequences::PulseSequence& seq) {
    return dynamics::uniform_grid(std::min(cfg.grid.t_max, seq.total_time()), cfg.grid.num_points);
}

dynamics::DecoherenceTrace analytic_trace(const RunConfig& cfg, const spectra::EnvironmentSpec& env,
                                          const sequences::PulseSequence& seq,
                                          std::span<const double> grid) {
    if (cfg.method == "continuum") return dynamics::continuum_trace(env, seq, grid, continuum_options(cfg));
    if (cfg.method == "comb") {
        RunConfig c = cfg;
        c.environment = env;
        return dynamics::comb_trace(noise_model(c), seq, grid);
    }
    throw ConfigError("method must be 'continuum' or 'comb' (got '" + cfg.method + "')");
}

fs::path require_out(const RunConfig& cfg) {
    if (cfg.outputs.out.empty()) throw ConfigError("outputs.out is required for " + to_string(cfg.mode));
    return cfg.outputs.out;
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
    fs::path out = p;
    out.replace_filename(p.stem().string() + suffix);
    return out;
}

json run_metadata(const RunConfig& cfg) {
    json doc = config_to_json(cfg);
    doc["version"] = DEPHASIM_VERSION;
    return doc;
}

int run_simulate(const RunConfig& cfg, std::ostream& out, double& blp, double& prot) {
    const auto seq = cfg.sequence.build();
    const auto model = noise_model(cfg);
    const auto grid = run_grid(cfg, seq);
    dynamics::MonteCarloOptions mopts;
    mopts.dump_count = cfg.outputs.phase_dump.empty() ? 0 : cfg.outputs.phase_dump_count;
    auto res = dynamics::monte_carlo(model, seq, grid, cfg.ensemble, mopts);
    const auto& raw = res.trace;
    io::write_text(require_out(cfg), io::trace_to_csv(raw));
    if (!cfg.outputs.phase_dump.empty()) {
        std::ostringstream ss;
        noise::write_phase_traces_csv(ss, res.dumped_phases, grid);
        io::write_text(cfg.outputs.phase_dump, ss.str());
    }
    const auto smoothed = postprocess::smooth(dynamics::clip_floor(raw), cfg.smoothing);
    const double h = horizon_for(cfg, raw);
    const auto rep_raw = measures::measure_report(raw, h);
    const auto rep_smooth = measures::measure_report(smoothed, h);
    if (!cfg.outputs.json.empty()) {
        json doc = run_metadata(cfg);
        doc["sequence_normalized"] = seq.normalized();
        doc["raw"] = io::report_to_json(rep_raw);
        doc["smoothed"] = io::report_to_json(rep_smooth);
        io::write_json(cfg.outputs.json, doc);
    }
    out << "raw_N=" << rep_raw.blp << " smoothed_N=" << rep_smooth.blp << '\n';
    blp = rep_smooth.blp;
    prot = rep_raw.protection;
    return 0;
}

int run_analytic(const RunConfig& cfg, double& blp, double& prot) {
    const auto seq = cfg.sequence.build();
    const auto grid = run_grid(cfg, seq);
    const auto trace = analytic_trace(cfg, cfg.environment, seq, grid);
    io::write_text(require_out(cfg), io::trace_to_csv(trace));
    const auto rep = measures::measure_report(trace, horizon_for(cfg, trace), cfg.entropy_epsilon);
    if (!cfg.outputs.entropy_csv.empty()) {
        io::write_text(cfg.outputs.entropy_csv,
                       io::series_to_csv(trace.grid, {"entropy_exact", "entropy_approx", "trace_distance"},
                                         {*rep.entropy,
                                          measures::entropy_trace(trace, cfg.entropy_epsilon,
                                                                  measures::EntropyForm::paper_approx),
                                          measures::trace_distance_pair(trace)}));
    }
    if (!cfg.outputs.json.empty()) {
        json doc = run_metadata(cfg);
        doc["sequence_normalized"] = seq.normalized();
        doc["report"] = io::report_to_json(rep);
        io::write_json(cfg.outputs.json, doc);
    }
    blp = rep.blp;
    prot = rep.protection;
    return 0;
}

int run_filter(const RunConfig& cfg, std::ostream& out, double& blp, double& prot) {
    const auto seq = cfg.sequence.build();
    const double t = cfg.filter.at_time > 0.0 ? cfg.filter.at_time : seq.total_time();
    const double wmax = cfg.filter.omega_max > 0.0 ? cfg.filter.omega_max : 10.0 * cfg.environment.omega_c;
    const std::size_t n = cfg.filter.num_points;
    if (n < 2) throw ConfigError("filter.num_points must be >= 2");
    const auto model = noise_model(cfg);
    std::vector<double> omega(n), power(n), density(n);
    for (std::size_t i = 0; i < n; ++i) {
        omega[i] = wmax * static_cast<double>(i) / static_cast<double>(n - 1);
        power[i] = sequences::filter_power(seq, omega[i], t);
        density[i] = omega[i] > 0.0 ? spectra::spectral_density(cfg.environment, omega[i]) *
                                          spectra::thermal_factor(cfg.environment, omega[i])
                                    : 0.0;
    }
    io::write_text(require_out(cfg), io::series_to_csv(omega, {"filter_power", "noise_spectrum"}, {power, density},
                                                         "omega_rad_s"));
    double overlap = 0.0;
    for (const auto& line : spectra::power_spectrum_weights(model))
        overlap += line.weight * sequences::filter_power(seq, line.omega, t);
    out << "overlap=" << overlap << " sequence=" << seq.normalized() << '\n';
    const auto grid = run_grid(cfg, seq);
    const auto rep = measures::measure_report(dynamics::comb_trace(model, seq, grid), cfg.horizon.value_or(grid.back()));
    blp = rep.blp;
    prot = rep.protection;
    return 0;
}

int run_measure(const RunConfig& cfg, double& blp, double& prot) {
    if (cfg.outputs.input.empty()) throw ConfigError("outputs.input (--in) is required for measure");
    auto trace = io::trace_from_csv(io::read_text(cfg.outputs.input));
    if (cfg.outputs.input_kind == "smoothed")
        trace.smoothed = true;
    else if (cfg.outputs.input_kind == "analytic")
        trace.method = dynamics::Method::continuum;
    else if (cfg.outputs.input_kind != "monte_carlo")
        throw ConfigError("outputs.input_kind must be monte_carlo, smoothed or analytic");
    const auto rep = measures::measure_report(trace, horizon_for(cfg, trace), cfg.entropy_epsilon);
    if (!cfg.outputs.out.empty()) io::write_json(cfg.outputs.out, io::report_to_json(rep));
    if (!cfg.outputs.entropy_csv.empty()) {
        io::write_text(cfg.outputs.entropy_csv,
                       io::series_to_csv(trace.grid, {"entropy_exact", "entropy_approx", "trace_distance"},
                                         {*rep.entropy,
                                          measures::entropy_trace(trace, cfg.entropy_epsilon,
                                                                  measures::EntropyForm::paper_approx),
                                          measures::trace_distance_pair(trace)}));
    }
    blp = rep.blp;
    prot = rep.protection;
    return 0;
}

int run_optimize(const RunConfig& cfg, std::ostream& out, double& blp, double& prot) {
    const auto out_path = require_out(cfg);
    const auto env = optimizer::make_environment(cfg.environment, cfg.omega_b, cfg.harmonics);
    const auto res = optimizer::optimize_ndd(env, cfg.sequence.total_time, cfg.sequence.pulses, cfg.ga);
    json doc = io::optimization_to_json(res, cfg.ga);
    doc["environment"] = io::environment_to_json(cfg.environment);
    doc["version"] = DEPHASIM_VERSION;
    io::write_json(out_path, doc);
    const fs::path hist = cfg.outputs.history.empty() ? sibling(out_path, "_history.csv") : cfg.outputs.history;
    io::write_text(hist, io::fitness_history_csv(res));
    out << res.best_sequence.normalized() << '\n';
    out << "baseline P=" << res.baseline << " generations=" << res.generations << '\n';
    const auto trace = optimizer::fitness_trace(env, res.best_sequence, cfg.ga.fitness);
    blp = measures::blp_measure(trace);
    prot = res.best_fitness;
    return 0;
}

int run_smooth(const RunConfig& cfg, std::ostream& out, double& blp, double& prot) {
    if (cfg.outputs.input.empty()) throw ConfigError("outputs.input (--in) is required for smooth");
    auto trace = io::trace_from_csv(io::read_text(cfg.outputs.input));
    trace.method = dynamics::Method::monte_carlo;
    const auto res = postprocess::smooth_with_report(dynamics::clip_floor(trace), cfg.smoothing);
    io::write_text(require_out(cfg), io::trace_to_csv(res.trace));
    const double before = measures::blp_measure(trace);
    const double after = measures::blp_measure(res.trace);
    if (cfg.outputs.report) {
        const auto& r = res.report;
        out << "N_before=" << before << " N_after=" << after << " passband_bins=" << r.passband_bins << '/'
            << r.spectrum_bins << " peak_bin=" << r.peak_bin << " removed_energy=" << r.removed_energy
            << " imag_residual=" << r.imag_residual << '\n';
    }
    if (!cfg.outputs.json.empty()) {
        json doc{{"config", io::smoothing_config_to_json(cfg.smoothing)},
                 {"blp_before", before},
                 {"blp_after", after},
                 {"spectrum_bins", res.report.spectrum_bins},
                 {"passband_bins", res.report.passband_bins},
                 {"peak_bin", res.report.peak_bin},
                 {"total_energy", res.report.total_energy},
                 {"passband_energy", res.report.passband_energy},
                 {"removed_energy", res.report.removed_energy},
                 {"imag_residual", res.report.imag_residual}};
        io::write_json(cfg.outputs.json, doc);
    }
    blp = after;
    prot = measures::protection(res.trace, horizon_for(cfg, res.trace));
    return 0;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, double& blp, double& prot) {
    const auto& sw = cfg.sweep;
    if (!(sw.step > 0.0) || sw.to < sw.from) throw ConfigError("sweep needs step > 0 and to >= from");
    std::vector<double> values;
    for (std::size_t i = 0;; ++i) {
        const double v = sw.from + static_cast<double>(i) * sw.step;
        if (v > sw.to + 1e-9 * sw.step) break;
        values.push_back(v);
    }
    std::string csv;
    blp = 0.0;
    prot = 0.0;
    if (sw.param == "pulses") {
        std::vector<std::size_t> counts;
        for (double v : values) {
            if (v < 1.0 || v != std::floor(v)) throw ConfigError("sweep over pulses needs integer values >= 1");
            counts.push_back(static_cast<std::size_t>(v));
        }
        const auto env = optimizer::make_environment(cfg.environment, cfg.omega_b, cfg.harmonics);
        optimizer::SweepOptions opts;
        opts.optimize = sw.optimize;
        opts.grid_points = cfg.grid.num_points;
        const auto rows = optimizer::sweep_pulse_count(env, cfg.sequence.total_time, counts, cfg.ga, opts);
        csv = "n,p_cpmg,p_udd,p_ndd,n_cpmg,n_udd,n_ndd\n";
        for (const auto& r : rows) {
            csv += std::to_string(r.n);
            for (double v : {r.p_cpmg, r.p_udd, r.p_ndd, r.n_cpmg, r.n_udd, r.n_ndd}) csv += ',' + io::format_double(v);
            csv += '\n';
            out << r.n << ' ' << r.p_cpmg << ' ' << r.n_cpmg << '\n';
            if (r.n_cpmg > blp) {
                blp = r.n_cpmg;
                prot = r.p_cpmg;
            }
        }
    } else if (sw.param == "s" || sw.param == "lambda") {
        const auto seq = cfg.sequence.build();
        const auto grid = run_grid(cfg, seq);
        csv = sw.param + ",blp,protection\n";
        for (double v : values) {
            auto env = cfg.environment;
            (sw.param == "s" ? env.s : env.lambda) = v;
            env.validate();
            const auto trace = analytic_trace(cfg, env, seq, grid);
            const double b = measures::blp_measure(trace);
            const double p = measures::protection(trace, horizon_for(cfg, trace));
            csv += io::format_double(v) + ',' + io::format_double(b) + ',' + io::format_double(p) + '\n';
            out << sw.param << '=' << v << " N=" << b << " P=" << p << '\n';
            if (b > blp) {
                blp = b;
                prot = p;
            }
        }
    } else {
        throw ConfigError("sweep.param must be 's', 'lambda' or 'pulses'");
    }
    io::write_text(require_out(cfg), csv);
    return 0;
}

int run_reproduce(const RunConfig& cfg, std::ostream& out) {
    if (cfg.figure.empty()) throw ConfigError("reproduce needs a figure id (" + std::string("fig2a..fig5") + ")");
    FigureOptions opts;
    opts.out_dir = cfg.outputs.out_dir;
    opts.seed = cfg.ensemble.master_seed;
    opts.realizations = cfg.ensemble.num_realizations;
    opts.ga = cfg.ga;
    const auto ids = cfg.figure == "all" ? figure_ids() : std::vector<std::string>{cfg.figure};
    for (const auto& id : ids)
        for (const auto& p : reproduce_figure(id, opts)) out << p.string() << '\n';
    return 0;
}

} // namespace

std::string to_string(Mode m) {
    for (const auto& [k, v] : mode_names)
        if (k == m) return v;
    return "unknown";
}

Mode mode_from_string(const std::string& s) {
    for (const auto& [k, v] : mode_names)
        if (s == v) return k;
    throw ConfigError("unknown mode '" + s + "'");
}

sequences::PulseSequence SequenceSpec::build() const {
    if (explicit_sequence) return *explicit_sequence;
    if (!(total_time > 0.0)) throw ConfigError("sequence.total_time_s must be > 0");
    if (family == "free") return sequences::PulseSequence::free_evolution(total_time);
    if (family == "pdd") return sequences::make_pdd(total_time, pulses);
    if (family == "cpmg") return sequences::make_cpmg(total_time, pulses);
    if (family == "udd") return sequences::make_udd(total_time, pulses);
    throw ConfigError("sequence.family must be free, pdd, cpmg or udd (got '" + family + "')");
}

void RunConfig::validate() const {
    environment.validate();
    if (!(omega_b > 0.0)) throw ConfigError("noise.omega_b_rad_s must be > 0");
    if (harmonics < 1) throw ConfigError("noise.M must be >= 1");
    if (!(grid.t_max > 0.0)) throw ConfigError("grid.t_max_s must be > 0");
    if (grid.num_points < 2) throw ConfigError("grid.num_points must be >= 2");
    if (horizon && !(*horizon > 0.0)) throw ConfigError("horizon_s must be > 0");
    if (!(entropy_epsilon > 0.0 && entropy_epsilon <= 1.0)) throw ConfigError("entropy_epsilon must lie in (0, 1]");
    switch (mode) {
    case Mode::simulate:
        ensemble.validate();
        [[fallthrough]];
    case Mode::analytic:
    case Mode::filter:
        (void)sequence.build();
        break;
    case Mode::optimize:
        ga.validate(sequence.total_time, sequence.pulses);
        break;
    case Mode::measure:
    case Mode::smooth:
        if (!outputs.input.empty() && !fs::exists(outputs.input))
            throw IoError("input file '" + outputs.input.string() + "' does not exist");
        break;
    case Mode::sweep:
    case Mode::reproduce:
        break;
    }
}

json config_to_json(const RunConfig& cfg) {
    json seq;
    if (cfg.sequence.explicit_sequence) {
        seq = io::sequence_to_json(*cfg.sequence.explicit_sequence);
    } else {
        seq = {{"family", cfg.sequence.family},
               {"pulses", cfg.sequence.pulses},
               {"total_time_s", cfg.sequence.total_time}};
    }
    json ens{{"num_realizations", cfg.ensemble.num_realizations}, {"master_seed", cfg.ensemble.master_seed}};
    if (cfg.ensemble.binning)
        ens["binning"] = {{"num_bins", cfg.ensemble.binning->num_bins}, {"bin_size", cfg.ensemble.binning->bin_size}};
    json doc{{"mode", to_string(cfg.mode)},
             {"environment", io::environment_to_json(cfg.environment)},
             {"noise", {{"omega_b_rad_s", cfg.omega_b}, {"M", cfg.harmonics}, {"strict", cfg.strict}}},
             {"ensemble", ens},
             {"sequence", seq},
             {"grid", {{"t_max_s", cfg.grid.t_max}, {"num_points", cfg.grid.num_points}}},
             {"method", cfg.method},
             {"continuum_scale", cfg.continuum_scale},
             {"ga", io::ga_config_to_json(cfg.ga)},
             {"smoothing", io::smoothing_config_to_json(cfg.smoothing)},
             {"sweep",
              {{"param", cfg.sweep.param},
               {"from", cfg.sweep.from},
               {"to", cfg.sweep.to},
               {"step", cfg.sweep.step},
               {"optimize", cfg.sweep.optimize}}},
             {"filter",
              {{"omega_max_rad_s", cfg.filter.omega_max},
               {"num_points", cfg.filter.num_points},
               {"at_time_s", cfg.filter.at_time}}},
             {"entropy_epsilon", cfg.entropy_epsilon}};
    if (cfg.horizon) doc["horizon_s"] = *cfg.horizon;
    if (!cfg.figure.empty()) doc["figure"] = cfg.figure;
    return doc;
}

void apply_config_json(const json& doc, RunConfig& cfg) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (doc.contains("mode")) cfg.mode = mode_from_string(doc.at("mode").get<std::string>());
    if (doc.contains("environment")) {
        const auto& e = doc.at("environment");
        take(e, "s", cfg.environment.s, "environment");
        take(e, "lambda", cfg.environment.lambda, "environment");
        take(e, "omega_c_rad_s", cfg.environment.omega_c, "environment");
        take(e, "temperature_energy", cfg.environment.temperature_energy, "environment");
        // an environment document may carry its own comb parameters
        take(e, "omega_b_rad_s", cfg.omega_b, "environment");
        take(e, "M", cfg.harmonics, "environment");
    }
    if (doc.contains("noise")) {
        const auto& n = doc.at("noise");
        take(n, "omega_b_rad_s", cfg.omega_b, "noise");
        take(n, "M", cfg.harmonics, "noise");
        take(n, "strict", cfg.strict, "noise");
    }
    if (doc.contains("ensemble")) {
        const auto& e = doc.at("ensemble");
        take(e, "num_realizations", cfg.ensemble.num_realizations, "ensemble");
        take(e, "master_seed", cfg.ensemble.master_seed, "ensemble");
        if (e.contains("binning") && !e.at("binning").is_null()) {
            noise::Binning b;
            take(e.at("binning"), "num_bins", b.num_bins, "ensemble.binning");
            take(e.at("binning"), "bin_size", b.bin_size, "ensemble.binning");
            cfg.ensemble.binning = b;
        }
    }
    if (doc.contains("sequence")) {
        const auto& s = doc.at("sequence");
        if (s.contains("pulse_times_s")) {
            cfg.sequence.explicit_sequence = io::sequence_from_json(s);
            cfg.sequence.total_time = cfg.sequence.explicit_sequence->total_time();
            cfg.sequence.pulses = cfg.sequence.explicit_sequence->size();
        } else {
            take(s, "family", cfg.sequence.family, "sequence");
            take(s, "pulses", cfg.sequence.pulses, "sequence");
            take(s, "total_time_s", cfg.sequence.total_time, "sequence");
        }
    }
    if (doc.contains("grid")) {
        take(doc.at("grid"), "t_max_s", cfg.grid.t_max, "grid");
        take(doc.at("grid"), "num_points", cfg.grid.num_points, "grid");
    }
    take(doc, "method", cfg.method, "config");
    take(doc, "continuum_scale", cfg.continuum_scale, "config");
    if (doc.contains("ga")) io::ga_config_from_json(doc.at("ga"), cfg.ga);
    if (doc.contains("smoothing")) cfg.smoothing = io::smoothing_config_from_json(doc.at("smoothing"));
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        take(s, "param", cfg.sweep.param, "sweep");
        take(s, "from", cfg.sweep.from, "sweep");
        take(s, "to", cfg.sweep.to, "sweep");
        take(s, "step", cfg.sweep.step, "sweep");
        take(s, "optimize", cfg.sweep.optimize, "sweep");
    }
    if (doc.contains("filter")) {
        const auto& f = doc.at("filter");
        take(f, "omega_max_rad_s", cfg.filter.omega_max, "filter");
        take(f, "num_points", cfg.filter.num_points, "filter");
        take(f, "at_time_s", cfg.filter.at_time, "filter");
    }
    if (doc.contains("horizon_s")) cfg.horizon = doc.at("horizon_s").get<double>();
    take(doc, "entropy_epsilon", cfg.entropy_epsilon, "config");
    take(doc, "figure", cfg.figure, "config");
    take(doc, "threads", cfg.threads, "config");
    if (doc.contains("outputs")) {
        const auto& o = doc.at("outputs");
        take_path(o, "out", cfg.outputs.out);
        take_path(o, "json", cfg.outputs.json);
        take_path(o, "history", cfg.outputs.history);
        take_path(o, "entropy_csv", cfg.outputs.entropy_csv);
        take_path(o, "phase_dump", cfg.outputs.phase_dump);
        take(o, "phase_dump_count", cfg.outputs.phase_dump_count, "outputs");
        take_path(o, "input", cfg.outputs.input);
        take(o, "input_kind", cfg.outputs.input_kind, "outputs");
        take_path(o, "out_dir", cfg.outputs.out_dir);
        take(o, "report", cfg.outputs.report, "outputs");
    }
}

int run(const RunConfig& cfg, std::ostream& out) {
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    double blp = 0.0, prot = 0.0;
    switch (cfg.mode) {
    case Mode::simulate: run_simulate(cfg, out, blp, prot); break;
    case Mode::analytic: run_analytic(cfg, blp, prot); break;
    case Mode::filter: run_filter(cfg, out, blp, prot); break;
    case Mode::measure: run_measure(cfg, blp, prot); break;
    case Mode::optimize: run_optimize(cfg, out, blp, prot); break;
    case Mode::smooth: run_smooth(cfg, out, blp, prot); break;
    case Mode::sweep: run_sweep(cfg, out, blp, prot); break;
    case Mode::reproduce: run_reproduce(cfg, out); break;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::uint64_t seed = cfg.mode == Mode::optimize ? cfg.ga.seed : cfg.ensemble.master_seed;
    out << summary_line(cfg.mode, blp, prot, secs, seed) << '\n';
    return 0;
}

namespace {

const char* csv_help = R"(CSV columns:
  trace (simulate, analytic, smooth): t_s,gamma[,stderr]
  entropy (--entropy-out):            t_s,entropy_exact,entropy_approx,trace_distance
  filter:                             omega_rad_s,filter_power,noise_spectrum
  sweep --param s|lambda:             <param>,blp,protection
  sweep --param pulses:               n,p_cpmg,p_udd,p_ndd,n_cpmg,n_udd,n_ndd
  optimize history (--history):       generation,best_fitness
  phase dump (--dump-phases):         realization_index,t,phi
Frequencies are rad/s unless the flag ends in -hz; times are seconds.)";

struct Flags {
    std::optional<std::string> config, env, sequence_file;
    std::optional<double> s, lambda, omega_c, omega_c_hz, temperature, omega_b, omega_b_hz;
    std::optional<std::size_t> harmonics;
    bool strict{false};
    std::optional<std::size_t> realizations, bins, bin_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> family;
    std::optional<std::size_t> pulses;
    std::optional<double> total_time, t_max;
    std::optional<std::size_t> points;
    std::optional<std::string> method, scale;
    std::optional<std::size_t> population, generations, tournament, stall;
    std::optional<double> min_delay, mutation_scale, mutation_rate, mutation_decay;
    std::optional<std::string> fitness_method;
    std::optional<double> passband, energy_fraction;
    std::optional<std::string> taper;
    std::optional<std::string> param;
    std::optional<double> from, to, step;
    bool no_optimize{false};
    std::optional<double> omega_max, omega_max_hz, at_time;
    std::optional<std::size_t> filter_points;
    std::optional<double> horizon, epsilon;
    std::optional<std::string> input_kind;
    std::optional<std::string> out, json_out, history, entropy_out, dump_phases, in, out_dir;
    std::optional<std::size_t> dump_count;
    bool report{false};
    bool print_config{false};
    std::optional<std::size_t> threads;
    std::string figure;
};

void add_options(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config, "JSON run configuration; flags override its fields");
    app.add_option("--env", f.env, "environment JSON document");
    app.add_option("--s", f.s, "ohmicity exponent");
    app.add_option("--lambda", f.lambda, "coupling strength");
    app.add_option("--omega-c-rad-s", f.omega_c, "cutoff frequency (rad/s)");
    app.add_option("--omega-c-hz", f.omega_c_hz, "cutoff frequency (Hz)");
    app.add_option("--temperature-energy", f.temperature, "k_B T in units of hbar rad/s; 0 is zero temperature");
    app.add_option("--omega-b-rad-s", f.omega_b, "base comb frequency (rad/s)");
    app.add_option("--omega-b-hz", f.omega_b_hz, "base comb frequency (Hz)");
    app.add_option("--harmonics", f.harmonics, "number of comb harmonics M");
    app.add_flag("--strict", f.strict, "spectral coverage shortfall is an error");
    app.add_option("--realizations", f.realizations, "Monte Carlo ensemble size N");
    app.add_option("--seed", f.seed, "master seed (ensemble and GA)");
    app.add_option("--bins", f.bins, "number of error-bar bins");
    app.add_option("--bin-size", f.bin_size, "realizations per bin");
    app.add_option("--sequence", f.sequence_file, "sequence JSON file");
    app.add_option("--family", f.family, "generated sequence: free, pdd, cpmg, udd");
    app.add_option("--pulses", f.pulses, "pulse count n");
    app.add_option("--total-time-s,--total-time", f.total_time, "sequence duration T (s)");
    app.add_option("--t-max-s", f.t_max, "grid end (s)");
    app.add_option("--points", f.points, "grid points");
    app.add_option("--method", f.method, "analytic route: continuum or comb");
    app.add_option("--continuum-scale", f.scale, "continuum normalization: emulated or bath");
    app.add_option("--population", f.population, "GA population size");
    app.add_option("--generations", f.generations, "GA generation cap");
    app.add_option("--tournament", f.tournament, "GA tournament size");
    app.add_option("--stall", f.stall, "GA stall generations before stopping");
    app.add_option("--min-delay-s", f.min_delay, "minimum inter-pulse delay (s)");
    app.add_option("--mutation-scale", f.mutation_scale, "GA mutation sigma as a fraction of T");
    app.add_option("--mutation-rate", f.mutation_rate, "GA per-gene mutation probability");
    app.add_option("--mutation-decay", f.mutation_decay, "GA per-generation sigma decay");
    app.add_option("--fitness-method", f.fitness_method, "GA fitness route: comb or continuum");
    app.add_option("--passband-fraction", f.passband, "fixed smoothing passband as a fraction of the spectrum");
    app.add_option("--energy-fraction", f.energy_fraction, "automatic passband energy fraction");
    app.add_option("--taper", f.taper, "raised_cosine or rectangular");
    app.add_option("--param", f.param, "sweep parameter: s, lambda, pulses");
    app.add_option("--from", f.from, "sweep start");
    app.add_option("--to", f.to, "sweep end");
    app.add_option("--step", f.step, "sweep step");
    app.add_flag("--no-optimize", f.no_optimize, "pulse sweep without NDD columns");
    app.add_option("--omega-max-rad-s", f.omega_max, "filter grid end (rad/s)");
    app.add_option("--omega-max-hz", f.omega_max_hz, "filter grid end (Hz)");
    app.add_option("--filter-points", f.filter_points, "filter grid points");
    app.add_option("--at-time-s", f.at_time, "filter evaluation time (s)");
    app.add_option("--horizon-s", f.horizon, "protection horizon (s)");
    app.add_option("--epsilon", f.epsilon, "purity factor for entropy");
    app.add_option("--out", f.out, "primary output file");
    app.add_option("--json", f.json_out, "JSON companion report");
    app.add_option("--history", f.history, "fitness history CSV (optimize)");
    app.add_option("--entropy-out", f.entropy_out, "entropy CSV");
    app.add_option("--dump-phases", f.dump_phases, "per-realization phase CSV (simulate)");
    app.add_option("--dump-count", f.dump_count, "realizations to dump");
    app.add_option("--in", f.in, "input trace CSV (measure, smooth)");
    app.add_option("--input-kind", f.input_kind, "measure input: monte_carlo, smoothed or analytic");
    app.add_option("--out-dir", f.out_dir, "figure output directory (reproduce)");
    app.add_flag("--report", f.report, "print the smoothing report");
    app.add_flag("--print-config", f.print_config, "print the effective configuration as JSON and exit");
    app.add_option("--threads", f.threads, "worker thread cap (also DEPHASIM_THREADS)");
}

template <typename T, typename U>
void set_if(const std::optional<T>& v, U& dst) {
    if (v) dst = *v;
}

void apply_flags(const Flags& f, RunConfig& cfg) {
    if (f.env) {
        const auto doc = io::environment_from_json(io::read_json(*f.env));
        cfg.environment = doc.env;
        if (doc.model) {
            cfg.omega_b = doc.model->omega_b;
            cfg.harmonics = doc.model->num_harmonics();
        }
    }
    set_if(f.s, cfg.environment.s);
    set_if(f.lambda, cfg.environment.lambda);
    set_if(f.omega_c, cfg.environment.omega_c);
    if (f.omega_c_hz) cfg.environment.omega_c = two_pi * *f.omega_c_hz;
    set_if(f.temperature, cfg.environment.temperature_energy);
    set_if(f.omega_b, cfg.omega_b);
    if (f.omega_b_hz) cfg.omega_b = two_pi * *f.omega_b_hz;
    set_if(f.harmonics, cfg.harmonics);
    if (f.strict) cfg.strict = true;
    set_if(f.realizations, cfg.ensemble.num_realizations);
    if (f.seed) {
        cfg.ensemble.master_seed = *f.seed;
        cfg.ga.seed = *f.seed;
    }
    if (f.bins || f.bin_size) {
        noise::Binning b = cfg.ensemble.binning.value_or(noise::Binning{});
        set_if(f.bins, b.num_bins);
        set_if(f.bin_size, b.bin_size);
        cfg.ensemble.binning = b;
    }
    if (f.sequence_file) {
        cfg.sequence.explicit_sequence = io::sequence_from_json(io::read_json(*f.sequence_file));
        cfg.sequence.total_time = cfg.sequence.explicit_sequence->total_time();
        cfg.sequence.pulses = cfg.sequence.explicit_sequence->size();
    }
    if (f.family || f.pulses || f.total_time) cfg.sequence.explicit_sequence.reset();
    set_if(f.family, cfg.sequence.family);
    set_if(f.pulses, cfg.sequence.pulses);
    if (f.total_time) {
        cfg.sequence.total_time = *f.total_time;
        if (!f.t_max) cfg.grid.t_max = *f.total_time;
    }
    set_if(f.t_max, cfg.grid.t_max);
    set_if(f.points, cfg.grid.num_points);
    set_if(f.method, cfg.method);
    set_if(f.scale, cfg.continuum_scale);
    set_if(f.population, cfg.ga.population_size);
    set_if(f.generations, cfg.ga.max_generations);
    set_if(f.tournament, cfg.ga.tournament_size);
    set_if(f.stall, cfg.ga.stall_generations);
    set_if(f.min_delay, cfg.ga.min_delay);
    set_if(f.mutation_scale, cfg.ga.mutation_scale);
    set_if(f.mutation_rate, cfg.ga.mutation_rate);
    set_if(f.mutation_decay, cfg.ga.mutation_decay);
    if (f.fitness_method) cfg.ga.fitness.method = dynamics::method_from_string(*f.fitness_method);
    if (f.passband) cfg.smoothing.passband_fraction = *f.passband;
    set_if(f.energy_fraction, cfg.smoothing.energy_fraction);
    if (f.taper) cfg.smoothing.taper = postprocess::taper_from_string(*f.taper);
    set_if(f.param, cfg.sweep.param);
    set_if(f.from, cfg.sweep.from);
    set_if(f.to, cfg.sweep.to);
    set_if(f.step, cfg.sweep.step);
    if (f.no_optimize) cfg.sweep.optimize = false;
    set_if(f.omega_max, cfg.filter.omega_max);
    if (f.omega_max_hz) cfg.filter.omega_max = two_pi * *f.omega_max_hz;
    set_if(f.filter_points, cfg.filter.num_points);
    set_if(f.at_time, cfg.filter.at_time);
    if (f.horizon) cfg.horizon = *f.horizon;
    set_if(f.epsilon, cfg.entropy_epsilon);
    if (f.out) cfg.outputs.out = *f.out;
    if (f.json_out) cfg.outputs.json = *f.json_out;
    if (f.history) cfg.outputs.history = *f.history;
    if (f.entropy_out) cfg.outputs.entropy_csv = *f.entropy_out;
    if (f.dump_phases) {
        cfg.outputs.phase_dump = *f.dump_phases;
        if (cfg.outputs.phase_dump_count == 0) cfg.outputs.phase_dump_count = 10;
    }
    set_if(f.dump_count, cfg.outputs.phase_dump_count);
    if (f.in) cfg.outputs.input = *f.in;
    set_if(f.input_kind, cfg.outputs.input_kind);
    if (f.out_dir) cfg.outputs.out_dir = *f.out_dir;
    if (f.report) cfg.outputs.report = true;
    set_if(f.threads, cfg.threads);
    if (!f.figure.empty()) cfg.figure = f.figure;
}

} // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dephasim: emulated non-Markovian dephasing, BLP measure and decoupling optimizer"};
    app.footer(csv_help);
    app.require_subcommand(1);
    Flags flags;
    add_options(app, flags);
    std::vector<CLI::App*> subs;
    for (const auto& [mode, name] : mode_names) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
        sub->fallthrough();
        if (mode == Mode::reproduce)
            sub->add_option("figure", flags.figure, "fig2a, fig2b, fig2c, fig2d, fig3ab, fig4a, fig5 or all");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) cfg.mode = mode_names[i].first;
        const Mode chosen = cfg.mode;
        if (flags.config) apply_config_json(io::read_json(*flags.config), cfg);
        cfg.mode = chosen;
        apply_flags(flags, cfg);
        if (flags.print_config) {
            out << config_to_json(cfg).dump(2) << '\n';
            return 0;
        }
        return run(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace dephasim::cli
