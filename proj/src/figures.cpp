// figures.cpp: per-figure CSV datasets and manifests

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>

#include "dephasim/cli.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/io.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/optimizer.hpp"
#include "dephasim/postprocess.hpp"

namespace dephasim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double omega_c = two_pi * 320.0;
constexpr double omega_b = two_pi * 4.0;
constexpr std::size_t harmonics = 1000;
constexpr double total_time = 2.5e-3;
constexpr std::size_t grid_points = 500;
constexpr double lambda0 = 10.0;

spectra::EnvironmentSpec env_for(double s, double lambda = lambda0) {
    return {s, lambda, omega_c, 0.0};
}

dynamics::ContinuumOptions continuum_opts() {
    return {dynamics::ContinuumScale::emulated(omega_b), 1e-8};
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class Writer {
public:
    Writer(std::string id, const FigureOptions& opts) : id_(std::move(id)), opts_(opts) {
        manifest_ = {{"figure", id_},
                     {"version", DEPHASIM_VERSION},
                     {"environment_defaults",
                      {{"lambda", lambda0},
                       {"omega_c_rad_s", omega_c},
                       {"temperature_energy", 0.0},
                       {"omega_b_rad_s", omega_b},
                       {"M", harmonics}}},
                     {"total_time_s", total_time},
                     {"grid_points", grid_points},
                     {"continuum_scale", "emulated"},
                     {"files", json::array()}};
    }

    json& manifest() { return manifest_; }

    void csv(const std::string& name, const std::string& text, const std::string& columns_note = {}) {
        const fs::path p = opts_.out_dir / (id_ + "_" + name + ".csv");
        io::write_text(p, text);
        json entry{{"file", p.filename().string()}, {"fnv1a64", hex64(fnv1a(text))}};
        if (!columns_note.empty()) entry["note"] = columns_note;
        manifest_["files"].push_back(entry);
        written_.push_back(p);
    }

    std::vector<fs::path> finish() {
        const fs::path p = opts_.out_dir / (id_ + "_manifest.json");
        io::write_json(p, manifest_);
        written_.push_back(p);
        return written_;
    }

private:
    std::string id_;
    const FigureOptions& opts_;
    json manifest_;
    std::vector<fs::path> written_;
};

noise::EnsembleSpec ensemble(const FigureOptions& opts) {
    noise::EnsembleSpec e;
    e.num_realizations = opts.realizations;
    e.master_seed = opts.seed;
    if (opts.realizations >= 20) e.binning = noise::Binning{10, opts.realizations / 10};
    return e;
}

json ensemble_json(const noise::EnsembleSpec& e) {
    json doc{{"num_realizations", e.num_realizations}, {"master_seed", e.master_seed}};
    if (e.binning) doc["binning"] = {{"num_bins", e.binning->num_bins}, {"bin_size", e.binning->bin_size}};
    return doc;
}

struct MonteCarloSet {
    dynamics::DecoherenceTrace raw;
    dynamics::DecoherenceTrace smoothed;
};

MonteCarloSet mc_set(const spectra::EnvironmentSpec& env, const sequences::PulseSequence& seq,
                     std::span<const double> grid, const noise::EnsembleSpec& ens) {
    const auto model = spectra::build_noise_model(env, omega_b, harmonics);
    MonteCarloSet out;
    out.raw = dynamics::monte_carlo_trace(model, seq, grid, ens);
    out.smoothed = postprocess::smooth(dynamics::clip_floor(out.raw));
    return out;
}

std::vector<double> stddev_or_zero(const dynamics::DecoherenceTrace& t) {
    if (t.ensemble && !t.ensemble->bin_stddev.empty()) return t.ensemble->bin_stddev;
    return std::vector<double>(t.grid.size(), 0.0);
}

std::vector<double> sweep_values(double from, double to, double step) {
    std::vector<double> v;
    for (std::size_t i = 0;; ++i) {
        const double x = from + static_cast<double>(i) * step;
        if (x > to + 1e-9) break;
        v.push_back(x);
    }
    return v;
}

std::vector<fs::path> fig2a(const FigureOptions& opts) {
    Writer w("fig2a", opts);
    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    const auto seq = sequences::PulseSequence::free_evolution(total_time);
    const auto ens = ensemble(opts);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    json summary = json::object();
    for (double s : {1.0, 4.0}) {
        const auto env = env_for(s);
        const auto cont = dynamics::continuum_trace(env, seq, grid, continuum_opts());
        const auto mc = mc_set(env, seq, grid, ens);
        const std::string tag = s == 1.0 ? "s1" : "s4";
        for (auto n : {"continuum", "mc_raw", "mc_stddev", "mc_smoothed"}) names.push_back(std::string(n) + "_" + tag);
        cols.push_back(cont.gamma);
        cols.push_back(mc.raw.gamma);
        cols.push_back(stddev_or_zero(mc.raw));
        cols.push_back(mc.smoothed.gamma);
        const auto iv = measures::backflow_intervals(cont);
        summary[tag] = {{"blp_continuum", measures::blp_measure(cont)},
                        {"blp_mc_raw", measures::blp_measure(mc.raw)},
                        {"blp_mc_smoothed", measures::blp_measure(mc.smoothed)},
                        {"backflow_onset_s", iv.empty() ? json(nullptr) : json(iv.front().first)}};
    }
    w.csv("decoherence", io::series_to_csv(grid, names, cols));
    w.manifest()["ensemble"] = ensemble_json(ens);
    w.manifest()["s_values"] = {1.0, 4.0};
    w.manifest()["summary"] = summary;
    return w.finish();
}

std::string blp_table(const std::string& param, const std::vector<double>& values, const FigureOptions& opts,
                      bool vary_s) {
    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    const auto seq = sequences::PulseSequence::free_evolution(total_time);
    const auto ens = ensemble(opts);
    std::string csv = param + ",blp_continuum,blp_comb,blp_mc_raw,blp_mc_smoothed,blp_mc_smoothed_bin_stddev\n";
    for (double v : values) {
        const auto env = vary_s ? env_for(v) : env_for(4.0, v);
        const auto model = spectra::build_noise_model(env, omega_b, harmonics);
        const double b_cont = measures::blp_measure(dynamics::continuum_trace(env, seq, grid, continuum_opts()));
        const double b_comb = measures::blp_measure(dynamics::comb_trace(model, seq, grid));
        const auto mc = dynamics::monte_carlo_trace(model, seq, grid, ens);
        const double b_raw = measures::blp_measure(mc);
        const double b_smooth = measures::blp_measure(postprocess::smooth(dynamics::clip_floor(mc)));
        // spread of the smoothed measure over the ensemble bins
        double spread = 0.0;
        if (mc.ensemble && mc.ensemble->bin_traces.size() >= 2) {
            std::vector<double> per_bin;
            for (const auto& b : mc.ensemble->bin_traces) {
                dynamics::DecoherenceTrace t{std::vector<double>(grid.begin(), grid.end()), b, dynamics::Method::monte_carlo, false, std::nullopt};
                per_bin.push_back(measures::blp_measure(postprocess::smooth(dynamics::clip_floor(t))));
            }
            double mean = 0.0;
            for (double x : per_bin) mean += x;
            mean /= static_cast<double>(per_bin.size());
            for (double x : per_bin) spread += (x - mean) * (x - mean);
            spread = std::sqrt(spread / static_cast<double>(per_bin.size() - 1));
        }
        csv += io::format_double(v);
        for (double x : {b_cont, b_comb, b_raw, b_smooth, spread}) csv += ',' + io::format_double(x);
        csv += '\n';
    }
    return csv;
}

std::vector<fs::path> fig2b(const FigureOptions& opts) {
    Writer w("fig2b", opts);
    const auto values = sweep_values(1.0, 6.0, 0.25);
    w.csv("blp_vs_s", blp_table("s", values, opts, true));
    w.manifest()["ensemble"] = ensemble_json(ensemble(opts));
    w.manifest()["sweep"] = {{"param", "s"}, {"from", 1.0}, {"to", 6.0}, {"step", 0.25}};
    return w.finish();
}

std::vector<fs::path> fig2c(const FigureOptions& opts) {
    Writer w("fig2c", opts);
    const auto values = sweep_values(10.0, 100.0, 10.0);
    w.csv("blp_vs_lambda", blp_table("lambda", values, opts, false));
    w.manifest()["ensemble"] = ensemble_json(ensemble(opts));
    w.manifest()["s"] = 4.0;
    w.manifest()["sweep"] = {{"param", "lambda"}, {"from", 10.0}, {"to", 100.0}, {"step", 10.0}};
    return w.finish();
}

std::vector<fs::path> fig2d(const FigureOptions& opts) {
    Writer w("fig2d", opts);
    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    const auto seq = sequences::PulseSequence::free_evolution(total_time);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (double s : {1.0, 4.0}) {
        const auto trace = dynamics::continuum_trace(env_for(s), seq, grid, continuum_opts());
        const std::string tag = s == 1.0 ? "s1" : "s4";
        names.push_back("entropy_exact_" + tag);
        names.push_back("entropy_approx_" + tag);
        cols.push_back(measures::entropy_trace(trace, 1.0, measures::EntropyForm::exact));
        cols.push_back(measures::entropy_trace(trace, 1.0, measures::EntropyForm::paper_approx));
    }
    w.csv("entropy", io::series_to_csv(grid, names, cols));
    w.manifest()["epsilon"] = 1.0;
    w.manifest()["s_values"] = {1.0, 4.0};
    return w.finish();
}

optimizer::OptimizationResult ndd_for(double s, std::size_t pulses, const FigureOptions& opts) {
    const auto env = optimizer::make_environment(env_for(s), omega_b, harmonics);
    optimizer::GaConfig ga = opts.ga;
    ga.seed = opts.seed;
    return optimizer::optimize_ndd(env, total_time, pulses, ga);
}

std::vector<sequences::PulseSequence> fig3_sequences(const sequences::PulseSequence& ndd, std::size_t n) {
    return {sequences::PulseSequence::free_evolution(total_time), sequences::make_pdd(total_time, n),
            sequences::make_cpmg(total_time, n), sequences::make_udd(total_time, n), ndd};
}

std::vector<fs::path> fig3ab(const FigureOptions& opts) {
    Writer w("fig3ab", opts);
    constexpr std::size_t n = 10;  // spacing close to 0.5 / omega_c
    const auto env = env_for(4.0);
    const auto res = ndd_for(4.0, n, opts);
    const auto seqs = fig3_sequences(res.best_sequence, n);
    const std::vector<std::string> labels{"free", "pdd", "cpmg", "udd", "ndd"};

    constexpr std::size_t nw = 2000;
    const double wmax = 10.0 * omega_c;
    std::vector<double> omega(nw), spectrum(nw);
    std::vector<std::vector<double>> power(seqs.size(), std::vector<double>(nw));
    for (std::size_t i = 0; i < nw; ++i) {
        omega[i] = wmax * static_cast<double>(i) / static_cast<double>(nw - 1);
        spectrum[i] = omega[i] > 0.0 ? spectra::spectral_density(env, omega[i]) : 0.0;
        for (std::size_t q = 0; q < seqs.size(); ++q)
            power[q][i] = sequences::filter_power(seqs[q], omega[i], total_time);
    }
    std::vector<std::string> names{"noise_spectrum"};
    std::vector<std::vector<double>> cols{spectrum};
    for (std::size_t q = 0; q < seqs.size(); ++q) {
        names.push_back(labels[q]);
        cols.push_back(power[q]);
    }
    w.csv("filter", io::series_to_csv(omega, names, cols, "omega_rad_s"));

    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    std::vector<std::vector<double>> traces;
    json summary = json::object();
    const auto model = spectra::build_noise_model(env, omega_b, harmonics);
    for (std::size_t q = 0; q < seqs.size(); ++q) {
        const auto tr = dynamics::continuum_trace(env, seqs[q], grid, continuum_opts());
        traces.push_back(tr.gamma);
        double overlap = 0.0;
        for (const auto& line : spectra::power_spectrum_weights(model))
            overlap += line.weight * sequences::filter_power(seqs[q], line.omega, total_time);
        summary[labels[q]] = {{"blp", measures::blp_measure(tr)},
                              {"protection", measures::protection(tr, total_time)},
                              {"overlap", overlap},
                              {"sequence", seqs[q].normalized()}};
    }
    w.csv("decoherence", io::series_to_csv(grid, labels, traces));
    w.manifest()["s"] = 4.0;
    w.manifest()["pulses"] = n;
    w.manifest()["filter_time_s"] = total_time;
    w.manifest()["ga"] = io::ga_config_to_json([&] {
        auto g = opts.ga;
        g.seed = opts.seed;
        return g;
    }());
    w.manifest()["ndd_sequence"] = io::sequence_to_json(res.best_sequence);
    w.manifest()["summary"] = summary;
    return w.finish();
}

std::vector<fs::path> fig4a(const FigureOptions& opts) {
    Writer w("fig4a", opts);
    constexpr std::size_t n = 10;
    const auto env = env_for(4.0);
    const auto res = ndd_for(4.0, n, opts);
    const std::vector<sequences::PulseSequence> seqs{sequences::PulseSequence::free_evolution(total_time),
                                                     sequences::make_cpmg(total_time, n), res.best_sequence};
    const std::vector<std::string> labels{"free", "cpmg", "ndd"};
    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    const auto ens = ensemble(opts);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    json summary = json::object();
    for (std::size_t q = 0; q < seqs.size(); ++q) {
        const auto cont = dynamics::continuum_trace(env, seqs[q], grid, continuum_opts());
        const auto mc = mc_set(env, seqs[q], grid, ens);
        names.push_back("continuum_" + labels[q]);
        names.push_back("mc_raw_" + labels[q]);
        names.push_back("mc_stddev_" + labels[q]);
        cols.push_back(cont.gamma);
        cols.push_back(mc.raw.gamma);
        cols.push_back(stddev_or_zero(mc.raw));
        summary[labels[q]] = {{"protection", measures::protection(cont, total_time)},
                              {"blp", measures::blp_measure(cont)},
                              {"sequence", seqs[q].normalized()}};
    }
    w.csv("decoherence", io::series_to_csv(grid, names, cols));
    w.manifest()["s"] = 4.0;
    w.manifest()["pulses"] = n;
    w.manifest()["ensemble"] = ensemble_json(ens);
    w.manifest()["ndd_sequence"] = io::sequence_to_json(res.best_sequence);
    w.manifest()["summary"] = summary;
    return w.finish();
}

std::vector<fs::path> fig5(const FigureOptions& opts) {
    Writer w("fig5", opts);
    optimizer::GaConfig ga = opts.ga;
    ga.seed = opts.seed;
    const std::vector<std::size_t> counts{1, 2, 4, 6, 8, 10, 12, 16, 20};
    for (double s : {1.0, 4.0}) {
        const auto env = optimizer::make_environment(env_for(s), omega_b, harmonics);
        const auto rows = optimizer::sweep_pulse_count(env, total_time, counts, ga);
        std::string csv = "n,p_cpmg,p_udd,p_ndd,n_cpmg,n_udd,n_ndd\n";
        for (const auto& r : rows) {
            csv += std::to_string(r.n);
            for (double v : {r.p_cpmg, r.p_udd, r.p_ndd, r.n_cpmg, r.n_udd, r.n_ndd}) csv += ',' + io::format_double(v);
            csv += '\n';
        }
        w.csv(s == 1.0 ? "vs_pulses_s1" : "vs_pulses_s4", csv);
    }

    constexpr std::size_t n = 10;  // spacing close to 0.5 / omega_c
    const auto grid = dynamics::uniform_grid(total_time, grid_points);
    std::string csv = "s,p_free,p_cpmg,p_ndd,n_free,n_cpmg,n_ndd\n";
    for (double s : sweep_values(1.0, 6.0, 1.0)) {
        const auto env = env_for(s);
        const auto res = ndd_for(s, n, opts);
        double p[3], b[3];
        const sequences::PulseSequence seqs[3]{sequences::PulseSequence::free_evolution(total_time),
                                               sequences::make_cpmg(total_time, n), res.best_sequence};
        for (int q = 0; q < 3; ++q) {
            const auto tr = dynamics::continuum_trace(env, seqs[q], grid, continuum_opts());
            p[q] = measures::protection(tr, total_time);
            b[q] = measures::blp_measure(tr);
        }
        csv += io::format_double(s);
        for (double v : {p[0], p[1], p[2], b[0], b[1], b[2]}) csv += ',' + io::format_double(v);
        csv += '\n';
    }
    w.csv("vs_s", csv);
    w.manifest()["pulse_counts"] = counts;
    w.manifest()["s_values_pulse_sweep"] = {1.0, 4.0};
    w.manifest()["s_sweep"] = {{"from", 1.0}, {"to", 6.0}, {"step", 1.0}, {"pulses", n}};
    w.manifest()["ga"] = io::ga_config_to_json(ga);
    return w.finish();
}

} // namespace

std::vector<fs::path> reproduce_figure(const std::string& figure_id, const FigureOptions& opts) {
    if (figure_id == "fig2a") return fig2a(opts);
    if (figure_id == "fig2b") return fig2b(opts);
    if (figure_id == "fig2c") return fig2c(opts);
    if (figure_id == "fig2d") return fig2d(opts);
    if (figure_id == "fig3ab") return fig3ab(opts);
    if (figure_id == "fig4a") return fig4a(opts);
    if (figure_id == "fig5") return fig5(opts);
    throw ConfigError("unknown figure id '" + figure_id + "'");
}

} // namespace dephasim::cli
