// optimizer.cpp

#include "dephasim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dephasim/errors.hpp"
#include "dephasim/measures.hpp"
#include "dephasim/noise.hpp"
#include "dephasim/parallel.hpp"

namespace dephasim::optimizer {

using sequences::PulseSequence;

Environment make_environment(const spectra::EnvironmentSpec& spec, double omega_b,
                             std::size_t num_harmonics) {
    return {spec, spectra::build_noise_model(spec, omega_b, num_harmonics),
            dynamics::ContinuumScale::emulated(omega_b)};
}

void GaConfig::validate(double total_time, std::size_t pulses) const {
    if (population_size < 2) throw ConfigError("ga.population_size must be >= 2");
    if (tournament_size < 1) throw ConfigError("ga.tournament_size must be >= 1");
    if (elitism_count >= population_size) throw ConfigError("ga.elitism_count must be < population_size");
    if (!(min_delay > 0.0)) throw ConfigError("ga.min_delay must be > 0");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("ga.crossover_rate must lie in [0, 1]");
    if (!(swap_rate >= 0.0 && swap_rate <= 1.0)) throw ConfigError("ga.swap_rate must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("ga.mutation_rate must lie in [0, 1]");
    if (!(mutation_scale >= 0.0)) throw ConfigError("ga.mutation_scale must be >= 0");
    if (pulses < 1) throw ConfigError("pulse count must be >= 1");
    if (min_delay * static_cast<double>(pulses + 1) > total_time) {
        std::ostringstream os;
        os << "infeasible: min_delay * (n + 1) = " << min_delay * static_cast<double>(pulses + 1)
           << " s exceeds total time " << total_time << " s";
        throw ConfigError(os.str());
    }
}

dynamics::DecoherenceTrace fitness_trace(const Environment& env, const PulseSequence& seq,
                                         const FitnessSettings& settings) {
    const double horizon = settings.horizon > 0.0 ? settings.horizon : seq.total_time();
    const auto grid = dynamics::uniform_grid(horizon, settings.grid_points);
    if (settings.method == dynamics::Method::continuum)
        return dynamics::continuum_trace(env.spec, seq, grid, {env.scale});
    if (settings.method == dynamics::Method::comb) return dynamics::comb_trace(env.comb, seq, grid);
    throw ConfigError("fitness: Monte Carlo traces are not a valid fitness route");
}

double fitness(const Environment& env, const PulseSequence& seq, const FitnessSettings& settings) {
    const auto tr = fitness_trace(env, seq, settings);
    return measures::protection(tr, tr.grid.back());
}

void project_to_simplex(std::span<double> delays, double total_time, double min_delay) {
    const auto n = static_cast<double>(delays.size());
    const double target = total_time - min_delay * n;
    double slack = 0.0;
    for (double& d : delays) {
        if (!std::isfinite(d)) d = min_delay;
        d = std::max(d, min_delay);
        slack += d - min_delay;
    }
    if (slack > 0.0) {
        const double f = target / slack;
        for (double& d : delays) d = min_delay + (d - min_delay) * f;
    } else {
        for (double& d : delays) d = min_delay + target / n;
    }
    // absorb rounding in the largest delay
    const double sum = std::accumulate(delays.begin(), delays.end(), 0.0);
    auto largest = std::max_element(delays.begin(), delays.end());
    *largest += total_time - sum;
}

PulseSequence decode(std::span<const double> delays, double total_time, std::string label) {
    std::vector<double> t;
    t.reserve(delays.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < delays.size(); ++j) {
        acc += delays[j];
        t.push_back(acc);
    }
    return PulseSequence(total_time, std::move(t), std::move(label));
}

namespace {

using Genome = std::vector<double>;

struct Individual {
    Genome genes;
    double fitness{0.0};
    bool evaluated{false};
};

std::mt19937_64 generation_rng(std::uint64_t seed, std::size_t generation) {
    return std::mt19937_64(noise::mix64(noise::mix64(seed) + 0x9e3779b97f4a7c15ULL * (generation + 1)));
}

Genome random_genome(std::mt19937_64& rng, std::size_t genes, double total_time, double min_delay) {
    // flat Dirichlet on the slack
    std::exponential_distribution<double> expo(1.0);
    Genome g(genes);
    for (double& d : g) d = min_delay + expo(rng);
    project_to_simplex(g, total_time, min_delay);
    return g;
}

} // namespace

OptimizationResult optimize_ndd(const Environment& env, double total_time, std::size_t pulses,
                                const GaConfig& cfg) {
    cfg.validate(total_time, pulses);
    const std::size_t genes = pulses + 1;
    FitnessSettings fs = cfg.fitness;
    if (fs.horizon <= 0.0) fs.horizon = total_time;

    OptimizationResult result;
    std::size_t evaluations = 0;
    auto evaluate = [&](std::vector<Individual>& pop) {
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (!pop[i].evaluated) todo.push_back(i);
        parallel_for(todo.size(), [&](std::size_t q) {
            Individual& ind = pop[todo[q]];
            ind.fitness = fitness(env, decode(ind.genes, total_time), fs);
            ind.evaluated = true;
        });
        evaluations += todo.size();
    };

    auto rng = generation_rng(cfg.seed, 0);
    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    {
        Genome cpmg = sequences::make_cpmg(total_time, pulses).delays();
        project_to_simplex(cpmg, total_time, cfg.min_delay);
        result.baseline_sequence = decode(cpmg, total_time, "CPMG");
        if (cfg.seed_cpmg) pop.push_back({cpmg});
    }
    while (pop.size() < cfg.population_size)
        pop.push_back({random_genome(rng, genes, total_time, cfg.min_delay)});

    result.baseline = fitness(env, result.baseline_sequence, fs);
    ++evaluations;

    Individual best;
    std::size_t stall = 0;
    for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
        evaluate(pop);
        std::stable_sort(pop.begin(), pop.end(),
                         [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
        if (!best.evaluated || pop.front().fitness > best.fitness) {
            stall = (best.evaluated && pop.front().fitness - best.fitness <= 1e-12) ? stall + 1 : 0;
            best = pop.front();
        } else {
            ++stall;
        }
        result.fitness_history.push_back(best.fitness);
        result.generations = gen + 1;
        if (stall >= cfg.stall_generations || gen + 1 == cfg.max_generations) break;

        rng = generation_rng(cfg.seed, gen + 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double sigma =
            cfg.mutation_scale * total_time * std::pow(cfg.mutation_decay, static_cast<double>(gen));

        auto tournament = [&]() -> const Individual& {
            std::size_t winner = pick(rng);
            for (std::size_t r = 1; r < cfg.tournament_size; ++r) winner = std::min(winner, pick(rng));
            return pop[winner];  // population is sorted, lower index is fitter
        };

        std::vector<Individual> next;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < cfg.elitism_count; ++e) next.push_back(pop[e]);
        while (next.size() < pop.size()) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();
            Genome child = p1.genes;
            if (unit(rng) < cfg.crossover_rate) {
                for (std::size_t i = 0; i < genes; ++i) {
                    const double lo = std::min(p1.genes[i], p2.genes[i]);
                    const double hi = std::max(p1.genes[i], p2.genes[i]);
                    const double ext = cfg.blend_alpha * (hi - lo);
                    child[i] = lo - ext + unit(rng) * (hi - lo + 2.0 * ext);
                }
            }
            for (double& d : child)
                if (unit(rng) < cfg.mutation_rate) d += sigma * gauss(rng);
            if (unit(rng) < cfg.swap_rate) {
                std::uniform_int_distribution<std::size_t> gene(0, genes - 1);
                std::swap(child[gene(rng)], child[gene(rng)]);
            }
            project_to_simplex(child, total_time, cfg.min_delay);
            next.push_back({std::move(child)});
        }
        pop = std::move(next);
    }

    result.best_sequence = decode(best.genes, total_time, "NDD");
    result.best_fitness = best.fitness;
    result.evaluations = evaluations;
    return result;
}

std::vector<SweepRow> sweep_pulse_count(const Environment& env, double total_time,
                                        std::span<const std::size_t> pulse_counts,
                                        const GaConfig& cfg, const SweepOptions& opts) {
    const FitnessSettings measure{dynamics::Method::continuum, opts.grid_points, total_time};
    auto evaluate = [&](const PulseSequence& seq, double& p, double& n) {
        const auto tr = fitness_trace(env, seq, measure);
        p = measures::protection(tr, total_time);
        n = measures::blp_measure(tr);
    };
    std::vector<SweepRow> rows;
    for (std::size_t n : pulse_counts) {
        SweepRow row;
        row.n = n;
        evaluate(sequences::make_cpmg(total_time, n), row.p_cpmg, row.n_cpmg);
        evaluate(sequences::make_udd(total_time, n), row.p_udd, row.n_udd);
        if (opts.optimize) {
            row.ndd = optimize_ndd(env, total_time, n, cfg).best_sequence;
            evaluate(row.ndd, row.p_ndd, row.n_ndd);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace dephasim::optimizer
