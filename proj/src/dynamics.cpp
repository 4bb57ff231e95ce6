// dynamics.cpp

#include "dephasim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dephasim/errors.hpp"
#include "dephasim/parallel.hpp"

namespace dephasim::dynamics {

using sequences::PulseSequence;

std::string to_string(Method m) {
    switch (m) {
    case Method::continuum: return "continuum";
    case Method::comb: return "comb";
    case Method::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

Method method_from_string(const std::string& s) {
    if (s == "continuum") return Method::continuum;
    if (s == "comb") return Method::comb;
    if (s == "monte_carlo" || s == "monte-carlo") return Method::monte_carlo;
    throw ConfigError("unknown trace method '" + s + "'");
}

std::vector<double> uniform_grid(double t_max, std::size_t num_points) {
    if (!(t_max > 0.0)) throw ConfigError("grid.t_max must be > 0");
    if (num_points < 2) throw ConfigError("grid.num_points must be >= 2");
    std::vector<double> g(num_points);
    const double dt = t_max / static_cast<double>(num_points - 1);
    for (std::size_t i = 0; i < num_points; ++i) g[i] = dt * static_cast<double>(i);
    g.back() = t_max;
    return g;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace {

void check_grid(std::span<const double> grid, double total_time) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || grid[i] > total_time)
            throw std::domain_error("trace grid must lie within [0, T]");
        if (i > 0 && grid[i] < grid[i - 1]) throw std::domain_error("trace grid must be ascending");
    }
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk21(const auto& f, double a, double b) {
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

} // namespace

double chi_continuum(const spectra::EnvironmentSpec& env, const PulseSequence& seq, double t,
                     const ContinuumOptions& opts) {
    env.validate();
    if (!(t >= 0.0)) throw std::domain_error("chi_continuum: t must be >= 0");
    if (t > seq.total_time()) throw std::domain_error("chi_continuum: t beyond sequence total time");
    if (t == 0.0) return 0.0;

    auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        return spectra::spectral_density(env, w) * spectra::thermal_factor(env, w) *
               sequences::filter_power(seq, w, t);
    };

    const double wc = env.omega_c;
    // 20 wc and 40 pi / t are floors; the (40 + 4s) wc term keeps the truncated
    // tail of w^s e^{-w/wc} below ~1e-15 relative for large s.
    const double upper = std::max({20.0 * wc, 40.0 * std::numbers::pi / t, (40.0 + 4.0 * env.s) * wc});
    const double width = std::min(std::numbers::pi / t, 0.5 * wc);
    const auto panels = static_cast<std::size_t>(std::ceil(upper / width));

    std::priority_queue<Panel> queue;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = width * static_cast<double>(p);
        const double b = std::min(upper, a + width);
        Panel pn = gk21(integrand, a, b);
        total += pn.value;
        total_err += pn.error;
        queue.push(pn);
    }

    const std::size_t max_splits = 20000;
    std::size_t splits = 0;
    while (total_err > opts.rel_tol * std::abs(total) && total_err > 1e-300) {
        if (splits++ >= max_splits) {
            std::ostringstream os;
            os << "chi_continuum: quadrature did not converge at t = " << t << " (estimate "
               << total << ", error " << total_err << ")";
            throw NumericalError(os.str());
        }
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk21(integrand, worst.a, mid);
        Panel right = gk21(integrand, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    return opts.scale.factor * 0.5 * std::max(total, 0.0);
}

double chi_comb(const spectra::NoiseModel& model, const PulseSequence& seq, double t) {
    if (!(t >= 0.0)) throw std::domain_error("chi_comb: t must be >= 0");
    if (t > seq.total_time()) throw std::domain_error("chi_comb: t beyond sequence total time");
    if (t == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t k = 1; k <= model.num_harmonics(); ++k) {
        const double a = model.amplitudes[k - 1];
        sum += a * a * sequences::filter_power(seq, model.harmonic(k), t);
    }
    return 0.25 * model.gamma * model.gamma * sum;
}

DecoherenceTrace continuum_trace(const spectra::EnvironmentSpec& env, const PulseSequence& seq,
                                 std::span<const double> grid, const ContinuumOptions& opts) {
    check_grid(grid, seq.total_time());
    DecoherenceTrace tr;
    tr.grid.assign(grid.begin(), grid.end());
    tr.gamma.resize(grid.size());
    tr.method = Method::continuum;
    parallel_for(grid.size(), [&](std::size_t i) {
        tr.gamma[i] = std::exp(-chi_continuum(env, seq, grid[i], opts));
    });
    return tr;
}

std::vector<double> comb_chi_trace(const spectra::NoiseModel& model, const PulseSequence& seq,
                                   std::span<const double> grid) {
    check_grid(grid, seq.total_time());
    const std::size_t m = model.num_harmonics();
    const std::size_t n = grid.size();
    constexpr std::size_t chunk = 64;
    const std::size_t chunks = (m + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial(chunks);

    parallel_for(chunks, [&](std::size_t c) {
        std::vector<double> acc(n, 0.0);
        std::vector<std::complex<double>> f(n);
        const std::size_t k_end = std::min(m, (c + 1) * chunk);
        for (std::size_t k = c * chunk + 1; k <= k_end; ++k) {
            const double a = model.amplitudes[k - 1];
            if (a == 0.0) continue;
            sequences::filter_function_grid(seq, model.harmonic(k), grid, f);
            const double w = a * a;
            for (std::size_t i = 0; i < n; ++i) acc[i] += w * std::norm(f[i]);
        }
        partial[c] = std::move(acc);
    });

    std::vector<double> chi(n, 0.0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < n; ++i) chi[i] += p[i];
    const double scale = 0.25 * model.gamma * model.gamma;
    for (double& x : chi) x *= scale;
    return chi;
}

DecoherenceTrace comb_trace(const spectra::NoiseModel& model, const PulseSequence& seq,
                            std::span<const double> grid) {
    DecoherenceTrace tr;
    tr.grid.assign(grid.begin(), grid.end());
    tr.gamma = comb_chi_trace(model, seq, grid);
    for (double& x : tr.gamma) x = std::exp(-x);
    tr.method = Method::comb;
    return tr;
}

namespace {

// Re sum_k h_k e^{i p_k} = sum_k (hr_k cos p_k - hi_k sin p_k), four fixed
// accumulators so the association never changes.
double phase_dot(const double* hr, const double* hi, const double* c, const double* s,
                 std::size_t m) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
        for (std::size_t u = 0; u < 4; ++u) acc[u] += hr[k + u] * c[k + u] - hi[k + u] * s[k + u];
    }
    for (; k < m; ++k) acc[0] += hr[k] * c[k] - hi[k] * s[k];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

} // namespace

MonteCarloResult monte_carlo(const spectra::NoiseModel& model, const PulseSequence& seq,
                             std::span<const double> grid, const noise::EnsembleSpec& ens,
                             const MonteCarloOptions& opts) {
    model.validate();
    ens.validate();
    check_grid(grid, seq.total_time());
    const std::size_t m = model.num_harmonics();
    const std::size_t g = grid.size();
    const std::size_t total = ens.num_realizations;

    // phi_j(t_i) = Re sum_k h_ik e^{i p_jk} with h_ik = gamma a_k conj(F(w_k, t_i));
    // h does not depend on the realization.
    std::vector<double> hr(g * m), hi(g * m);
    parallel_for(m, [&](std::size_t k0) {
        std::vector<std::complex<double>> f(g);
        sequences::filter_function_grid(seq, model.harmonic(k0 + 1), grid, f);
        const double amp = model.gamma * model.amplitudes[k0];
        for (std::size_t i = 0; i < g; ++i) {
            hr[i * m + k0] = amp * f[i].real();
            hi[i * m + k0] = -amp * f[i].imag();
        }
    });

    std::vector<double> cos_phi(total * g), sin_phi(total * g);
    MonteCarloResult out;
    out.dumped_phases.resize(std::min(opts.dump_count, total));

    parallel_for(total, [&](std::size_t j) {
        std::vector<double> p(m), c(m), s(m);
        noise::draw_phases(noise::realization_seed(ens.master_seed, j), p);
        for (std::size_t k = 0; k < m; ++k) {
            c[k] = std::cos(p[k]);
            s[k] = std::sin(p[k]);
        }
        std::vector<double> phi(g);
        for (std::size_t i = 0; i < g; ++i) {
            phi[i] = phase_dot(&hr[i * m], &hi[i * m], c.data(), s.data(), m);
            cos_phi[j * g + i] = std::cos(phi[i]);
            sin_phi[j * g + i] = std::sin(phi[i]);
        }
        if (j < out.dumped_phases.size()) out.dumped_phases[j] = std::move(phi);
    });

    auto column_mean = [&](const std::vector<double>& data, std::size_t first, std::size_t count,
                           std::size_t i, std::vector<double>& scratch) {
        scratch.resize(count);
        for (std::size_t j = 0; j < count; ++j) scratch[j] = data[(first + j) * g + i];
        return pairwise_sum(scratch) / static_cast<double>(count);
    };

    DecoherenceTrace& tr = out.trace;
    tr.grid.assign(grid.begin(), grid.end());
    tr.method = Method::monte_carlo;
    tr.gamma.resize(g);
    EnsembleMeta meta;
    meta.num_realizations = total;
    meta.master_seed = ens.master_seed;
    meta.sine_residual.resize(g);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < g; ++i) {
        tr.gamma[i] = column_mean(cos_phi, 0, total, i, scratch);
        meta.sine_residual[i] = column_mean(sin_phi, 0, total, i, scratch);
    }
    if (ens.binning) {
        const auto& b = *ens.binning;
        meta.bin_traces.assign(b.num_bins, std::vector<double>(g));
        for (std::size_t bin = 0; bin < b.num_bins; ++bin)
            for (std::size_t i = 0; i < g; ++i)
                meta.bin_traces[bin][i] = column_mean(cos_phi, bin * b.bin_size, b.bin_size, i, scratch);
        if (b.num_bins >= 2) {
            meta.bin_stddev.resize(g);
            for (std::size_t i = 0; i < g; ++i) {
                double mean = 0.0;
                for (const auto& bt : meta.bin_traces) mean += bt[i];
                mean /= static_cast<double>(b.num_bins);
                double ss = 0.0;
                for (const auto& bt : meta.bin_traces) ss += (bt[i] - mean) * (bt[i] - mean);
                meta.bin_stddev[i] = std::sqrt(ss / static_cast<double>(b.num_bins - 1));
            }
        }
    }
    tr.ensemble = std::move(meta);
    return out;
}

DecoherenceTrace monte_carlo_trace(const spectra::NoiseModel& model, const PulseSequence& seq,
                                   std::span<const double> grid, const noise::EnsembleSpec& ens) {
    return monte_carlo(model, seq, grid, ens).trace;
}

std::vector<double> decay_rate(const DecoherenceTrace& trace) {
    const auto& t = trace.grid;
    const auto& y = trace.gamma;
    if (t.size() != y.size()) throw std::invalid_argument("decay_rate: grid/gamma size mismatch");
    if (t.size() < 2) throw std::invalid_argument("decay_rate: need at least two samples");
    std::vector<double> lg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) {
            std::ostringstream os;
            os << "decay_rate: nonpositive Gamma = " << y[i] << " at t = " << t[i]
               << "; clip or smooth Monte Carlo traces first";
            throw NumericalError(os.str());
        }
        lg[i] = std::log(y[i]);
    }
    const std::size_t n = y.size();
    std::vector<double> rate(n);
    rate[0] = -(lg[1] - lg[0]) / (t[1] - t[0]);
    rate[n - 1] = -(lg[n - 1] - lg[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) rate[i] = -(lg[i + 1] - lg[i - 1]) / (t[i + 1] - t[i - 1]);
    return rate;
}

DecoherenceTrace clip_floor(DecoherenceTrace trace, double floor) {
    for (double& x : trace.gamma) x = std::max(x, floor);
    return trace;
}

} // namespace dephasim::dynamics
