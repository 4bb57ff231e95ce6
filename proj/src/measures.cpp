// measures.cpp

#include "dephasim/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "dephasim/errors.hpp"

namespace dephasim::measures {

double blp_measure(const dynamics::DecoherenceTrace& trace) {
    const auto& g = trace.gamma;
    double n = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) n += std::max(g[i + 1] - g[i], 0.0);
    return n;
}

std::vector<Interval> backflow_intervals(const dynamics::DecoherenceTrace& trace) {
    const auto& g = trace.gamma;
    const auto& t = trace.grid;
    std::vector<Interval> out;
    std::size_t i = 0;
    while (i + 1 < g.size()) {
        if (g[i + 1] > g[i]) {
            const std::size_t start = i;
            while (i + 1 < g.size() && g[i + 1] > g[i]) ++i;
            out.emplace_back(t[start], t[i]);
        } else {
            ++i;
        }
    }
    return out;
}

double protection(const dynamics::DecoherenceTrace& trace, double horizon) {
    const auto& t = trace.grid;
    const auto& g = trace.gamma;
    if (t.size() < 2 || t.size() != g.size())
        throw std::invalid_argument("protection: need a trace with at least two samples");
    if (t.front() != 0.0) throw std::domain_error("protection: grid must start at t = 0");
    if (!(horizon > 0.0) || horizon > t.back() * (1.0 + 1e-12))
        throw std::domain_error("protection: horizon beyond grid");
    horizon = std::min(horizon, t.back());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (t[i] >= horizon) break;
        const double b = std::min(t[i + 1], horizon);
        const double frac = (b - t[i]) / (t[i + 1] - t[i]);
        const double gb = g[i] + frac * (g[i + 1] - g[i]);
        area += 0.5 * (g[i] + gb) * (b - t[i]);
    }
    return area / horizon;
}

std::vector<double> entropy_trace(const dynamics::DecoherenceTrace& trace, double epsilon,
                                  EntropyForm form) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("entropy epsilon must lie in (0, 1]");
    std::vector<double> s(trace.gamma.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = epsilon * trace.gamma[i];
        if (std::abs(r) > 1.0 + 1e-12) throw std::domain_error("entropy_trace: |eps * Gamma| > 1");
        if (form == EntropyForm::paper_approx) {
            s[i] = 1.0 - 0.5 * r * r;
            continue;
        }
        double h = 0.0;
        for (double p : {0.5 * (1.0 + r), 0.5 * (1.0 - r)})
            if (p > 0.0) h -= p * std::log2(p);
        s[i] = h;
    }
    return s;
}

std::vector<double> trace_distance_pair(const dynamics::DecoherenceTrace& trace) {
    std::vector<double> d(trace.gamma.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(trace.gamma[i]);
    return d;
}

MeasureReport measure_report(const dynamics::DecoherenceTrace& trace, double horizon,
                             std::optional<double> entropy_epsilon) {
    MeasureReport r;
    r.blp = blp_measure(trace);
    r.horizon = horizon;
    r.protection = protection(trace, horizon);
    r.backflow_intervals = backflow_intervals(trace);
    if (entropy_epsilon) r.entropy = entropy_trace(trace, *entropy_epsilon);
    r.overestimated = trace.method == dynamics::Method::monte_carlo && !trace.smoothed;
    return r;
}

} // namespace dephasim::measures
