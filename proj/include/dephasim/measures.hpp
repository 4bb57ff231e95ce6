// measures.hpp: BLP non-Markovianity, coherence protection and entropy

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dephasim/dynamics.hpp"

namespace dephasim::measures {

using Interval = std::pair<double, double>;

struct MeasureReport {
    double blp{0.0};
    double protection{0.0};
    double horizon{0.0};
    std::vector<Interval> backflow_intervals;
    std::optional<std::vector<double>> entropy;
    // Raw Monte Carlo traces overestimate blp through finite-ensemble ripple.
    bool overestimated{false};
};

// Sum of positive increments Gamma_{i+1} - Gamma_i over the sampled grid.
double blp_measure(const dynamics::DecoherenceTrace& trace);

// Maximal runs of rising samples as [t_start, t_end], disjoint and ascending.
std::vector<Interval> backflow_intervals(const dynamics::DecoherenceTrace& trace);

// (1/t) * trapezoid integral of Gamma over [0, t]; grid must start at 0.
double protection(const dynamics::DecoherenceTrace& trace, double horizon);

enum class EntropyForm {
    exact,        // -sum p log2 p with p = (1 +- eps Gamma)/2
    paper_approx  // 1 - eps^2 Gamma^2 / 2, as commonly quoted (no 1/ln 2)
};

std::vector<double> entropy_trace(const dynamics::DecoherenceTrace& trace, double epsilon = 1.0,
                                  EntropyForm form = EntropyForm::exact);

// Trace distance of the antipodal pair |+x>, |-x>; equals |Gamma| under pure dephasing.
std::vector<double> trace_distance_pair(const dynamics::DecoherenceTrace& trace);

MeasureReport measure_report(const dynamics::DecoherenceTrace& trace, double horizon,
                             std::optional<double> entropy_epsilon = std::nullopt);

} // namespace dephasim::measures
