// sequences.cpp

#include "dephasim/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "dephasim/errors.hpp"

namespace dephasim::sequences {

PulseSequence::PulseSequence(double total_time, std::vector<double> pulse_times, std::string label)
    : total_time_(total_time), pulse_times_(std::move(pulse_times)), label_(std::move(label)) {
    if (!std::isfinite(total_time_) || total_time_ <= 0.0)
        throw ConfigError("sequence.total_time_s must be > 0");
    double prev = 0.0;
    for (std::size_t j = 0; j < pulse_times_.size(); ++j) {
        const double tj = pulse_times_[j];
        if (!std::isfinite(tj) || tj <= prev || tj >= total_time_) {
            std::ostringstream os;
            os << "sequence.pulse_times_s[" << j << "] = " << tj
               << " violates 0 < t1 < ... < tn < T (T = " << total_time_ << ")";
            throw ConfigError(os.str());
        }
        prev = tj;
    }
}

PulseSequence PulseSequence::free_evolution(double total_time) {
    return PulseSequence(total_time, {}, "free");
}

double PulseSequence::min_gap() const {
    double g = total_time_;
    double prev = 0.0;
    for (double tj : pulse_times_) {
        g = std::min(g, tj - prev);
        prev = tj;
    }
    return std::min(g, total_time_ - prev);
}

std::vector<double> PulseSequence::delays() const {
    std::vector<double> d;
    d.reserve(pulse_times_.size() + 1);
    double prev = 0.0;
    for (double tj : pulse_times_) {
        d.push_back(tj - prev);
        prev = tj;
    }
    d.push_back(total_time_ - prev);
    return d;
}

std::size_t PulseSequence::pulses_before(double t) const {
    return static_cast<std::size_t>(std::lower_bound(pulse_times_.begin(), pulse_times_.end(), t) -
                                    pulse_times_.begin());
}

std::string PulseSequence::normalized() const {
    std::string out = label_.empty() ? "unnamed" : label_;
    char buf[64];
    std::snprintf(buf, sizeof buf, " T=%.9e n=%zu [", total_time_, pulse_times_.size());
    out += buf;
    for (std::size_t j = 0; j < pulse_times_.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%s%.9e", j ? "," : "", pulse_times_[j]);
        out += buf;
    }
    out += "]";
    return out;
}

bool operator==(const PulseSequence& a, const PulseSequence& b) {
    return a.total_time() == b.total_time() && a.pulse_times() == b.pulse_times() &&
           a.label() == b.label();
}

int modulation_at(const PulseSequence& seq, double t) {
    if (!(t >= 0.0 && t <= seq.total_time()))
        throw std::domain_error("modulation_at: t outside [0, T]");
    // pulses at or before t have flipped the sign
    const auto flips = std::upper_bound(seq.pulse_times().begin(), seq.pulse_times().end(), t) -
                       seq.pulse_times().begin();
    return (flips % 2 == 0) ? 1 : -1;
}

namespace {

void require_count(std::size_t n) {
    if (n < 1) throw ConfigError("pulse count n must be >= 1");
}

} // namespace

PulseSequence make_pdd(double total_time, std::size_t n) {
    require_count(n);
    std::vector<double> t(n);
    for (std::size_t j = 1; j <= n; ++j)
        t[j - 1] = static_cast<double>(j) * total_time / static_cast<double>(n + 1);
    return PulseSequence(total_time, std::move(t), "PDD");
}

PulseSequence make_cpmg(double total_time, std::size_t n) {
    require_count(n);
    std::vector<double> t(n);
    for (std::size_t j = 1; j <= n; ++j)
        t[j - 1] = static_cast<double>(2 * j - 1) * total_time / static_cast<double>(2 * n);
    return PulseSequence(total_time, std::move(t), "CPMG");
}

PulseSequence make_udd(double total_time, std::size_t n) {
    require_count(n);
    std::vector<double> t(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double sn =
            std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(2 * n + 2));
        t[j - 1] = total_time * sn * sn;
    }
    return PulseSequence(total_time, std::move(t), "UDD");
}

PulseSequence from_delays(std::span<const double> delays, std::string label) {
    if (delays.empty()) throw ConfigError("from_delays: need at least one delay");
    std::vector<double> t;
    t.reserve(delays.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < delays.size(); ++j) {
        acc += delays[j];
        t.push_back(acc);
    }
    return PulseSequence(acc + delays.back(), std::move(t), std::move(label));
}

double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

std::complex<double> filter_function(const PulseSequence& seq, double omega, double t) {
    if (!(t > 0.0 && t <= seq.total_time()))
        throw std::domain_error("filter_function: t must lie in (0, T]");
    if (!(omega >= 0.0)) throw std::domain_error("filter_function: omega must be >= 0");

    // Each segment [a,b] contributes sign * L * e^{-i w (a+b)/2} * sinc(w L / 2),
    // which is the closed-form integral without the 1/(iw) cancellation.
    std::complex<double> acc{0.0, 0.0};
    double a = 0.0;
    double sign = 1.0;
    auto add_segment = [&](double b) {
        const double len = b - a;
        const double mid = 0.5 * (a + b);
        acc += sign * len * sinc(0.5 * omega * len) * std::polar(1.0, -omega * mid);
    };
    for (double tj : seq.pulse_times()) {
        if (tj >= t) break;
        add_segment(tj);
        a = tj;
        sign = -sign;
    }
    add_segment(t);
    return acc;
}

double filter_power(const PulseSequence& seq, double omega, double t) {
    return std::norm(filter_function(seq, omega, t));
}

} // namespace dephasim::sequences

namespace dephasim::sequences {

void filter_function_grid(const PulseSequence& seq, double omega, std::span<const double> grid,
                          std::span<std::complex<double>> out) {
    if (grid.size() != out.size()) throw std::invalid_argument("filter_function_grid: size mismatch");
    if (grid.empty()) return;
    if (grid.front() < 0.0 || grid.back() > seq.total_time())
        throw std::domain_error("filter_function_grid: grid outside [0, T]");

    const auto& pulses = seq.pulse_times();
    std::complex<double> acc{0.0, 0.0};
    double sign = 1.0;
    std::size_t next = 0;
    double a = 0.0;

    auto add_segment = [&](double lo, double hi) {
        const double len = hi - lo;
        acc += sign * len * sinc(0.5 * omega * len) * std::polar(1.0, -0.5 * omega * (lo + hi));
    };
    auto advance_to = [&](double b) {
        while (next < pulses.size() && pulses[next] < b) {
            add_segment(a, pulses[next]);
            a = pulses[next];
            sign = -sign;
            ++next;
        }
        add_segment(a, b);
        a = b;
    };

    if (grid.front() > 0.0) advance_to(grid.front());
    out[0] = acc;

    // Uniform steps: the midpoint phasor rotates by e^{-i w dt} each step.
    const std::size_t n = grid.size();
    const double dt = n > 1 ? (grid.back() - grid.front()) / static_cast<double>(n - 1) : 0.0;
    const double step_weight = dt * sinc(0.5 * omega * dt);
    const std::complex<double> rotation = std::polar(1.0, -omega * dt);
    std::complex<double> phasor{1.0, 0.0};
    std::size_t since_sync = 64;

    for (std::size_t i = 1; i < n; ++i) {
        const double b = grid[i];
        const double step = b - grid[i - 1];
        const bool uniform_step = std::abs(step - dt) <= 1e-12 * dt;
        const bool pulse_inside = next < pulses.size() && pulses[next] < b;
        if (!uniform_step || pulse_inside) {
            advance_to(b);
            since_sync = 64;
        } else {
            if (since_sync >= 64) {
                phasor = std::polar(1.0, -0.5 * omega * (grid[i - 1] + b));
                since_sync = 0;
            } else {
                phasor *= rotation;
                ++since_sync;
            }
            acc += sign * step_weight * phasor;
            a = b;
        }
        out[i] = acc;
    }
}

} // namespace dephasim::sequences
