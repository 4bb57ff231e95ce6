// sequences.hpp: pi-pulse sequences, standard DD families and filter functions

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dephasim::sequences {

// Instantaneous pi pulses at strictly ascending instants inside (0, T).
// The modulation f(t) starts at +1 and flips sign at every pulse.
class PulseSequence {
public:
    PulseSequence() = default;
    PulseSequence(double total_time, std::vector<double> pulse_times, std::string label = {});

    static PulseSequence free_evolution(double total_time);

    double total_time() const { return total_time_; }
    const std::vector<double>& pulse_times() const { return pulse_times_; }
    std::size_t size() const { return pulse_times_.size(); }
    const std::string& label() const { return label_; }

    // min{t1, t_{j+1} - t_j, T - t_n}; T when there are no pulses.
    double min_gap() const;
    // Delays d_0..d_n between consecutive switching points including both ends.
    std::vector<double> delays() const;
    // Number of pulses strictly before t.
    std::size_t pulses_before(double t) const;

    // "<label> T=<T> n=<n> [t1,t2,...]" with %.9e numbers, for diffing.
    std::string normalized() const;

private:
    double total_time_{0.0};
    std::vector<double> pulse_times_;
    std::string label_;
};

bool operator==(const PulseSequence& a, const PulseSequence& b);

// Pulses at exact instants take the post-flip sign (right-continuous f).
int modulation_at(const PulseSequence& seq, double t);

PulseSequence make_pdd(double total_time, std::size_t n);   // t_j = jT/(n+1)
PulseSequence make_cpmg(double total_time, std::size_t n);  // t_j = (2j-1)T/(2n)
PulseSequence make_udd(double total_time, std::size_t n);   // t_j = T sin^2(pi j / (2n+2))

// Builds a sequence from n+1 delays d_0..d_n; the total time is their sum.
PulseSequence from_delays(std::span<const double> delays, std::string label = {});

// F(w,t) = int_0^t f(t') e^{-i w t'} dt', sequence truncated at t.
std::complex<double> filter_function(const PulseSequence& seq, double omega, double t);
double filter_power(const PulseSequence& seq, double omega, double t);

// sin(x)/x with the series branch near zero.
double sinc(double x);

} // namespace dephasim::sequences

namespace dephasim::sequences {

// F(omega, t_i) for every point of an ascending grid inside [0, T]. Walks the
// grid once; full grid steps reuse a rotated phasor (resynchronised
// periodically) so the cost per point is a couple of complex multiplies.
void filter_function_grid(const PulseSequence& seq, double omega, std::span<const double> grid,
                          std::span<std::complex<double>> out);

} // namespace dephasim::sequences
