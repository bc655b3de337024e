#pragma once

#include <vector>

#include "magnoise/spectra.hpp"

namespace magnoise {

/// An m-segment pulse sequence: m free-evolution intervals of duration tau
/// separated by m-1 refocusing pi pulses. m = 1 is Ramsey, m = 2 spin echo,
/// larger m the evenly spaced CPMG extension. Each tau interval includes the
/// pi-pulse time for bookkeeping; analytic filter functions use the
/// zero-pulse-length limit.
struct PulseSequence {
    static constexpr double default_pi_duration = 68e-6; // s

    int segments = 2;
    double tau = 0.0;            // s
    double pi_duration = default_pi_duration;
    double analysis_phase = 0.0; // final pi/2 phase theta [rad]

    PulseSequence(int m, double tau, double pi_duration = default_pi_duration,
                  double analysis_phase = 0.0);

    double total_time() const { return segments * tau; }
    double free_evolution_per_segment() const { return tau - pi_duration; }
};

/// Time-domain sign function y(t) of the sequence: +1 on the first segment,
/// flipping at the center of each pi pulse (the segment boundaries k*tau).
class ToggledPhaseKernel {
public:
    explicit ToggledPhaseKernel(const PulseSequence& seq);

    /// +-1 inside [0, T]; by convention the boundary k*tau belongs to the
    /// later segment. Returns 0 outside [0, T].
    int sign_at(double t) const;
    /// Like sign_at but 0 within +-dead_time/2 of a flip or sequence edge.
    int sign_at(double t, double dead_time) const;

    int flip_count() const { return segments_ - 1; }
    double flip_time(int k) const { return (k + 1) * tau_; }
    double total_time() const { return segments_ * tau_; }
    int segments() const { return segments_; }
    double tau() const { return tau_; }

private:
    int segments_;
    double tau_;
};

/// Dimensionless filter function F(omega, T) in the zero-pulse-length limit:
/// |i*omega * integral of y(t) e^{i omega t} dt|^2. Reduces to
/// 4 sin^2(omega tau / 2) for m = 1 and 16 sin^4(omega tau / 2) for m = 2.
double filter_function(const PulseSequence& seq, double omega);

/// Segment duration synchronous with a field oscillation at omega:
/// tau = (1/2) * (omega/2pi)^-1 = pi/omega.
double synchronous_tau(double omega);

/// A coherent field tone B(t) = amplitude * sin(omega t + phase).
struct ToneField {
    double amplitude = 0.0; // T
    double omega = 0.0;     // rad/s
    double phase = 0.0;     // rad
};

/// Accumulated spin phase sum_k y_k * integral of gamma*B(t) over segment k.
double phase_accrual(const PulseSequence& seq, const ToneField& tone,
                     const SpinSpecies& spin);

/// Same, for a frequency-deviation tone delta(t) = amplitude * sin(omega t + phase)
/// already in rad/s (gamma folded in).
double phase_accrual_delta(const PulseSequence& seq, double amplitude, double omega,
                           double phase);

struct PhaseMax {
    double phase = 0.0;      // max |accrued phase| over the tone phase [rad]
    double tone_phase = 0.0; // maximizing tone phase [rad]
};

/// Closed-form maximum of |phase_accrual_delta| over the tone phase offset.
PhaseMax phase_accrual_delta_max(const PulseSequence& seq, double amplitude, double omega);

} // namespace magnoise
