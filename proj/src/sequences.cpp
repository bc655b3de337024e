#include "magnoise/sequences.hpp"

#include <cmath>
#include <complex>

#include "magnoise/constants.hpp"
#include "magnoise/errors.hpp"

namespace magnoise {

PulseSequence::PulseSequence(int m, double tau_, double pi_duration_, double analysis_phase_)
    : segments(m), tau(tau_), pi_duration(pi_duration_), analysis_phase(analysis_phase_) {
    if (m < 1) throw ValidationError("pulse sequence: need at least one segment");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ValidationError("pulse sequence: tau must be finite and > 0");
    if (!(pi_duration >= 0.0) || !(pi_duration < tau))
        throw ValidationError("pulse sequence: need 0 <= pi_duration < tau");
    if (!std::isfinite(analysis_phase))
        throw ValidationError("pulse sequence: analysis phase must be finite");
}

ToggledPhaseKernel::ToggledPhaseKernel(const PulseSequence& seq)
    : segments_(seq.segments), tau_(seq.tau) {}

int ToggledPhaseKernel::sign_at(double t) const {
    if (t < 0.0 || t > total_time()) return 0;
    int k = static_cast<int>(t / tau_);
    if (k >= segments_) k = segments_ - 1; // t == T
    return (k % 2 == 0) ? 1 : -1;
}

int ToggledPhaseKernel::sign_at(double t, double dead_time) const {
    const int s = sign_at(t);
    if (s == 0 || dead_time <= 0.0) return s;
    for (int k = 0; k < flip_count(); ++k)
        if (std::abs(t - flip_time(k)) < 0.5 * dead_time) return 0;
    return s;
}

double filter_function(const PulseSequence& seq, double omega) {
    if (omega < 0.0) throw ValidationError("filter function: omega must be >= 0");
    if (omega == 0.0) return 0.0;
    // i*omega * FT of y(t) = (u - 1) * sum_k (-u)^k with u = e^{i omega tau};
    // the explicit sum is exact for any m and free of tan() singularities.
    const std::complex<double> u = std::polar(1.0, omega * seq.tau);
    std::complex<double> term(1.0, 0.0);
    std::complex<double> sum(0.0, 0.0);
    for (int k = 0; k < seq.segments; ++k) {
        sum += term;
        term *= -u;
    }
    return std::norm((u - 1.0) * sum);
}

double synchronous_tau(double omega) {
    if (!(omega > 0.0)) throw ValidationError("synchronous tau: omega must be > 0");
    return constants::pi / omega;
}

double phase_accrual_delta(const PulseSequence& seq, double amplitude, double omega,
                           double phase) {
    if (!(omega > 0.0)) throw ValidationError("phase accrual: tone omega must be > 0");
    // integral of sin(w t + phi) over [a, b] = (cos(w a + phi) - cos(w b + phi)) / w
    double total = 0.0;
    for (int k = 0; k < seq.segments; ++k) {
        const double a = k * seq.tau;
        const double b = (k + 1) * seq.tau;
        const double seg = (std::cos(omega * a + phase) - std::cos(omega * b + phase)) / omega;
        total += (k % 2 == 0 ? 1.0 : -1.0) * seg;
    }
    return amplitude * total;
}

double phase_accrual(const PulseSequence& seq, const ToneField& tone,
                     const SpinSpecies& spin) {
    return phase_accrual_delta(seq, spin.gamma * tone.amplitude, tone.omega, tone.phase);
}

PhaseMax phase_accrual_delta_max(const PulseSequence& seq, double amplitude, double omega) {
    if (!(omega > 0.0)) throw ValidationError("phase accrual: tone omega must be > 0");
    // phase(phi0) = C cos(phi0) + S sin(phi0); the maximum is hypot(C, S).
    double c = 0.0, s = 0.0;
    for (int k = 0; k < seq.segments; ++k) {
        const double a = omega * k * seq.tau;
        const double b = omega * (k + 1) * seq.tau;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        c += sign * (std::cos(a) - std::cos(b));
        s += sign * (std::sin(b) - std::sin(a));
    }
    c *= amplitude / omega;
    s *= amplitude / omega;
    return {std::hypot(c, s), std::atan2(s, c)};
}

} // namespace magnoise
