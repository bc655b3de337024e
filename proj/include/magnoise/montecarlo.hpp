#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "magnoise/sequences.hpp"
#include "magnoise/spectra.hpp"

namespace magnoise {

/// One synthesized noise record delta(t_i) [rad/s] with its seed provenance.
struct NoiseRealization {
    double sample_rate = 0.0; // Hz
    std::vector<double> samples;
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;
};

/// Trajectory-averaged coherence estimate.
struct McEstimate {
    double coherence = 0.0;     // <cos phi>
    double std_error = 0.0;     // sample std / sqrt(N)
    std::uint64_t trajectories = 0;
    double mean_phase = 0.0;    // <phi> [rad]
    double mean_phase_sq = 0.0; // <phi^2> [rad^2]
};

struct McOptions {
    std::uint64_t trajectories = 10000;
    std::uint64_t seed = 1;
    double sample_rate = 0.0;      // Hz; 0 -> 16x the highest spectral support
    double duration_factor = 16.0; // synthesized record length in units of T
    unsigned workers = 0;          // 0 -> hardware concurrency
    bool finite_pulse_deadtime = false; // widen pi pulses to y(t)=0 windows
};

/// Frequency-domain Gaussian synthesis of a noise record matching the target
/// amplitude spectral density: each FFT bin gets independent Gaussian
/// quadratures with variance (1/pi) * integral of S^2 over the bin, so the
/// record variance reproduces delta_rms^2 exactly in expectation. Coherent
/// tones are added with deterministic amplitude and a uniformly random phase
/// per trajectory. Deterministic given (seed, trajectory_index).
NoiseRealization synthesize(const SpectralDensity& sbeta, double duration,
                            double sample_rate, std::uint64_t seed,
                            std::uint64_t trajectory_index = 0);

/// Trajectory-averaged <cos phi> with phi integrated by the trapezoidal rule
/// against the sequence's toggled sign kernel. Bit-identical for any worker
/// count at a fixed seed. When phases_out is given it receives the
/// per-trajectory phases in trajectory order.
McEstimate estimate_coherence(const SpectralDensity& sbeta, const PulseSequence& seq,
                              const McOptions& options = {},
                              std::vector<double>* phases_out = nullptr);

namespace detail {
/// In-place radix-2 FFT, size must be a power of two; sign +1 applies
/// exp(+i 2 pi jk / N) (unnormalized inverse convention).
void fft_pow2(std::vector<std::complex<double>>& data, int sign);
} // namespace detail

} // namespace magnoise
