#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magnoise/sequences.hpp"
#include "magnoise/spectra.hpp"

namespace magnoise {

/// Deterministic phase contribution of one coherent tone, |phase| maximized
/// over the (unknown) tone phase offset.
struct TonePhase {
    double omega = 0.0;
    double phase = 0.0; // rad
};

/// Decay exponent chi(T) with its quadrature error estimate. Coherent tones
/// in the spectrum do not enter chi; they are listed separately.
struct ChiResult {
    double chi = 0.0;
    double quadrature_error = 0.0;
    std::vector<TonePhase> tone_phases;

    double coherence() const;
};

struct CurvePoint {
    double time = 0.0;    // total evolution time T [s]
    double sigma_y = 0.0; // <sigma_y(T)>, in [-1, 1]
    double err = 0.0;     // 1-sigma uncertainty, >= 0
};

/// Measured or predicted coherence-vs-time curve; times strictly increasing.
class CoherenceCurve {
public:
    CoherenceCurve() = default;
    explicit CoherenceCurve(std::vector<CurvePoint> points);

    const std::vector<CurvePoint>& points() const { return points_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    static CoherenceCurve load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

private:
    std::vector<CurvePoint> points_;
};

/// Sequence family with everything but tau fixed; tau = T / segments.
struct SequenceTemplate {
    int segments = 2;
    double pi_duration = PulseSequence::default_pi_duration;
    double analysis_phase = 0.0;

    PulseSequence at_total_time(double total_time) const;
};

struct ChiOptions {
    double rel_tol = 1e-10;
    std::size_t max_panels = 400000;
};

/// chi(T) = (1/2pi) * integral of S_beta^2(omega) F(omega, T) / omega^2,
/// by adaptive Gauss-Kronrod panels aligned to the tabulated grid and capped
/// at a quarter filter-lobe width pi/(2T).
ChiResult chi(const SpectralDensity& sbeta, const PulseSequence& seq,
              const ChiOptions& options = {});

/// Predicted curve <sigma_y>(T) = exp(-chi(T)); point err carries the
/// propagated quadrature error.
CoherenceCurve predict_curve(const SpectralDensity& sbeta, const SequenceTemplate& shape,
                             std::span<const double> times, const ChiOptions& options = {});

struct T2Result {
    bool reached = false;
    double t2 = 0.0;        // s, valid when reached
    CurvePoint last;        // last curve point (diagnostic when not reached)
};

/// First crossing of exp(-1), log-linear interpolation between bracketing
/// samples (the curve is implicitly anchored at (0, 1)).
T2Result extract_t2(const CoherenceCurve& curve);

struct RmsReport {
    double delta_rms = 0.0;    // rad/s
    double delta_rms_hz = 0.0; // delta_rms / 2pi
    std::optional<double> fractional; // delta_rms / Omega_0 when a species is given
};

/// delta_rms^2 = (1/pi) * integral of S_beta^2(omega) d omega.
RmsReport delta_rms(const SpectralDensity& sbeta,
                    const std::optional<SpinSpecies>& spin = std::nullopt);

struct EtaFitOptions {
    double eta_min = 0.1;   // m^2
    double eta_max = 1000.0;
    bool weighted = true;   // error-weighted when every point has err > 0
    ChiOptions chi_options{};
};

struct EtaFitReport {
    double eta = 0.0;          // m^2
    double uncertainty = 0.0;  // curvature-based 1-sigma, m^2 (0 if undefined)
    double residual = 0.0;     // (weighted) sum of squared residuals
    std::size_t n_points = 0;
    bool weighted = false;
    bool at_lower_bound = false;
    bool at_upper_bound = false;
};

/// Fit a scalar eta to a measured curve by least squares on <sigma_y>,
/// minimizing over log(eta) within [eta_min, eta_max].
EtaFitReport fit_eta_from_curve(const SpectralDensity& sv, const SpinSpecies& spin,
                                const SequenceTemplate& shape, const CoherenceCurve& measured,
                                const EtaFitOptions& options = {});

/// eta = 2 * |gamma| * V0 / (omega^2 * dphi/dm), from the synchronous
/// phase-accrual slope calibration.
double eta_from_phase_slope(double v0, double omega, double dphi_dm,
                            const SpinSpecies& spin);

} // namespace magnoise
