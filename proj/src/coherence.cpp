#include "magnoise/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "magnoise/constants.hpp"
#include "magnoise/quadrature.hpp"

namespace magnoise {

namespace {

using constants::pi;
using constants::two_pi;

// Breakpoints for the chi integrand: spectrum support and grid knots, each
// subinterval further split so no panel exceeds a quarter lobe pi/(2T).
std::vector<double> chi_breakpoints(const SpectralDensity& sbeta, double total_time,
                                    std::size_t max_panels) {
    auto [lo, hi] = sbeta.support();
    if (!(hi > lo)) return {};
    if (std::isinf(hi)) {
        // F/omega^2 is bounded by 4m^2/omega^2; truncate where the analytic
        // tail of the squared power law is negligible.
        const auto& p = sbeta.as_power_law();
        if (2.0 * p.exponent - 1.0 >= 0.0)
            throw ValidationError("chi: spectrum must decay faster than omega^(1/2) "
                                  "for an infinite support");
        hi = std::max(lo * 1e6, 1e4 / total_time);
    }

    std::vector<double> knots;
    knots.push_back(lo);
    if (sbeta.is_tabulated()) {
        for (double w : sbeta.as_tabulated().omega)
            if (w > lo && w < hi) knots.push_back(w);
    }
    knots.push_back(hi);

    const double cap = pi / (2.0 * total_time);
    std::size_t needed = 0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        needed += static_cast<std::size_t>((knots[i + 1] - knots[i]) / cap) + 1;
    if (needed > max_panels)
        throw NumericalError("chi: spectrum support times sequence length needs more "
                             "panels than the budget allows",
                             0.0, std::numeric_limits<double>::infinity());

    std::vector<double> breaks;
    breaks.reserve(needed + 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const auto n = static_cast<std::size_t>(std::ceil((b - a) / cap));
        breaks.push_back(a);
        for (std::size_t j = 1; j < n; ++j)
            breaks.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(n));
    }
    breaks.push_back(knots.back());
    return breaks;
}

double interp_t2(double t_lo, double s_lo, double t_hi, double s_hi) {
    const double target = std::exp(-1.0);
    if (s_lo > 0.0 && s_hi > 0.0) {
        const double f = (std::log(s_lo) + 1.0) / (std::log(s_lo) - std::log(s_hi));
        return t_lo + f * (t_hi - t_lo);
    }
    // non-positive sample: linear fallback
    return t_lo + (s_lo - target) / (s_lo - s_hi) * (t_hi - t_lo);
}

} // namespace

double ChiResult::coherence() const { return std::exp(-chi); }

CoherenceCurve::CoherenceCurve(std::vector<CurvePoint> points) : points_(std::move(points)) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& p : points_) {
        if (!std::isfinite(p.time) || p.time <= prev)
            throw ValidationError("coherence curve: times must be strictly increasing");
        if (!std::isfinite(p.sigma_y) || std::abs(p.sigma_y) > 1.0 + 1e-12)
            throw ValidationError("coherence curve: |sigma_y| must be <= 1");
        if (!std::isfinite(p.err) || p.err < 0.0)
            throw ValidationError("coherence curve: uncertainties must be >= 0");
        prev = p.time;
    }
}

CoherenceCurve CoherenceCurve::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open curve file: " + path);
    std::vector<CurvePoint> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string row = line;
        std::replace(row.begin(), row.end(), ',', ' ');
        std::istringstream fields(row);
        CurvePoint p;
        if (!(fields >> p.time >> p.sigma_y))
            throw ParseError("expected 2 or 3 numeric columns in " + path, lineno);
        if (!(fields >> p.err)) p.err = 0.0;
        std::string extra;
        if (fields >> extra) throw ParseError("trailing fields in " + path, lineno);
        pts.push_back(p);
    }
    return CoherenceCurve(std::move(pts));
}

void CoherenceCurve::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write curve file: " + path);
    out << "# columns: total_time_s, sigma_y, err\n";
    char buf[120];
    for (const auto& p : points_) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.time, p.sigma_y, p.err);
        out << buf;
    }
}

PulseSequence SequenceTemplate::at_total_time(double total_time) const {
    if (!(total_time > 0.0))
        throw ValidationError("sequence template: total time must be > 0");
    return PulseSequence(segments, total_time / segments, pi_duration, analysis_phase);
}

ChiResult chi(const SpectralDensity& sbeta, const PulseSequence& seq,
              const ChiOptions& options) {
    if (sbeta.kind() != DensityKind::Frequency)
        throw KindError("chi: spectrum kind is not frequency");

    ChiResult out;
    if (sbeta.is_tone_set()) {
        for (const auto& tone : sbeta.as_tone_set().tones) {
            const auto m = phase_accrual_delta_max(seq, tone.amplitude, tone.omega);
            out.tone_phases.push_back({tone.omega, m.phase});
        }
        return out;
    }

    const double total_time = seq.total_time();
    const auto breaks = chi_breakpoints(sbeta, total_time, options.max_panels);
    if (breaks.empty()) return out;

    const auto integrand = [&](double w) {
        const double s = sbeta.density_at(w);
        if (s == 0.0) return 0.0;
        return s * s * filter_function(seq, w) / (w * w);
    };
    const auto result =
        integrate_adaptive(integrand, breaks, options.rel_tol, 0.0, options.max_panels);
    out.chi = result.value / two_pi;
    out.quadrature_error = result.error_estimate / two_pi;
    if (out.chi < 0.0) out.chi = 0.0; // roundoff guard; the integrand is >= 0
    return out;
}

CoherenceCurve predict_curve(const SpectralDensity& sbeta, const SequenceTemplate& shape,
                             std::span<const double> times, const ChiOptions& options) {
    std::vector<CurvePoint> pts;
    pts.reserve(times.size());
    for (double t : times) {
        const auto c = chi(sbeta, shape.at_total_time(t), options);
        const double value = c.coherence();
        pts.push_back({t, value, value * c.quadrature_error});
    }
    return CoherenceCurve(std::move(pts));
}

T2Result extract_t2(const CoherenceCurve& curve) {
    if (curve.empty()) throw ValidationError("extract_t2: empty curve");
    const double target = std::exp(-1.0);
    const auto& pts = curve.points();

    // implicit anchor at (0, 1)
    double t_prev = 0.0, s_prev = 1.0;
    for (const auto& p : pts) {
        if (p.sigma_y <= target) {
            if (p.sigma_y == target) return {true, p.time, p};
            return {true, interp_t2(t_prev, s_prev, p.time, p.sigma_y), p};
        }
        t_prev = p.time;
        s_prev = p.sigma_y;
    }
    return {false, 0.0, pts.back()};
}

RmsReport delta_rms(const SpectralDensity& sbeta, const std::optional<SpinSpecies>& spin) {
    if (sbeta.kind() != DensityKind::Frequency)
        throw KindError("delta_rms: spectrum kind is not frequency");
    RmsReport out;
    out.delta_rms = std::sqrt(sbeta.integrate_square() / pi);
    out.delta_rms_hz = out.delta_rms / two_pi;
    if (spin) out.fractional = out.delta_rms / spin->carrier();
    return out;
}

EtaFitReport fit_eta_from_curve(const SpectralDensity& sv, const SpinSpecies& spin,
                                const SequenceTemplate& shape, const CoherenceCurve& measured,
                                const EtaFitOptions& options) {
    if (measured.empty()) throw ValidationError("fit_eta: empty coherence curve");
    if (!(options.eta_min > 0.0) || !(options.eta_max > options.eta_min))
        throw ValidationError("fit_eta: need 0 < eta_min < eta_max");

    const auto& pts = measured.points();
    bool all_flat = true;
    for (const auto& p : pts)
        if (p.sigma_y < 0.999) all_flat = false;
    if (all_flat)
        throw ValidationError("fit_eta: curve is flat at 1; eta is unidentifiable");

    bool weighted = options.weighted;
    for (const auto& p : pts)
        if (!(p.err > 0.0)) weighted = false;

    // chi depends on eta only through S_beta = |gamma| S_V / (eta omega), so
    // chi(T; eta) = chi_1(T) / eta^2 with chi_1 computed once at eta = 1.
    const auto s_unit = field_to_frequency(voltage_to_field(sv, CouplingEta::scalar(1.0)), spin);
    std::vector<double> chi_unit(pts.size());
    double chi_max = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        chi_unit[i] = chi(s_unit, shape.at_total_time(pts[i].time), options.chi_options).chi;
        chi_max = std::max(chi_max, chi_unit[i]);
    }
    if (chi_max <= 0.0)
        throw ValidationError("fit_eta: spectrum produces no dephasing over the "
                              "measured times; eta is unidentifiable");

    const auto loss = [&](double log_eta) {
        const double inv_eta2 = std::exp(-2.0 * log_eta);
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double model = std::exp(-chi_unit[i] * inv_eta2);
            double r = model - pts[i].sigma_y;
            if (weighted) r /= pts[i].err;
            total += r * r;
        }
        return total;
    };

    // golden-section minimization over log(eta)
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(options.eta_min);
    double b = std::log(options.eta_max);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = loss(x1);
    double f2 = loss(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12; ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = loss(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = loss(x2);
        }
    }
    const double log_eta = 0.5 * (a + b);

    EtaFitReport report;
    report.eta = std::exp(log_eta);
    report.residual = loss(log_eta);
    report.n_points = pts.size();
    report.weighted = weighted;
    const double span = std::log(options.eta_max) - std::log(options.eta_min);
    report.at_lower_bound = (log_eta - std::log(options.eta_min)) < 1e-6 * span;
    report.at_upper_bound = (std::log(options.eta_max) - log_eta) < 1e-6 * span;

    // curvature-based uncertainty: sigma_logeta = sqrt(2 / L'') for a
    // chi-square loss; finite differences around the minimum
    const double h = 1e-4;
    const double curvature = (loss(log_eta + h) + loss(log_eta - h) - 2.0 * report.residual) / (h * h);
    if (curvature > 0.0) report.uncertainty = report.eta * std::sqrt(2.0 / curvature);
    return report;
}

double eta_from_phase_slope(double v0, double omega, double dphi_dm,
                            const SpinSpecies& spin) {
    if (!(v0 > 0.0)) throw ValidationError("eta calibration: V0 must be > 0");
    if (!(omega > 0.0)) throw ValidationError("eta calibration: omega must be > 0");
    if (!(dphi_dm > 0.0) || !std::isfinite(dphi_dm))
        throw ValidationError("eta calibration: dphi/dm must be > 0");
    return 2.0 * std::abs(spin.gamma) * v0 / (omega * omega * dphi_dm);
}

} // namespace magnoise
