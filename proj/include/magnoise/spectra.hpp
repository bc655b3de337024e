#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "magnoise/errors.hpp"

namespace magnoise {

/// Physical kind of a one-sided amplitude spectral density.
enum class DensityKind {
    Voltage,   // V/sqrt(Hz), e.g. pickup-coil emf
    Field,     // T/sqrt(Hz), magnetic field
    Frequency, // s^-1/sqrt(Hz), spin-frequency fluctuation
};

const char* to_string(DensityKind kind);
DensityKind density_kind_from_string(const std::string& name);

enum class FrequencyUnit { Hertz, RadiansPerSecond };

/// A discrete coherent tone. `amplitude` is a peak value in the natural unit
/// of the owning density's kind (V, T or rad/s), not a density.
struct Tone {
    double omega = 0.0;     // rad/s
    double amplitude = 0.0; // peak, kind units
};

/// One-sided amplitude spectral density on an angular-frequency axis.
///
/// Three representations: tabulated points (log-log interpolated, zero outside
/// the grid), an analytic power law a*omega^p on [omega_lo, omega_hi], or a
/// set of coherent tones. Immutable after construction.
class SpectralDensity {
public:
    struct Tabulated {
        std::vector<double> omega;     // strictly increasing, > 0
        std::vector<double> amplitude; // >= 0, kind units per sqrt(Hz)
    };
    struct PowerLaw {
        double coefficient = 0.0; // >= 0
        double exponent = 0.0;
        double omega_lo = 0.0;
        double omega_hi = 0.0; // may be +inf
    };
    struct ToneSet {
        std::vector<Tone> tones;
    };

    static SpectralDensity tabulated(DensityKind kind, std::vector<double> omega,
                                     std::vector<double> amplitude);
    static SpectralDensity power_law(DensityKind kind, double coefficient, double exponent,
                                     double omega_lo, double omega_hi);
    static SpectralDensity tones(DensityKind kind, std::vector<Tone> tones);

    DensityKind kind() const { return kind_; }

    bool is_tabulated() const { return std::holds_alternative<Tabulated>(rep_); }
    bool is_power_law() const { return std::holds_alternative<PowerLaw>(rep_); }
    bool is_tone_set() const { return std::holds_alternative<ToneSet>(rep_); }

    const Tabulated& as_tabulated() const;
    const PowerLaw& as_power_law() const;
    const ToneSet& as_tone_set() const;

    /// Density value at omega. Log-log interpolation inside a tabulated grid
    /// (linear fallback where an endpoint amplitude is zero), zero outside the
    /// support. Tone sets have no density; they evaluate to zero.
    double density_at(double omega) const;

    /// Continuous support [lo, hi]; {0, 0} for tone sets.
    std::pair<double, double> support() const;
    bool has_finite_support() const;

    /// Exact integral of density^2 over [a, b] under the interpolation model.
    double integrate_square(double a, double b) const;
    /// Integral of density^2 over the whole support. Throws ValidationError
    /// for divergent power laws (exponent >= -1/2 with infinite omega_hi).
    double integrate_square() const;

    /// Same grid and kind, amplitudes transformed point-wise (internal helper
    /// for unit conversions; f maps (omega, amplitude) -> amplitude).
    template <class F>
    SpectralDensity map_amplitudes(DensityKind new_kind, F&& f) const;

private:
    SpectralDensity(DensityKind kind, std::variant<Tabulated, PowerLaw, ToneSet> rep)
        : kind_(kind), rep_(std::move(rep)) {}

    DensityKind kind_;
    std::variant<Tabulated, PowerLaw, ToneSet> rep_;
};

/// Geometric coupling eta [m^2] between field amplitude and induced coil emf,
/// V/B = eta*omega. Scalar, or tabulated in omega and interpolated linearly
/// in log(omega) (clamped outside its grid).
class CouplingEta {
public:
    static CouplingEta scalar(double eta);
    static CouplingEta tabulated(std::vector<double> omega, std::vector<double> eta);

    double at(double omega) const;
    bool is_scalar() const { return omega_.empty(); }
    double scalar_value() const;

private:
    CouplingEta() = default;
    double scalar_ = 0.0;
    std::vector<double> omega_;
    std::vector<double> eta_;
};

/// A spin species: gyromagnetic ratio, static field, carrier frequency.
struct SpinSpecies {
    double gamma = 0.0;          // rad s^-1 T^-1, sign allowed
    double b0 = 0.0;             // T
    double carrier_offset = 0.0; // rad/s, e.g. hyperfine correction

    SpinSpecies(double gamma, double b0, double carrier_offset = 0.0);

    /// Larmor carrier Omega_0 = |gamma|*B0 + offset [rad/s].
    double carrier() const;

    static SpinSpecies electron(double b0, double carrier_offset = 0.0);
    /// Electron gamma scaled down by the Bohr/nuclear magneton ratio (~1836).
    static SpinSpecies nuclear(double b0, double carrier_offset = 0.0);
};

/// Load a two-column CSV (frequency, amplitude); `#` lines are comments.
SpectralDensity load_psd(const std::string& path, DensityKind kind, FrequencyUnit unit);
/// Emit a tabulated density in the symmetric CSV format (9 significant digits).
void save_psd(const SpectralDensity& sd, const std::string& path, FrequencyUnit unit);

/// S_B(omega) = S_V(omega) / (eta(omega) * omega).
SpectralDensity voltage_to_field(const SpectralDensity& sv, const CouplingEta& eta);
/// S_beta(omega) = |gamma| * S_B(omega).
SpectralDensity field_to_frequency(const SpectralDensity& sb, const SpinSpecies& spin);

template <class F>
SpectralDensity SpectralDensity::map_amplitudes(DensityKind new_kind, F&& f) const {
    if (const auto* tab = std::get_if<Tabulated>(&rep_)) {
        Tabulated out = *tab;
        for (std::size_t i = 0; i < out.omega.size(); ++i)
            out.amplitude[i] = f(out.omega[i], out.amplitude[i]);
        return SpectralDensity(new_kind, std::move(out));
    }
    if (const auto* ts = std::get_if<ToneSet>(&rep_)) {
        ToneSet out = *ts;
        for (auto& tone : out.tones) tone.amplitude = f(tone.omega, tone.amplitude);
        return SpectralDensity(new_kind, std::move(out));
    }
    throw ValidationError("map_amplitudes: power-law densities need an analytic transform");
}

} // namespace magnoise
