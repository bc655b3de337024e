#include "magnoise/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "magnoise/constants.hpp"

namespace magnoise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_grid(const std::vector<double>& omega, const std::vector<double>& amplitude) {
    if (omega.empty()) throw ValidationError("spectral density: empty grid");
    if (omega.size() != amplitude.size())
        throw ValidationError("spectral density: grid/amplitude size mismatch");
    double prev = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i]) || omega[i] <= prev)
            throw ValidationError("spectral density: grid must be strictly increasing and > 0");
        if (!std::isfinite(amplitude[i]) || amplitude[i] < 0.0)
            throw ValidationError("spectral density: amplitudes must be finite and >= 0");
        prev = omega[i];
    }
}

// integral of s^2 over [a, b] for s linear between (a, sa) and (b, sb)
double linear_square_integral(double a, double b, double sa, double sb) {
    return (b - a) * (sa * sa + sa * sb + sb * sb) / 3.0;
}

// integral of (s_ref * (w/w_ref)^q)^2 over [a, b], a > 0
double powerlaw_square_integral(double w_ref, double s_ref, double q, double a, double b) {
    const double sa = s_ref * std::pow(a / w_ref, q);
    const double p1 = 2.0 * q + 1.0;
    const double lr = std::log(b / a);
    // s(a)^2 * a * expm1(p1*log(b/a))/p1, stable as p1 -> 0
    const double factor = (p1 == 0.0) ? lr : std::expm1(p1 * lr) / p1;
    return sa * sa * a * factor;
}

} // namespace

const char* to_string(DensityKind kind) {
    switch (kind) {
        case DensityKind::Voltage: return "voltage";
        case DensityKind::Field: return "field";
        case DensityKind::Frequency: return "frequency";
    }
    return "?";
}

DensityKind density_kind_from_string(const std::string& name) {
    if (name == "voltage") return DensityKind::Voltage;
    if (name == "field") return DensityKind::Field;
    if (name == "frequency") return DensityKind::Frequency;
    throw ValidationError("unknown density kind: " + name);
}

SpectralDensity SpectralDensity::tabulated(DensityKind kind, std::vector<double> omega,
                                           std::vector<double> amplitude) {
    check_grid(omega, amplitude);
    return SpectralDensity(kind, Tabulated{std::move(omega), std::move(amplitude)});
}

SpectralDensity SpectralDensity::power_law(DensityKind kind, double coefficient, double exponent,
                                           double omega_lo, double omega_hi) {
    if (!std::isfinite(coefficient) || coefficient < 0.0)
        throw ValidationError("power law: coefficient must be finite and >= 0");
    if (!std::isfinite(exponent)) throw ValidationError("power law: exponent must be finite");
    if (!(omega_lo > 0.0) || !(omega_hi > omega_lo))
        throw ValidationError("power law: need 0 < omega_lo < omega_hi");
    return SpectralDensity(kind, PowerLaw{coefficient, exponent, omega_lo, omega_hi});
}

SpectralDensity SpectralDensity::tones(DensityKind kind, std::vector<Tone> tones) {
    if (tones.empty()) throw ValidationError("tone set: no tones");
    for (const auto& t : tones) {
        if (!(t.omega > 0.0) || !std::isfinite(t.omega))
            throw ValidationError("tone set: tone frequencies must be finite and > 0");
        if (!std::isfinite(t.amplitude) || t.amplitude < 0.0)
            throw ValidationError("tone set: tone amplitudes must be finite and >= 0");
    }
    std::sort(tones.begin(), tones.end(),
              [](const Tone& a, const Tone& b) { return a.omega < b.omega; });
    return SpectralDensity(kind, ToneSet{std::move(tones)});
}

const SpectralDensity::Tabulated& SpectralDensity::as_tabulated() const {
    if (const auto* t = std::get_if<Tabulated>(&rep_)) return *t;
    throw ValidationError("spectral density is not tabulated");
}

const SpectralDensity::PowerLaw& SpectralDensity::as_power_law() const {
    if (const auto* p = std::get_if<PowerLaw>(&rep_)) return *p;
    throw ValidationError("spectral density is not a power law");
}

const SpectralDensity::ToneSet& SpectralDensity::as_tone_set() const {
    if (const auto* t = std::get_if<ToneSet>(&rep_)) return *t;
    throw ValidationError("spectral density is not a tone set");
}

double SpectralDensity::density_at(double omega) const {
    if (const auto* p = std::get_if<PowerLaw>(&rep_)) {
        if (omega < p->omega_lo || omega > p->omega_hi) return 0.0;
        return p->coefficient * std::pow(omega, p->exponent);
    }
    if (const auto* tab = std::get_if<Tabulated>(&rep_)) {
        const auto& w = tab->omega;
        const auto& s = tab->amplitude;
        if (omega < w.front() || omega > w.back()) return 0.0;
        auto it = std::lower_bound(w.begin(), w.end(), omega);
        std::size_t i = static_cast<std::size_t>(it - w.begin());
        if (i < w.size() && w[i] == omega) return s[i];
        --i; // omega strictly inside cell (w[i], w[i+1])
        if (s[i] > 0.0 && s[i + 1] > 0.0) {
            const double q = std::log(s[i + 1] / s[i]) / std::log(w[i + 1] / w[i]);
            return s[i] * std::exp(q * std::log(omega / w[i]));
        }
        const double t = (omega - w[i]) / (w[i + 1] - w[i]);
        return s[i] + t * (s[i + 1] - s[i]);
    }
    return 0.0; // tone set: deltas carry no density
}

std::pair<double, double> SpectralDensity::support() const {
    if (const auto* p = std::get_if<PowerLaw>(&rep_)) return {p->omega_lo, p->omega_hi};
    if (const auto* t = std::get_if<Tabulated>(&rep_))
        return {t->omega.front(), t->omega.back()};
    return {0.0, 0.0};
}

bool SpectralDensity::has_finite_support() const {
    return std::isfinite(support().second);
}

double SpectralDensity::integrate_square(double a, double b) const {
    if (!(b > a)) return 0.0;
    if (const auto* p = std::get_if<PowerLaw>(&rep_)) {
        const double lo = std::max(a, p->omega_lo);
        const double hi = std::min(b, p->omega_hi);
        if (!(hi > lo) || p->coefficient == 0.0) return 0.0;
        if (std::isinf(hi)) {
            const double p1 = 2.0 * p->exponent + 1.0;
            if (p1 >= 0.0)
                throw ValidationError(
                    "divergent power-law integral: exponent >= -1/2 with infinite support");
            const double c2 = p->coefficient * p->coefficient;
            return -c2 * std::pow(lo, p1) / p1;
        }
        return powerlaw_square_integral(1.0, p->coefficient, p->exponent, lo, hi);
    }
    if (const auto* tab = std::get_if<Tabulated>(&rep_)) {
        const auto& w = tab->omega;
        const auto& s = tab->amplitude;
        const double lo = std::max(a, w.front());
        const double hi = std::min(b, w.back());
        if (!(hi > lo)) return 0.0;
        double total = 0.0;
        auto it = std::upper_bound(w.begin(), w.end(), lo);
        std::size_t i = static_cast<std::size_t>(it - w.begin());
        if (i > 0) --i;
        for (; i + 1 < w.size() && w[i] < hi; ++i) {
            const double ca = std::max(lo, w[i]);
            const double cb = std::min(hi, w[i + 1]);
            if (!(cb > ca)) continue;
            if (s[i] > 0.0 && s[i + 1] > 0.0) {
                const double q = std::log(s[i + 1] / s[i]) / std::log(w[i + 1] / w[i]);
                total += powerlaw_square_integral(w[i], s[i], q, ca, cb);
            } else {
                const double t0 = (ca - w[i]) / (w[i + 1] - w[i]);
                const double t1 = (cb - w[i]) / (w[i + 1] - w[i]);
                const double sa = s[i] + t0 * (s[i + 1] - s[i]);
                const double sb = s[i] + t1 * (s[i + 1] - s[i]);
                total += linear_square_integral(ca, cb, sa, sb);
            }
        }
        return total;
    }
    // Coherent tones: mean square of A*sin(wt+phi) is A^2/2; report the
    // pi-normalized equivalent so sqrt((1/pi) * integral) gives the RMS.
    const auto& ts = std::get<ToneSet>(rep_);
    double total = 0.0;
    for (const auto& t : ts.tones)
        if (t.omega >= a && t.omega <= b)
            total += constants::pi * 0.5 * t.amplitude * t.amplitude;
    return total;
}

double SpectralDensity::integrate_square() const {
    if (is_tone_set()) return integrate_square(0.0, kInf);
    auto [lo, hi] = support();
    return integrate_square(lo, hi);
}

CouplingEta CouplingEta::scalar(double eta) {
    if (!std::isfinite(eta) || eta <= 0.0)
        throw ValidationError("eta must be finite and > 0");
    CouplingEta out;
    out.scalar_ = eta;
    return out;
}

CouplingEta CouplingEta::tabulated(std::vector<double> omega, std::vector<double> eta) {
    if (omega.empty() || omega.size() != eta.size())
        throw ValidationError("tabulated eta: need equal-length, nonempty columns");
    double prev = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i]) || omega[i] <= prev)
            throw ValidationError("tabulated eta: grid must be strictly increasing and > 0");
        if (!std::isfinite(eta[i]) || eta[i] <= 0.0)
            throw ValidationError("tabulated eta: values must be finite and > 0");
        prev = omega[i];
    }
    CouplingEta out;
    out.omega_ = std::move(omega);
    out.eta_ = std::move(eta);
    return out;
}

double CouplingEta::at(double omega) const {
    if (is_scalar()) return scalar_;
    if (omega <= omega_.front()) return eta_.front();
    if (omega >= omega_.back()) return eta_.back();
    auto it = std::lower_bound(omega_.begin(), omega_.end(), omega);
    std::size_t i = static_cast<std::size_t>(it - omega_.begin());
    if (omega_[i] == omega) return eta_[i];
    --i;
    const double t = std::log(omega / omega_[i]) / std::log(omega_[i + 1] / omega_[i]);
    return eta_[i] + t * (eta_[i + 1] - eta_[i]);
}

double CouplingEta::scalar_value() const {
    if (!is_scalar()) throw ValidationError("eta is tabulated, not scalar");
    return scalar_;
}

SpinSpecies::SpinSpecies(double gamma_, double b0_, double carrier_offset_)
    : gamma(gamma_), b0(b0_), carrier_offset(carrier_offset_) {
    if (!std::isfinite(gamma) || gamma == 0.0)
        throw ValidationError("spin species: gamma must be nonzero");
    if (!std::isfinite(b0) || b0 <= 0.0)
        throw ValidationError("spin species: B0 must be > 0");
    if (!(carrier() > 0.0))
        throw ValidationError("spin species: carrier frequency must be > 0");
}

double SpinSpecies::carrier() const { return std::abs(gamma) * b0 + carrier_offset; }

SpinSpecies SpinSpecies::electron(double b0, double carrier_offset) {
    return SpinSpecies(constants::gamma_electron, b0, carrier_offset);
}

SpinSpecies SpinSpecies::nuclear(double b0, double carrier_offset) {
    return SpinSpecies(constants::gamma_electron / constants::magneton_ratio, b0,
                       carrier_offset);
}

SpectralDensity load_psd(const std::string& path, DensityKind kind, FrequencyUnit unit) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spectrum file: " + path);

    std::vector<double> omega;
    std::vector<double> amp;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ' || sv.back() == '\t'))
            sv.remove_suffix(1);
        if (sv.empty() || sv.front() == '#') continue;

        std::string row(sv);
        std::replace(row.begin(), row.end(), ',', ' ');
        std::istringstream fields(row);
        double f = 0.0, a = 0.0;
        std::string extra;
        if (!(fields >> f >> a) || (fields >> extra))
            throw ParseError("expected two numeric columns in " + path, lineno);
        if (!std::isfinite(f) || !std::isfinite(a))
            throw ParseError("non-finite value in " + path, lineno);
        omega.push_back(unit == FrequencyUnit::Hertz ? constants::two_pi * f : f);
        amp.push_back(a);
    }
    if (omega.empty()) throw ValidationError("spectrum file has no data rows: " + path);
    return SpectralDensity::tabulated(kind, std::move(omega), std::move(amp));
}

void save_psd(const SpectralDensity& sd, const std::string& path, FrequencyUnit unit) {
    const auto& tab = sd.as_tabulated();
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write spectrum file: " + path);
    out << "# one-sided amplitude spectral density\n";
    out << "# kind: " << to_string(sd.kind()) << "\n";
    out << "# columns: frequency_" << (unit == FrequencyUnit::Hertz ? "hz" : "rad_s")
        << ", amplitude\n";
    char buf[80];
    for (std::size_t i = 0; i < tab.omega.size(); ++i) {
        const double f = unit == FrequencyUnit::Hertz ? tab.omega[i] / constants::two_pi
                                                      : tab.omega[i];
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", f, tab.amplitude[i]);
        out << buf;
    }
}

SpectralDensity voltage_to_field(const SpectralDensity& sv, const CouplingEta& eta) {
    if (sv.kind() != DensityKind::Voltage)
        throw KindError("voltage_to_field: input kind is not voltage");
    if (sv.is_power_law()) {
        if (!eta.is_scalar())
            throw ValidationError(
                "voltage_to_field: power-law spectrum with tabulated eta has no closed form; "
                "tabulate the spectrum first");
        const auto& p = sv.as_power_law();
        return SpectralDensity::power_law(DensityKind::Field,
                                          p.coefficient / eta.scalar_value(), p.exponent - 1.0,
                                          p.omega_lo, p.omega_hi);
    }
    return sv.map_amplitudes(DensityKind::Field, [&eta](double omega, double a) {
        return a / (eta.at(omega) * omega);
    });
}

SpectralDensity field_to_frequency(const SpectralDensity& sb, const SpinSpecies& spin) {
    if (sb.kind() != DensityKind::Field)
        throw KindError("field_to_frequency: input kind is not field");
    const double g = std::abs(spin.gamma);
    if (sb.is_power_law()) {
        const auto& p = sb.as_power_law();
        return SpectralDensity::power_law(DensityKind::Frequency, g * p.coefficient,
                                          p.exponent, p.omega_lo, p.omega_hi);
    }
    return sb.map_amplitudes(DensityKind::Frequency,
                             [g](double, double a) { return g * a; });
}

} // namespace magnoise
