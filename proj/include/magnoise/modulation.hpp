#pragma once

#include <string>
#include <vector>

#include "magnoise/spectra.hpp"

namespace magnoise {

/// Single-tone FM of the Larmor carrier: B(t) = B0 + B_m sin(omega_m t).
struct ToneModulation {
    double fractional_amplitude = 0.0; // B_m / B0
    double omega_m = 0.0;              // rad/s
    double carrier = 0.0;              // Omega_0 [rad/s]
};

/// Modulation index beta_m = (B_m/B0) * (Omega_0 / omega_m).
double modulation_index(const ToneModulation& tone);

/// J_n(beta) for n = 0..n_max: power series for small argument, Miller
/// downward recurrence with sum normalization for large. Validated to
/// 1e-10 absolute for beta <= 50; larger beta is rejected.
std::vector<double> sideband_strengths(double beta_m, int n_max);

struct SidebandRow {
    std::string label;
    double beta_m = 0.0;
    double j0 = 0.0;
    double j1 = 0.0;
};

struct EsrNmrComparison {
    SidebandRow esr;
    SidebandRow nmr;
    double dephasing_ratio = 0.0; // chi_NMR / chi_ESR = (gamma_n / gamma_e)^2
};

/// The same fractional field tone applied to an electron and a nuclear spin;
/// each row's modulation index uses that species' own carrier.
EsrNmrComparison compare_esr_nmr(double fractional_amplitude, double omega_m,
                                 const SpinSpecies& electron, const SpinSpecies& nuclear);

} // namespace magnoise
