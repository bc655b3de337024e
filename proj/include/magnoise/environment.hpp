#pragma once

#include <string>
#include <vector>

namespace magnoise {

// ---------------------------------------------------------------------------
// Penning trap
// ---------------------------------------------------------------------------

struct TrapConfig {
    double b0 = 0.0;      // T
    double charge = 0.0;  // C
    double mass = 0.0;    // kg
    double omega_z = 0.0; // rad/s, axial COM frequency
    double omega_r = 0.0; // rad/s, crystal rotation frequency
};

struct TrapSolution {
    double cyclotron = 0.0; // Omega_c = B0 q / M [rad/s]
    double beta_r = 0.0;    // omega_r (Omega_c - omega_r) / omega_z^2 - 1/2
    bool confining = false; // beta_r > 0
    double mass = 0.0;
    double omega_z = 0.0;

    /// Rotating-frame trap potential energy q*phi(r,z) =
    /// (1/2) M omega_z^2 (z^2 + beta_r r^2) [J].
    double potential_energy(double r, double z) const;
};

/// beta_r <= 0 is reported as a non-confining warning result, not an error.
TrapSolution trap_frequencies(const TrapConfig& cfg);

// ---------------------------------------------------------------------------
// Acoustics and synthesis-chain arithmetic
// ---------------------------------------------------------------------------

/// Fundamental of an open hollow pipe with end correction:
/// f = v / (2L + 1.6 d).
double acoustic_fundamental(double length, double diameter, double speed);

/// Phase-noise increase of an ideal frequency multiplier: 20 log10(factor) dB.
double multiplication_noise_db(double factor);

// ---------------------------------------------------------------------------
// Field-gradient dispersion
// ---------------------------------------------------------------------------

/// Measured field-gradient coefficients in the magnet bore. Linear terms in
/// T/mm, quadratic terms in T/mm^2 (bound entries are worst-case magnitudes).
struct GradientTable {
    double x = 0.0, y = 0.0, z = 0.0;                        // T/mm
    double xy = 0.0, x2_minus_y2 = 0.0, x2_plus_y2 = 0.0;    // T/mm^2
    double z2 = 0.0;                                         // T/mm^2
    double sensitivity = 28e9;                               // Hz/T

    static GradientTable from_csv(const std::string& path);
};

struct CrystalGeometry {
    double radius_mm = 0.0;       // crystal radius
    double axial_extent_mm = 0.0; // full axial extent
};

struct AveragedTerm {
    std::string term;
    double pre_averaging_hz = 0.0; // magnitude before rotation averaging
};

struct DispersionReport {
    // rotation-surviving radial term: coefficient * radius^2
    double radial_spread_tesla = 0.0;
    double radial_spread_hz = 0.0;
    // axial z + z^2 polynomial over [-extent/2, extent/2]
    double axial_spread_tesla = 0.0;
    double axial_spread_hz = 0.0;
    double axial_linear_hz = 0.0;     // |g_z| * extent
    double axial_quadratic_hz = 0.0;  // |g_z2| * extent^2 / 4
    double axial_sum_bound_hz = 0.0;  // linear-sum upper bound
    // terms averaged to zero by crystal rotation, with pre-averaging size
    std::vector<AveragedTerm> rotation_averaged;
};

DispersionReport gradient_dispersion(const GradientTable& table,
                                     const CrystalGeometry& crystal);

struct DisplacementShift {
    double shift_x_hz = 0.0;
    double shift_y_hz = 0.0;
    double shift_z_hz = 0.0;
};

/// Spin-frequency change from a rigid crystal displacement along each linear
/// gradient; displacement in mm.
DisplacementShift displacement_shift(const GradientTable& table, double displacement_mm);

// ---------------------------------------------------------------------------
// Magnetized tube (permeable support structure in the bore)
// ---------------------------------------------------------------------------

/// A permeable cylinder shell, axially magnetized by the ambient field:
/// M = chi B / mu0, modelled as two opposing finite-solenoid current sheets
/// (surface current M at the outer radius, -M at the inner). On-axis only.
struct MagnetizedTube {
    double length = 0.0;         // m
    double outer_radius = 0.0;   // m
    double inner_radius = 0.0;   // m
    double susceptibility = 0.0; // dimensionless chi
    double ambient_field = 0.0;  // T
};

struct TubeFieldSample {
    double b_z = 0.0;             // T, field of the magnetized tube itself
    double gradient = 0.0;        // dB_z/dz [T/m]
    double fractional_shift = 0.0; // gradient * displacement / ambient field
};

/// z is measured from the tube center. Displacement feeds the fractional
/// shift (gradient * dz / B).
TubeFieldSample tube_axial_field(const MagnetizedTube& tube, double z,
                                 double displacement = 0.0);

struct TubePeak {
    double z = 0.0;        // m, location of max |dB_z/dz| (positive branch)
    double gradient = 0.0; // T/m, signed value at the peak
};

TubePeak tube_peak_gradient(const MagnetizedTube& tube);

/// Fractional field sensitivity to tube temperature, (1/B) dB/dT at axial
/// position z: the sheet field is linear in chi, so this is
/// (B_z(z)/chi) * dchi_dT / B.
double temperature_sensitivity(const MagnetizedTube& tube, double dchi_dt, double z);

} // namespace magnoise
