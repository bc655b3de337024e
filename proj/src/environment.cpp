#include "magnoise/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "magnoise/errors.hpp"

namespace magnoise {

namespace {

void check_tube(const MagnetizedTube& t) {
    if (!(t.length > 0.0)) throw ValidationError("tube: length must be > 0");
    if (!(t.inner_radius > 0.0) || !(t.outer_radius > t.inner_radius))
        throw ValidationError("tube: need 0 < inner radius < outer radius");
    if (!std::isfinite(t.susceptibility))
        throw ValidationError("tube: susceptibility must be finite");
    if (!(t.ambient_field > 0.0)) throw ValidationError("tube: ambient field must be > 0");
}

// on-axis field shape of a unit-surface-current finite solenoid sheet,
// radius R, length L centered at z = 0 (field in units of mu0*K/2)
double sheet_b(double R, double half_len, double z) {
    const double up = z + half_len;
    const double um = z - half_len;
    return up / std::sqrt(up * up + R * R) - um / std::sqrt(um * um + R * R);
}

double sheet_db_dz(double R, double half_len, double z) {
    const double up = z + half_len;
    const double um = z - half_len;
    const double r2 = R * R;
    return r2 / std::pow(up * up + r2, 1.5) - r2 / std::pow(um * um + r2, 1.5);
}

} // namespace

double TrapSolution::potential_energy(double r, double z) const {
    return 0.5 * mass * omega_z * omega_z * (z * z + beta_r * r * r);
}

TrapSolution trap_frequencies(const TrapConfig& cfg) {
    if (!(cfg.b0 > 0.0)) throw ValidationError("trap: B0 must be > 0");
    if (!(cfg.charge > 0.0)) throw ValidationError("trap: charge must be > 0");
    if (!(cfg.mass > 0.0)) throw ValidationError("trap: mass must be > 0");
    if (!(cfg.omega_z > 0.0)) throw ValidationError("trap: omega_z must be > 0");

    TrapSolution out;
    out.cyclotron = cfg.b0 * cfg.charge / cfg.mass;
    if (!(cfg.omega_r > 0.0) || !(cfg.omega_r < out.cyclotron))
        throw ValidationError("trap: need 0 < omega_r < cyclotron frequency");
    out.beta_r =
        cfg.omega_r * (out.cyclotron - cfg.omega_r) / (cfg.omega_z * cfg.omega_z) - 0.5;
    out.confining = out.beta_r > 0.0;
    out.mass = cfg.mass;
    out.omega_z = cfg.omega_z;
    return out;
}

double acoustic_fundamental(double length, double diameter, double speed) {
    if (!(length > 0.0) || !(diameter >= 0.0) || !(speed > 0.0))
        throw ValidationError("acoustics: need length > 0, diameter >= 0, speed > 0");
    return speed / (2.0 * length + 1.6 * diameter);
}

double multiplication_noise_db(double factor) {
    if (!(factor > 0.0))
        throw ValidationError("multiplication noise: factor must be > 0");
    return 20.0 * std::log10(factor);
}

GradientTable GradientTable::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open gradient table: " + path);
    GradientTable table;
    std::map<std::string, double*> fields{
        {"x", &table.x},          {"y", &table.y},
        {"z", &table.z},          {"xy", &table.xy},
        {"x2-y2", &table.x2_minus_y2}, {"x2+y2", &table.x2_plus_y2},
        {"z2", &table.z2},        {"sensitivity", &table.sensitivity}};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string row = line;
        std::replace(row.begin(), row.end(), ',', ' ');
        std::istringstream ss(row);
        std::string term;
        double value = 0.0;
        if (!(ss >> term >> value) || !std::isfinite(value))
            throw ParseError("expected 'term,value' in " + path, lineno);
        auto it = fields.find(term);
        if (it == fields.end())
            throw ParseError("unknown gradient term '" + term + "' in " + path, lineno);
        *it->second = std::abs(value); // bounds are worst-case magnitudes
    }
    return table;
}

DispersionReport gradient_dispersion(const GradientTable& table,
                                     const CrystalGeometry& crystal) {
    if (!(crystal.radius_mm > 0.0) || !(crystal.axial_extent_mm > 0.0))
        throw ValidationError("gradient dispersion: geometry must be positive");

    DispersionReport report;
    const double sens = table.sensitivity;

    // rotation leaves only x^2 + y^2; the field offset at radius r is c*r^2
    report.radial_spread_tesla = std::abs(table.x2_plus_y2) * crystal.radius_mm * crystal.radius_mm;
    report.radial_spread_hz = report.radial_spread_tesla * sens;

    // axial field b(z) = g_z z + g_z2 z^2 over z in [-h, h]; spread = max - min
    const double h = 0.5 * crystal.axial_extent_mm;
    const double gz = table.z;
    const double gz2 = table.z2;
    double b_min = std::min(gz * h + gz2 * h * h, -gz * h + gz2 * h * h);
    double b_max = std::max(gz * h + gz2 * h * h, -gz * h + gz2 * h * h);
    b_min = std::min(b_min, 0.0);
    b_max = std::max(b_max, 0.0);
    if (gz2 != 0.0) {
        const double z_vertex = -gz / (2.0 * gz2);
        if (std::abs(z_vertex) < h) {
            const double b_v = gz * z_vertex + gz2 * z_vertex * z_vertex;
            b_min = std::min(b_min, b_v);
            b_max = std::max(b_max, b_v);
        }
    }
    report.axial_spread_tesla = b_max - b_min;
    report.axial_spread_hz = report.axial_spread_tesla * sens;
    report.axial_linear_hz = std::abs(gz) * crystal.axial_extent_mm * sens;
    report.axial_quadratic_hz = std::abs(gz2) * h * h * sens;
    report.axial_sum_bound_hz = report.axial_linear_hz + report.axial_quadratic_hz;

    const double r = crystal.radius_mm;
    report.rotation_averaged = {
        {"x", std::abs(table.x) * r * sens},
        {"y", std::abs(table.y) * r * sens},
        {"xy", std::abs(table.xy) * r * r * sens},
        {"x2-y2", std::abs(table.x2_minus_y2) * r * r * sens},
    };
    return report;
}

DisplacementShift displacement_shift(const GradientTable& table, double displacement_mm) {
    if (!(displacement_mm >= 0.0))
        throw ValidationError("displacement shift: displacement must be >= 0");
    DisplacementShift shift;
    shift.shift_x_hz = std::abs(table.x) * displacement_mm * table.sensitivity;
    shift.shift_y_hz = std::abs(table.y) * displacement_mm * table.sensitivity;
    shift.shift_z_hz = std::abs(table.z) * displacement_mm * table.sensitivity;
    return shift;
}

TubeFieldSample tube_axial_field(const MagnetizedTube& tube, double z, double displacement) {
    check_tube(tube);
    // mu0 M = chi B; opposing sheets at the outer and inner radii
    const double scale = 0.5 * tube.susceptibility * tube.ambient_field;
    const double h = 0.5 * tube.length;
    TubeFieldSample s;
    s.b_z = scale * (sheet_b(tube.outer_radius, h, z) - sheet_b(tube.inner_radius, h, z));
    s.gradient =
        scale * (sheet_db_dz(tube.outer_radius, h, z) - sheet_db_dz(tube.inner_radius, h, z));
    s.fractional_shift = s.gradient * displacement / tube.ambient_field;
    return s;
}

TubePeak tube_peak_gradient(const MagnetizedTube& tube) {
    check_tube(tube);
    // |dB/dz| is even in z with extrema near the sheet ends; scan the
    // positive branch and refine by golden section
    const double z_max = 0.5 * tube.length + 5.0 * tube.outer_radius;
    const auto grad_at = [&](double z) { return tube_axial_field(tube, z).gradient; };

    double best_z = 0.0;
    double best = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double z = z_max * static_cast<double>(i) / n;
        const double g = std::abs(grad_at(z));
        if (g > best) {
            best = g;
            best_z = z;
        }
    }
    double a = std::max(0.0, best_z - z_max / n);
    double b = std::min(z_max, best_z + z_max / n);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = std::abs(grad_at(x1));
    double f2 = std::abs(grad_at(x2));
    for (int iter = 0; iter < 120; ++iter) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = std::abs(grad_at(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = std::abs(grad_at(x2));
        }
    }
    const double z_peak = 0.5 * (a + b);
    return {z_peak, grad_at(z_peak)};
}

double temperature_sensitivity(const MagnetizedTube& tube, double dchi_dt, double z) {
    check_tube(tube);
    if (!std::isfinite(dchi_dt))
        throw ValidationError("temperature sensitivity: dchi/dT must be finite");
    if (tube.susceptibility == 0.0) {
        MagnetizedTube unit = tube;
        unit.susceptibility = 1.0;
        return tube_axial_field(unit, z).b_z / unit.ambient_field * dchi_dt;
    }
    return tube_axial_field(tube, z).b_z / (tube.susceptibility * tube.ambient_field) *
           dchi_dt;
}

} // namespace magnoise
