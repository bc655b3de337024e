// magnoise: analysis toolkit for vibration-induced magnetic-field noise in
// superconducting magnets. Subcommands cover coherence prediction from
// measured pickup-coil spectra, T2 and delta_rms extraction, eta calibration,
// a Monte-Carlo dephasing oracle, FM-sideband analysis, and bore-environment
// estimators.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magnoise/coherence.hpp"
#include "magnoise/constants.hpp"
#include "magnoise/environment.hpp"
#include "magnoise/manifest.hpp"
#include "magnoise/modulation.hpp"
#include "magnoise/montecarlo.hpp"
#include "magnoise/sequences.hpp"
#include "magnoise/spectra.hpp"

using json = nlohmann::ordered_json;
using namespace magnoise;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedEnvVar = "MAGNOISE_SEED";

std::string fmt9(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string fmt_round(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// shared flag groups
// ---------------------------------------------------------------------------

struct OutputFlags {
    bool pretty = false;
    std::string out_dir;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--pretty", pretty, "Human-readable table instead of JSON");
        cmd->add_option("--out", out_dir, "Directory for output artifacts");
    }

    fs::path ensure_dir() const {
        fs::create_directories(out_dir);
        return out_dir;
    }
};

struct SpeciesFlags {
    std::string species = "electron";
    double gamma = 0.0;      // rad/s/T, for --species custom
    double b0 = 4.46;        // T
    double carrier_hz = 0.0; // optional carrier pin, Hz

    void attach(CLI::App* cmd) {
        cmd->add_option("--species", species,
                        "Spin species: electron|nuclear|custom:<gamma rad/s/T>")
            ->capture_default_str();
        cmd->add_option("--gamma", gamma, "Gyromagnetic ratio for --species custom [rad/s/T]");
        cmd->add_option("--b0", b0, "Static field B0 [T]")->capture_default_str();
        cmd->add_option("--carrier", carrier_hz,
                        "Pin the carrier frequency [Hz] (sets the hyperfine offset)");
    }

    SpinSpecies make(RunManifest& manifest) const {
        double g = 0.0;
        if (species == "electron") {
            g = constants::gamma_electron;
        } else if (species == "nuclear") {
            g = constants::gamma_electron / constants::magneton_ratio;
        } else if (species.rfind("custom", 0) == 0) {
            if (species.size() > 7 && species[6] == ':')
                g = std::strtod(species.c_str() + 7, nullptr);
            else
                g = gamma;
            if (g == 0.0)
                throw ValidationError("custom species needs --gamma or custom:<gamma>");
        } else {
            throw ValidationError("unknown species: " + species);
        }
        double offset = 0.0;
        if (carrier_hz > 0.0) offset = constants::two_pi * carrier_hz - std::abs(g) * b0;
        const SpinSpecies spin(g, b0, offset);
        manifest.parameters["species"] = species;
        manifest.parameters["gamma_rad_s_t"] = fmt9(spin.gamma);
        manifest.parameters["b0_t"] = fmt9(spin.b0);
        manifest.parameters["carrier_hz"] = fmt9(spin.carrier() / constants::two_pi);
        return spin;
    }
};

struct SpectrumFlags {
    std::string psd_path;
    std::string kind = "voltage";
    std::string freq_unit = "hz";
    double eta = 0.0;
    std::string eta_table;

    void attach(CLI::App* cmd, bool fixed_voltage = false) {
        cmd->add_option("--psd", psd_path, "Spectrum CSV: frequency, amplitude")
            ->required()
            ->check(CLI::ExistingFile);
        if (!fixed_voltage)
            cmd->add_option("--kind", kind, "Density kind: voltage|field|frequency")
                ->capture_default_str();
        cmd->add_option("--freq-unit", freq_unit, "Frequency column unit: hz|rad")
            ->capture_default_str();
        cmd->add_option("--eta", eta, "Scalar coupling eta [m^2] (voltage input)");
        cmd->add_option("--eta-table", eta_table,
                        "Tabulated eta CSV: frequency, eta [m^2]")
            ->check(CLI::ExistingFile);
    }

    FrequencyUnit unit() const {
        if (freq_unit == "hz") return FrequencyUnit::Hertz;
        if (freq_unit == "rad") return FrequencyUnit::RadiansPerSecond;
        throw ValidationError("unknown frequency unit: " + freq_unit);
    }

    CouplingEta make_eta(RunManifest& manifest) const {
        if (!eta_table.empty()) {
            std::vector<double> w, e;
            const auto table = load_psd(eta_table, DensityKind::Voltage, unit());
            for (std::size_t i = 0; i < table.as_tabulated().omega.size(); ++i) {
                w.push_back(table.as_tabulated().omega[i]);
                e.push_back(table.as_tabulated().amplitude[i]);
            }
            manifest.add_input(eta_table);
            manifest.parameters["eta"] = "table:" + eta_table;
            return CouplingEta::tabulated(w, e);
        }
        if (eta <= 0.0)
            throw ValidationError("voltage spectra need --eta or --eta-table");
        manifest.parameters["eta_m2"] = fmt9(eta);
        return CouplingEta::scalar(eta);
    }

    SpectralDensity load(RunManifest& manifest) const {
        const auto sd = load_psd(psd_path, density_kind_from_string(kind), unit());
        manifest.add_input(psd_path);
        manifest.parameters["psd"] = psd_path;
        manifest.parameters["kind"] = kind;
        manifest.parameters["freq_unit"] = freq_unit;
        return sd;
    }

    /// Full pipeline to a frequency-fluctuation density.
    SpectralDensity load_as_frequency(const SpeciesFlags& species_flags,
                                      RunManifest& manifest) const {
        auto sd = load(manifest);
        if (sd.kind() == DensityKind::Voltage)
            sd = voltage_to_field(sd, make_eta(manifest));
        if (sd.kind() == DensityKind::Field)
            sd = field_to_frequency(sd, species_flags.make(manifest));
        return sd;
    }
};

struct SequenceFlags {
    int m = 2;
    double tau = 0.0;
    double pi_duration = PulseSequence::default_pi_duration;
    double theta = 0.0;

    void attach(CLI::App* cmd, bool with_tau) {
        cmd->add_option("--m", m, "Segment count (1 = Ramsey, 2 = spin echo)")
            ->capture_default_str();
        if (with_tau)
            cmd->add_option("--tau", tau, "Segment duration [s]")->required();
        cmd->add_option("--pi-duration", pi_duration, "Pi-pulse length [s]")
            ->capture_default_str();
        cmd->add_option("--theta", theta, "Final pi/2 analysis phase [rad]")
            ->capture_default_str();
    }

    PulseSequence make(RunManifest& manifest) const {
        const PulseSequence seq(m, tau, pi_duration, theta);
        manifest.parameters["m"] = std::to_string(m);
        manifest.parameters["tau_s"] = fmt9(tau);
        manifest.parameters["pi_duration_s"] = fmt9(pi_duration);
        manifest.parameters["theta_rad"] = fmt9(theta);
        return seq;
    }

    SequenceTemplate shape(RunManifest& manifest) const {
        manifest.parameters["m"] = std::to_string(m);
        manifest.parameters["pi_duration_s"] = fmt9(pi_duration);
        manifest.parameters["theta_rad"] = fmt9(theta);
        return SequenceTemplate{m, pi_duration, theta};
    }
};

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

json manifest_json(const RunManifest& manifest) {
    json out;
    out["subcommand"] = manifest.subcommand;
    out["version"] = manifest.version;
    out["parameters"] = json::object();
    for (const auto& [k, v] : manifest.parameters) out["parameters"][k] = v;
    out["inputs"] = json::object();
    for (const auto& [k, v] : manifest.input_digests) out["inputs"][k] = "fnv1a64:" + v;
    if (manifest.seed)
        out["seed"] = *manifest.seed;
    else
        out["seed"] = nullptr;
    return out;
}

void pretty_value(std::ostream& os, const std::string& key, const json& value,
                  const std::string& indent) {
    if (value.is_object()) {
        os << indent << key << ":\n";
        for (const auto& [k, v] : value.items()) pretty_value(os, k, v, indent + "  ");
        return;
    }
    if (value.is_array()) {
        os << indent << key << ":\n";
        std::size_t i = 0;
        for (const auto& v : value) pretty_value(os, "[" + std::to_string(i++) + "]", v, indent + "  ");
        return;
    }
    os << indent << key << " = ";
    if (value.is_number_float()) {
        const double x = value.get<double>();
        os << fmt9(x);
        const std::string rounded = fmt_round(x);
        if (rounded != fmt9(x)) os << "  (~" << rounded << ")";
    } else {
        os << value.dump();
    }
    os << "\n";
}

void emit(const std::string& subcommand, const json& result, const RunManifest& manifest,
          const OutputFlags& output) {
    json summary;
    summary["schema"] = 1;
    summary["subcommand"] = subcommand;
    summary["result"] = result;
    summary["manifest"] = manifest_json(manifest);

    if (!output.out_dir.empty()) {
        std::ofstream mf(output.ensure_dir() / "manifest.json");
        mf << summary["manifest"].dump(2) << "\n";
    }

    if (output.pretty) {
        std::cout << subcommand << "\n";
        for (const auto& [k, v] : result.items()) pretty_value(std::cout, k, v, "  ");
    } else {
        std::cout << summary.dump(2) << "\n";
    }
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnvVar)) {
        char* end = nullptr;
        const auto value = std::strtoull(env, &end, 10);
        if (end != env) return value;
    }
    return 1;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct PredictCmd {
    SpectrumFlags spectrum;
    SpeciesFlags species;
    SequenceFlags sequence;
    OutputFlags output;
    double t_start = 1e-3, t_stop = 20e-3;
    int t_points = 41;
    bool linear = false;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "predict";
        const auto sbeta = spectrum.load_as_frequency(species, manifest);
        const auto shape = sequence.shape(manifest);
        if (!(t_stop > t_start) || t_points < 2)
            throw ValidationError("predict: need t-stop > t-start > 0 and t-points >= 2");
        manifest.parameters["t_start_s"] = fmt9(t_start);
        manifest.parameters["t_stop_s"] = fmt9(t_stop);
        manifest.parameters["t_points"] = std::to_string(t_points);
        manifest.parameters["spacing"] = linear ? "linear" : "log";

        std::vector<double> times(t_points);
        for (int i = 0; i < t_points; ++i) {
            const double f = static_cast<double>(i) / (t_points - 1);
            times[i] = linear ? t_start + (t_stop - t_start) * f
                              : t_start * std::pow(t_stop / t_start, f);
        }
        const auto curve = predict_curve(sbeta, shape, times);
        const auto t2 = extract_t2(curve);

        json result;
        result["points"] = curve.size();
        result["t2_reached"] = t2.reached;
        if (t2.reached)
            result["t2_s"] = t2.t2;
        else
            result["t2_s"] = nullptr;
        if (sbeta.is_tone_set())
            result["note"] = "tone-set spectrum: coherent tones add deterministic phase, "
                             "not stochastic decay; see the mc and chi tone output";
        if (!output.out_dir.empty()) {
            const auto path = output.ensure_dir() / "curve.csv";
            curve.save_csv(path.string());
            result["curve_csv"] = path.string();
        } else {
            json pts = json::array();
            for (const auto& p : curve.points())
                pts.push_back({p.time, p.sigma_y, p.err});
            result["curve"] = pts;
        }
        emit("predict", result, manifest, output);
    }
};

struct T2Cmd {
    std::string curve_path;
    OutputFlags output;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "t2";
        manifest.add_input(curve_path);
        manifest.parameters["curve"] = curve_path;
        const auto curve = CoherenceCurve::load_csv(curve_path);
        const auto t2 = extract_t2(curve);
        json result;
        result["t2_reached"] = t2.reached;
        if (t2.reached)
            result["t2_s"] = t2.t2;
        else
            result["t2_s"] = nullptr;
        result["last_time_s"] = t2.last.time;
        result["last_sigma_y"] = t2.last.sigma_y;
        emit("t2", result, manifest, output);
    }
};

struct RmsCmd {
    SpectrumFlags spectrum;
    SpeciesFlags species;
    OutputFlags output;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "rms";
        const auto sbeta = spectrum.load_as_frequency(species, manifest);
        // fractional always reported against the configured species carrier
        RunManifest scratch;
        const auto spin = species.make(scratch);
        for (const auto& [k, v] : scratch.parameters) manifest.parameters[k] = v;
        const auto report = delta_rms(sbeta, spin);
        json result;
        result["delta_rms_rad_s"] = report.delta_rms;
        result["delta_rms_hz"] = report.delta_rms_hz;
        result["fractional"] = *report.fractional;
        result["fractional_ppb"] = *report.fractional * 1e9;
        emit("rms", result, manifest, output);
    }
};

struct FitEtaCmd {
    SpectrumFlags spectrum;
    SpeciesFlags species;
    SequenceFlags sequence;
    OutputFlags output;
    std::string curve_path;
    double eta_min = 0.1, eta_max = 1000.0;
    bool unweighted = false;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "fit-eta";
        const auto sv = spectrum.load(manifest);
        const auto spin = species.make(manifest);
        const auto shape = sequence.shape(manifest);
        manifest.add_input(curve_path);
        manifest.parameters["curve"] = curve_path;
        manifest.parameters["eta_min_m2"] = fmt9(eta_min);
        manifest.parameters["eta_max_m2"] = fmt9(eta_max);
        manifest.parameters["weighting"] = unweighted ? "unweighted" : "error-weighted";
        const auto curve = CoherenceCurve::load_csv(curve_path);
        EtaFitOptions options;
        options.eta_min = eta_min;
        options.eta_max = eta_max;
        options.weighted = !unweighted;
        const auto fit = fit_eta_from_curve(sv, spin, shape, curve, options);
        json result;
        result["eta_m2"] = fit.eta;
        result["uncertainty_m2"] = fit.uncertainty;
        result["residual"] = fit.residual;
        result["n_points"] = fit.n_points;
        result["weighted"] = fit.weighted;
        result["at_lower_bound"] = fit.at_lower_bound;
        result["at_upper_bound"] = fit.at_upper_bound;
        emit("fit-eta", result, manifest, output);
    }
};

struct CalibrateEtaCmd {
    SpeciesFlags species;
    OutputFlags output;
    double v0 = 0.0;
    double freq_hz = 0.0;
    double omega = 0.0;
    double dphi_dm = 0.0;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "calibrate-eta";
        const auto spin = species.make(manifest);
        const double w = omega > 0.0 ? omega : constants::two_pi * freq_hz;
        if (!(w > 0.0)) throw ValidationError("calibrate-eta: need --freq or --omega");
        manifest.parameters["v0_v"] = fmt9(v0);
        manifest.parameters["omega_rad_s"] = fmt9(w);
        manifest.parameters["dphi_dm_rad"] = fmt9(dphi_dm);
        json result;
        result["eta_m2"] = eta_from_phase_slope(v0, w, dphi_dm, spin);
        emit("calibrate-eta", result, manifest, output);
    }
};

struct McCmd {
    SpectrumFlags spectrum;
    SpeciesFlags species;
    SequenceFlags sequence;
    OutputFlags output;
    std::uint64_t trajectories = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double sample_rate = 0.0;
    double duration_factor = 16.0;
    unsigned workers = 0;
    bool deadtime = false;
    std::string dump_phases;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "mc";
        const auto sbeta = spectrum.load_as_frequency(species, manifest);
        const auto seq = sequence.make(manifest);
        McOptions options;
        options.trajectories = trajectories;
        options.seed = seed_given ? seed : default_seed();
        options.sample_rate = sample_rate;
        options.duration_factor = duration_factor;
        options.workers = workers;
        options.finite_pulse_deadtime = deadtime;
        manifest.seed = options.seed;
        manifest.parameters["trajectories"] = std::to_string(trajectories);
        manifest.parameters["sample_rate_hz"] = fmt9(sample_rate);
        manifest.parameters["duration_factor"] = fmt9(duration_factor);
        manifest.parameters["finite_pulse_deadtime"] = deadtime ? "true" : "false";

        std::vector<double> phases;
        const auto est = estimate_coherence(sbeta, seq, options,
                                            dump_phases.empty() ? nullptr : &phases);
        const auto analytic = chi(sbeta, seq);

        json result;
        result["coherence"] = est.coherence;
        result["std_error"] = est.std_error;
        result["mean_phase_rad"] = est.mean_phase;
        result["mean_phase_sq"] = est.mean_phase_sq;
        result["trajectories"] = est.trajectories;
        result["analytic_chi"] = analytic.chi;
        result["analytic_coherence"] = analytic.coherence();
        if (!analytic.tone_phases.empty()) {
            json tones = json::array();
            for (const auto& t : analytic.tone_phases)
                tones.push_back({{"omega_rad_s", t.omega}, {"phase_rad", t.phase}});
            result["tone_phases"] = tones;
        }
        if (!dump_phases.empty()) {
            std::ofstream out(dump_phases);
            if (!out) throw ValidationError("cannot write phase dump: " + dump_phases);
            out << "# columns: trajectory, phase_rad\n";
            char buf[64];
            for (std::size_t j = 0; j < phases.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%zu,%.9g\n", j, phases[j]);
                out << buf;
            }
            result["phases_csv"] = dump_phases;
        }
        emit("mc", result, manifest, output);
    }
};

struct ModulationCmd {
    OutputFlags output;
    double fractional_amplitude = 0.0;
    double mod_freq_hz = 0.0;
    double carrier_hz = 0.0;
    std::string species;
    int n_max = 10;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "modulation";
        manifest.parameters["fractional_amplitude"] = fmt9(fractional_amplitude);
        manifest.parameters["mod_freq_hz"] = fmt9(mod_freq_hz);
        manifest.parameters["carrier_hz"] = fmt9(carrier_hz);
        const double omega_m = constants::two_pi * mod_freq_hz;
        const double carrier = constants::two_pi * carrier_hz;

        json rows = json::array();
        json result;
        if (species.empty()) {
            // Table-style two-row comparison: electron vs nuclear at the same
            // fractional field tone
            const double b0 = carrier / constants::gamma_electron;
            const auto cmp = compare_esr_nmr(fractional_amplitude, omega_m,
                                             SpinSpecies::electron(b0),
                                             SpinSpecies::nuclear(b0));
            for (const auto& row : {cmp.esr, cmp.nmr})
                rows.push_back({{"label", row.label},
                                {"beta_m", row.beta_m},
                                {"j0", row.j0},
                                {"j1", row.j1}});
            result["rows"] = rows;
            result["dephasing_ratio"] = cmp.dephasing_ratio;
        } else {
            manifest.parameters["species"] = species;
            double scale = 1.0;
            if (species == "nuclear") scale = 1.0 / constants::magneton_ratio;
            else if (species.rfind("custom:", 0) == 0)
                scale = std::strtod(species.c_str() + 7, nullptr) / constants::gamma_electron;
            else if (species != "electron")
                throw ValidationError("unknown species: " + species);
            const double beta =
                modulation_index({fractional_amplitude, omega_m, carrier * scale});
            const auto j = sideband_strengths(beta, n_max);
            rows.push_back({{"label", species}, {"beta_m", beta}, {"j0", j[0]}, {"j1", n_max >= 1 ? j[1] : 0.0}});
            result["rows"] = rows;
            json sidebands = json::array();
            for (const auto& v : j) sidebands.push_back(v);
            result["sidebands"] = sidebands;
        }

        if (!output.out_dir.empty()) {
            const auto path = output.ensure_dir() / "modulation.csv";
            std::ofstream csv(path);
            csv << "# columns: label, beta_m, j0, j1\n";
            for (const auto& row : rows)
                csv << row["label"].get<std::string>() << ","
                    << fmt9(row["beta_m"].get<double>()) << ","
                    << fmt9(row["j0"].get<double>()) << ","
                    << fmt9(row["j1"].get<double>()) << "\n";
            result["csv"] = path.string();
        }
        emit("modulation", result, manifest, output);
    }
};

struct TrapCmd {
    OutputFlags output;
    double b0 = 4.46;
    double mass_amu = 9.0122;
    double charge_e = 1.0;
    double fz_hz = 800e3;
    double fr_hz = 45e3;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "trap";
        manifest.parameters["b0_t"] = fmt9(b0);
        manifest.parameters["mass_amu"] = fmt9(mass_amu);
        manifest.parameters["charge_e"] = fmt9(charge_e);
        manifest.parameters["fz_hz"] = fmt9(fz_hz);
        manifest.parameters["fr_hz"] = fmt9(fr_hz);
        const TrapConfig cfg{b0, charge_e * constants::elementary_charge,
                             mass_amu * constants::atomic_mass_unit,
                             constants::two_pi * fz_hz, constants::two_pi * fr_hz};
        const auto sol = trap_frequencies(cfg);
        json result;
        result["cyclotron_hz"] = sol.cyclotron / constants::two_pi;
        result["beta_r"] = sol.beta_r;
        result["confining"] = sol.confining;
        if (!sol.confining)
            result["warning"] = "beta_r <= 0: no radial confinement at these settings";
        emit("trap", result, manifest, output);
    }
};

struct AcousticsCmd {
    OutputFlags output;
    double length = 1.0;
    double diameter = 0.127;
    double speed = 343.0;
    double multiplier = 0.0;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "acoustics";
        manifest.parameters["length_m"] = fmt9(length);
        manifest.parameters["diameter_m"] = fmt9(diameter);
        manifest.parameters["speed_m_s"] = fmt9(speed);
        json result;
        result["fundamental_hz"] = acoustic_fundamental(length, diameter, speed);
        if (multiplier > 0.0) {
            manifest.parameters["multiplier"] = fmt9(multiplier);
            result["multiplication_db"] = multiplication_noise_db(multiplier);
        }
        emit("acoustics", result, manifest, output);
    }
};

struct GradientsCmd {
    OutputFlags output;
    std::string table_path;
    double radius_mm = 0.25;
    double extent_mm = 0.06;
    double displacement_mm = 0.0;
    double sensitivity = 0.0;

    static GradientTable builtin_table() {
        GradientTable t;
        t.x = 0.42e-6;
        t.y = 0.78e-6;
        t.xy = 0.2e-6;
        t.x2_minus_y2 = 0.2e-6;
        t.x2_plus_y2 = 0.1e-6;
        t.z = 0.03e-6;
        t.z2 = 0.2e-6;
        return t;
    }

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "gradients";
        GradientTable table;
        if (table_path.empty()) {
            table = builtin_table();
            manifest.parameters["table"] = "builtin";
        } else {
            table = GradientTable::from_csv(table_path);
            manifest.add_input(table_path);
            manifest.parameters["table"] = table_path;
        }
        if (sensitivity > 0.0) table.sensitivity = sensitivity;
        manifest.parameters["sensitivity_hz_t"] = fmt9(table.sensitivity);
        manifest.parameters["radius_mm"] = fmt9(radius_mm);
        manifest.parameters["extent_mm"] = fmt9(extent_mm);

        const auto report = gradient_dispersion(table, {radius_mm, extent_mm});
        json result;
        result["radial_spread_hz"] = report.radial_spread_hz;
        result["radial_spread_t"] = report.radial_spread_tesla;
        result["axial_spread_hz"] = report.axial_spread_hz;
        result["axial_linear_hz"] = report.axial_linear_hz;
        result["axial_quadratic_hz"] = report.axial_quadratic_hz;
        result["axial_sum_bound_hz"] = report.axial_sum_bound_hz;
        json averaged = json::array();
        for (const auto& term : report.rotation_averaged)
            averaged.push_back({{"term", term.term},
                                {"spread_hz", 0.0},
                                {"pre_averaging_hz", term.pre_averaging_hz}});
        result["rotation_averaged"] = averaged;
        if (displacement_mm > 0.0) {
            manifest.parameters["displacement_mm"] = fmt9(displacement_mm);
            const auto shift = displacement_shift(table, displacement_mm);
            result["displacement_shift_hz"] = {{"x", shift.shift_x_hz},
                                               {"y", shift.shift_y_hz},
                                               {"z", shift.shift_z_hz}};
        }
        emit("gradients", result, manifest, output);
    }
};

struct TubeCmd {
    OutputFlags output;
    double length = 0.05;
    double outer_diameter = 0.125;
    double inner_diameter = 0.075;
    double chi = 2.22e-5;
    double field = 4.5;
    double displacement = 3e-6;
    double carrier_hz = 124.05e9;
    double z = std::numeric_limits<double>::quiet_NaN();
    double dchi_dt = 0.0;

    void run() const {
        RunManifest manifest;
        manifest.subcommand = "tube";
        const MagnetizedTube tube{length, 0.5 * outer_diameter, 0.5 * inner_diameter, chi,
                                  field};
        manifest.parameters["length_m"] = fmt9(length);
        manifest.parameters["outer_diameter_m"] = fmt9(outer_diameter);
        manifest.parameters["inner_diameter_m"] = fmt9(inner_diameter);
        manifest.parameters["chi"] = fmt9(chi);
        manifest.parameters["field_t"] = fmt9(field);
        manifest.parameters["displacement_m"] = fmt9(displacement);
        manifest.parameters["carrier_hz"] = fmt9(carrier_hz);

        json result;
        double z_eval = z;
        if (std::isnan(z_eval)) {
            const auto peak = tube_peak_gradient(tube);
            z_eval = peak.z;
            result["peak_z_m"] = peak.z;
        } else {
            manifest.parameters["z_m"] = fmt9(z);
        }
        const auto sample = tube_axial_field(tube, z_eval, displacement);
        result["z_m"] = z_eval;
        result["b_z_t"] = sample.b_z;
        result["gradient_t_m"] = sample.gradient;
        result["fractional_shift"] = sample.fractional_shift;
        result["shift_hz"] = sample.fractional_shift * carrier_hz;
        if (dchi_dt != 0.0) {
            manifest.parameters["dchi_dt"] = fmt9(dchi_dt);
            result["temperature_sensitivity_per_k"] =
                temperature_sensitivity(tube, dchi_dt, z_eval);
        }
        result["caveat"] =
            "on-axis sheet-model estimate; fields at the ion site are expected "
            "20-30% smaller";
        emit("tube", result, manifest, output);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic-field-noise analysis for spin coherence in "
                 "superconducting magnets"};
    app.name("magnoise");
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", version_string);
    app.set_config("--config", "", "Read options from an INI/TOML config file");
    app.fallthrough(false);

    PredictCmd predict_cmd;
    auto* predict = app.add_subcommand(
        "predict", "Predict a coherence curve <sigma_y>(T) from a noise spectrum");
    predict_cmd.spectrum.attach(predict);
    predict_cmd.species.attach(predict);
    predict_cmd.sequence.attach(predict, false);
    predict_cmd.output.attach(predict);
    predict->add_option("--t-start", predict_cmd.t_start, "First total evolution time [s]")
        ->capture_default_str();
    predict->add_option("--t-stop", predict_cmd.t_stop, "Last total evolution time [s]")
        ->capture_default_str();
    predict->add_option("--t-points", predict_cmd.t_points, "Number of curve points")
        ->capture_default_str();
    predict->add_flag("--linear", predict_cmd.linear,
                      "Linear time spacing (default: logarithmic)");
    predict->callback([&] { predict_cmd.run(); });

    T2Cmd t2_cmd;
    auto* t2 = app.add_subcommand("t2", "Extract T2 from a measured coherence curve");
    t2->add_option("--curve", t2_cmd.curve_path, "Curve CSV: time, sigma_y[, err]")
        ->required()
        ->check(CLI::ExistingFile);
    t2_cmd.output.attach(t2);
    t2->callback([&] { t2_cmd.run(); });

    RmsCmd rms_cmd;
    auto* rms = app.add_subcommand(
        "rms", "RMS spin-frequency deviation delta_rms implied by a spectrum");
    rms_cmd.spectrum.attach(rms);
    rms_cmd.species.attach(rms);
    rms_cmd.output.attach(rms);
    rms->callback([&] { rms_cmd.run(); });

    FitEtaCmd fit_cmd;
    auto* fit = app.add_subcommand(
        "fit-eta", "Fit the coupling eta to a measured coherence curve");
    fit_cmd.spectrum.attach(fit, true);
    fit->add_option("--curve", fit_cmd.curve_path, "Measured curve CSV")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd.species.attach(fit);
    fit_cmd.sequence.attach(fit, false);
    fit->add_option("--eta-min", fit_cmd.eta_min, "Lower fit bound [m^2]")
        ->capture_default_str();
    fit->add_option("--eta-max", fit_cmd.eta_max, "Upper fit bound [m^2]")
        ->capture_default_str();
    fit->add_flag("--unweighted", fit_cmd.unweighted, "Ignore measurement uncertainties");
    fit_cmd.output.attach(fit);
    fit->callback([&] { fit_cmd.run(); });

    CalibrateEtaCmd cal_cmd;
    auto* cal = app.add_subcommand(
        "calibrate-eta", "eta from the synchronous phase-accrual slope dphi/dm");
    cal->add_option("--v0", cal_cmd.v0, "Pickup-coil amplitude V0 [V]")->required();
    cal->add_option("--freq", cal_cmd.freq_hz, "Drive frequency [Hz]");
    cal->add_option("--omega", cal_cmd.omega, "Drive frequency [rad/s]");
    cal->add_option("--dphi-dm", cal_cmd.dphi_dm, "Phase slope per segment [rad]")
        ->required();
    cal_cmd.species.attach(cal);
    cal_cmd.output.attach(cal);
    cal->callback([&] { cal_cmd.run(); });

    McCmd mc_cmd;
    auto* mc = app.add_subcommand(
        "mc", "Monte-Carlo dephasing estimate <cos phi> for a spectrum and sequence");
    mc_cmd.spectrum.attach(mc);
    mc_cmd.species.attach(mc);
    mc_cmd.sequence.attach(mc, true);
    mc->add_option("--traj", mc_cmd.trajectories, "Trajectory count")
        ->capture_default_str();
    auto* seed_opt = mc->add_option("--seed", mc_cmd.seed,
                                    "Master seed (default: $MAGNOISE_SEED or 1)");
    mc->add_option("--sample-rate", mc_cmd.sample_rate,
                   "Sample rate [Hz] (0: 16x the spectral support)")
        ->capture_default_str();
    mc->add_option("--duration-factor", mc_cmd.duration_factor,
                   "Synthesized record length in units of the sequence time")
        ->capture_default_str();
    mc->add_option("--workers", mc_cmd.workers, "Worker threads (0: hardware)")
        ->capture_default_str();
    mc->add_flag("--deadtime", mc_cmd.deadtime,
                 "Model pi pulses as y(t)=0 windows of the pi duration");
    mc->add_option("--dump-phases", mc_cmd.dump_phases, "Write per-trajectory phases CSV");
    mc_cmd.output.attach(mc);
    mc->callback([&] {
        mc_cmd.seed_given = seed_opt->count() > 0;
        mc_cmd.run();
    });

    ModulationCmd mod_cmd;
    auto* mod = app.add_subcommand(
        "modulation", "FM sideband analysis of a single field tone on the carrier");
    mod->add_option("--fractional-amplitude", mod_cmd.fractional_amplitude,
                    "Tone amplitude B_m/B0")
        ->required();
    mod->add_option("--mod-freq", mod_cmd.mod_freq_hz, "Tone frequency [Hz]")->required();
    mod->add_option("--carrier", mod_cmd.carrier_hz, "Electron-spin carrier [Hz]")
        ->required();
    mod->add_option("--species", mod_cmd.species,
                    "electron|nuclear|custom:<gamma> (default: ESR and NMR rows)");
    mod->add_option("--n-max", mod_cmd.n_max, "Highest sideband order to list")
        ->capture_default_str();
    mod_cmd.output.attach(mod);
    mod->callback([&] { mod_cmd.run(); });

    TrapCmd trap_cmd;
    auto* trap = app.add_subcommand("trap", "Penning-trap frequencies and beta_r");
    trap->add_option("--b0", trap_cmd.b0, "Static field [T]")->capture_default_str();
    trap->add_option("--mass-amu", trap_cmd.mass_amu, "Ion mass [u]")->capture_default_str();
    trap->add_option("--charge", trap_cmd.charge_e, "Ion charge [e]")->capture_default_str();
    trap->add_option("--fz", trap_cmd.fz_hz, "Axial COM frequency [Hz]")
        ->capture_default_str();
    trap->add_option("--fr", trap_cmd.fr_hz, "Rotation frequency [Hz]")
        ->capture_default_str();
    trap_cmd.output.attach(trap);
    trap->callback([&] { trap_cmd.run(); });

    AcousticsCmd ac_cmd;
    auto* ac = app.add_subcommand("acoustics", "Open-pipe bore resonance estimate");
    ac->add_option("--length", ac_cmd.length, "Bore length [m]")->capture_default_str();
    ac->add_option("--diameter", ac_cmd.diameter, "Bore diameter [m]")
        ->capture_default_str();
    ac->add_option("--speed", ac_cmd.speed, "Speed of sound [m/s]")->capture_default_str();
    ac->add_option("--multiplier", ac_cmd.multiplier,
                   "Also report 20*log10(N) multiplication phase-noise growth");
    ac_cmd.output.attach(ac);
    ac->callback([&] { ac_cmd.run(); });

    GradientsCmd grad_cmd;
    auto* grad = app.add_subcommand(
        "gradients", "Spin-frequency dispersion from measured field gradients");
    grad->add_option("--table", grad_cmd.table_path,
                     "Gradient CSV: term, value (T/mm or T/mm^2); default: built-in")
        ->check(CLI::ExistingFile);
    grad->add_option("--radius-mm", grad_cmd.radius_mm, "Crystal radius [mm]")
        ->capture_default_str();
    grad->add_option("--extent-mm", grad_cmd.extent_mm, "Crystal axial extent [mm]")
        ->capture_default_str();
    grad->add_option("--displacement-mm", grad_cmd.displacement_mm,
                     "Rigid displacement for shift estimates [mm]");
    grad->add_option("--sensitivity", grad_cmd.sensitivity,
                     "Field sensitivity override [Hz/T]");
    grad_cmd.output.attach(grad);
    grad->callback([&] { grad_cmd.run(); });

    TubeCmd tube_cmd;
    auto* tube = app.add_subcommand(
        "tube", "On-axis field and gradient of a magnetized cylinder shell");
    tube->add_option("--length", tube_cmd.length, "Cylinder length [m]")
        ->capture_default_str();
    tube->add_option("--outer-diameter", tube_cmd.outer_diameter, "Outer diameter [m]")
        ->capture_default_str();
    tube->add_option("--inner-diameter", tube_cmd.inner_diameter, "Inner diameter [m]")
        ->capture_default_str();
    tube->add_option("--chi", tube_cmd.chi, "Magnetic susceptibility")
        ->capture_default_str();
    tube->add_option("--field", tube_cmd.field, "Ambient field [T]")->capture_default_str();
    tube->add_option("--displacement", tube_cmd.displacement,
                     "Axial displacement for the shift estimate [m]")
        ->capture_default_str();
    tube->add_option("--carrier", tube_cmd.carrier_hz, "Carrier for Hz conversion [Hz]")
        ->capture_default_str();
    tube->add_option("--z", tube_cmd.z, "Evaluate at this axial position [m] "
                                        "(default: the peak-gradient location)");
    tube->add_option("--dchi-dt", tube_cmd.dchi_dt,
                     "Susceptibility temperature slope [1/K]");
    tube_cmd.output.attach(tube);
    tube->callback([&] { tube_cmd.run(); });

    try {
        app.parse(argc, argv);
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nRun with --help for usage.\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
