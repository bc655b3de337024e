// Python bindings for the magnoise core: spectra, sequences, coherence
// prediction, the Monte-Carlo oracle, FM-sideband analysis, and the
// bore-environment estimators.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "magnoise/coherence.hpp"
#include "magnoise/constants.hpp"
#include "magnoise/environment.hpp"
#include "magnoise/manifest.hpp"
#include "magnoise/modulation.hpp"
#include "magnoise/montecarlo.hpp"
#include "magnoise/sequences.hpp"
#include "magnoise/spectra.hpp"

namespace py = pybind11;
using namespace magnoise;

namespace {

void bind_spectra(py::module_& m) {
    py::enum_<DensityKind>(m, "DensityKind")
        .value("voltage", DensityKind::Voltage)
        .value("field", DensityKind::Field)
        .value("frequency", DensityKind::Frequency);

    py::enum_<FrequencyUnit>(m, "FrequencyUnit")
        .value("hertz", FrequencyUnit::Hertz)
        .value("rad_per_s", FrequencyUnit::RadiansPerSecond);

    py::class_<Tone>(m, "Tone")
        .def(py::init([](double omega, double amplitude) {
                 return Tone{omega, amplitude};
             }),
             py::arg("omega"), py::arg("amplitude"))
        .def_readonly("omega", &Tone::omega)
        .def_readonly("amplitude", &Tone::amplitude);

    py::class_<SpectralDensity>(m, "SpectralDensity")
        .def_static("tabulated", &SpectralDensity::tabulated, py::arg("kind"),
                    py::arg("omega"), py::arg("amplitude"))
        .def_static("power_law", &SpectralDensity::power_law, py::arg("kind"),
                    py::arg("coefficient"), py::arg("exponent"), py::arg("omega_lo"),
                    py::arg("omega_hi"))
        .def_static("tones", &SpectralDensity::tones, py::arg("kind"), py::arg("tones"))
        .def_property_readonly("kind", &SpectralDensity::kind)
        .def_property_readonly("is_tabulated", &SpectralDensity::is_tabulated)
        .def_property_readonly("is_power_law", &SpectralDensity::is_power_law)
        .def_property_readonly("is_tone_set", &SpectralDensity::is_tone_set)
        .def("density_at", &SpectralDensity::density_at, py::arg("omega"))
        .def("support", &SpectralDensity::support)
        .def("integrate_square",
             py::overload_cast<double, double>(&SpectralDensity::integrate_square,
                                               py::const_),
             py::arg("omega_lo"), py::arg("omega_hi"))
        .def("integrate_square",
             py::overload_cast<>(&SpectralDensity::integrate_square, py::const_))
        .def_property_readonly("grid",
                               [](const SpectralDensity& sd) {
                                   return sd.as_tabulated().omega;
                               })
        .def_property_readonly("amplitudes", [](const SpectralDensity& sd) {
            return sd.as_tabulated().amplitude;
        });

    py::class_<CouplingEta>(m, "CouplingEta")
        .def_static("scalar", &CouplingEta::scalar, py::arg("eta"))
        .def_static("tabulated", &CouplingEta::tabulated, py::arg("omega"), py::arg("eta"))
        .def("at", &CouplingEta::at, py::arg("omega"));

    py::class_<SpinSpecies>(m, "SpinSpecies")
        .def(py::init<double, double, double>(), py::arg("gamma"), py::arg("b0"),
             py::arg("carrier_offset") = 0.0)
        .def_static("electron", &SpinSpecies::electron, py::arg("b0"),
                    py::arg("carrier_offset") = 0.0)
        .def_static("nuclear", &SpinSpecies::nuclear, py::arg("b0"),
                    py::arg("carrier_offset") = 0.0)
        .def_readonly("gamma", &SpinSpecies::gamma)
        .def_readonly("b0", &SpinSpecies::b0)
        .def_readonly("carrier_offset", &SpinSpecies::carrier_offset)
        .def_property_readonly("carrier", &SpinSpecies::carrier);

    m.def("load_psd", &load_psd, py::arg("path"), py::arg("kind"),
          py::arg("unit") = FrequencyUnit::Hertz);
    m.def("save_psd", &save_psd, py::arg("density"), py::arg("path"),
          py::arg("unit") = FrequencyUnit::Hertz);
    m.def("voltage_to_field", &voltage_to_field, py::arg("sv"), py::arg("eta"));
    m.def("field_to_frequency", &field_to_frequency, py::arg("sb"), py::arg("spin"));
}

void bind_sequences(py::module_& m) {
    py::class_<PulseSequence>(m, "PulseSequence")
        .def(py::init<int, double, double, double>(), py::arg("segments"), py::arg("tau"),
             py::arg("pi_duration") = PulseSequence::default_pi_duration,
             py::arg("analysis_phase") = 0.0)
        .def_readonly("segments", &PulseSequence::segments)
        .def_readonly("tau", &PulseSequence::tau)
        .def_readonly("pi_duration", &PulseSequence::pi_duration)
        .def_readonly("analysis_phase", &PulseSequence::analysis_phase)
        .def_property_readonly("total_time", &PulseSequence::total_time);

    py::class_<ToneField>(m, "ToneField")
        .def(py::init([](double amplitude, double omega, double phase) {
                 return ToneField{amplitude, omega, phase};
             }),
             py::arg("amplitude"), py::arg("omega"), py::arg("phase") = 0.0);

    py::class_<PhaseMax>(m, "PhaseMax")
        .def_readonly("phase", &PhaseMax::phase)
        .def_readonly("tone_phase", &PhaseMax::tone_phase);

    m.def("filter_function", &filter_function, py::arg("sequence"), py::arg("omega"));
    m.def("synchronous_tau", &synchronous_tau, py::arg("omega"));
    m.def("phase_accrual", &phase_accrual, py::arg("sequence"), py::arg("tone"),
          py::arg("spin"));
    m.def("phase_accrual_delta", &phase_accrual_delta, py::arg("sequence"),
          py::arg("amplitude"), py::arg("omega"), py::arg("phase"));
    m.def("phase_accrual_delta_max", &phase_accrual_delta_max, py::arg("sequence"),
          py::arg("amplitude"), py::arg("omega"));
}

void bind_coherence(py::module_& m) {
    py::class_<TonePhase>(m, "TonePhase")
        .def_readonly("omega", &TonePhase::omega)
        .def_readonly("phase", &TonePhase::phase);

    py::class_<ChiResult>(m, "ChiResult")
        .def_readonly("chi", &ChiResult::chi)
        .def_readonly("quadrature_error", &ChiResult::quadrature_error)
        .def_readonly("tone_phases", &ChiResult::tone_phases)
        .def_property_readonly("coherence", &ChiResult::coherence);

    py::class_<CurvePoint>(m, "CurvePoint")
        .def(py::init([](double time, double sigma_y, double err) {
                 return CurvePoint{time, sigma_y, err};
             }),
             py::arg("time"), py::arg("sigma_y"), py::arg("err") = 0.0)
        .def_readonly("time", &CurvePoint::time)
        .def_readonly("sigma_y", &CurvePoint::sigma_y)
        .def_readonly("err", &CurvePoint::err);

    py::class_<CoherenceCurve>(m, "CoherenceCurve")
        .def(py::init<std::vector<CurvePoint>>(), py::arg("points"))
        .def_static("load_csv", &CoherenceCurve::load_csv, py::arg("path"))
        .def("save_csv", &CoherenceCurve::save_csv, py::arg("path"))
        .def_property_readonly("points", &CoherenceCurve::points)
        .def("__len__", &CoherenceCurve::size);

    py::class_<SequenceTemplate>(m, "SequenceTemplate")
        .def(py::init([](int segments, double pi_duration, double analysis_phase) {
                 return SequenceTemplate{segments, pi_duration, analysis_phase};
             }),
             py::arg("segments") = 2,
             py::arg("pi_duration") = PulseSequence::default_pi_duration,
             py::arg("analysis_phase") = 0.0)
        .def("at_total_time", &SequenceTemplate::at_total_time, py::arg("total_time"));

    py::class_<T2Result>(m, "T2Result")
        .def_readonly("reached", &T2Result::reached)
        .def_readonly("t2", &T2Result::t2)
        .def_readonly("last", &T2Result::last);

    py::class_<RmsReport>(m, "RmsReport")
        .def_readonly("delta_rms", &RmsReport::delta_rms)
        .def_readonly("delta_rms_hz", &RmsReport::delta_rms_hz)
        .def_readonly("fractional", &RmsReport::fractional);

    py::class_<EtaFitReport>(m, "EtaFitReport")
        .def_readonly("eta", &EtaFitReport::eta)
        .def_readonly("uncertainty", &EtaFitReport::uncertainty)
        .def_readonly("residual", &EtaFitReport::residual)
        .def_readonly("n_points", &EtaFitReport::n_points)
        .def_readonly("weighted", &EtaFitReport::weighted)
        .def_readonly("at_lower_bound", &EtaFitReport::at_lower_bound)
        .def_readonly("at_upper_bound", &EtaFitReport::at_upper_bound);

    m.def(
        "chi",
        [](const SpectralDensity& sbeta, const PulseSequence& seq) {
            return chi(sbeta, seq);
        },
        py::arg("sbeta"), py::arg("sequence"));
    m.def(
        "predict_curve",
        [](const SpectralDensity& sbeta, const SequenceTemplate& shape,
           const std::vector<double>& times) {
            return predict_curve(sbeta, shape, times);
        },
        py::arg("sbeta"), py::arg("shape"), py::arg("times"));
    m.def("extract_t2", &extract_t2, py::arg("curve"));
    m.def(
        "delta_rms",
        [](const SpectralDensity& sbeta, const std::optional<SpinSpecies>& spin) {
            return delta_rms(sbeta, spin);
        },
        py::arg("sbeta"), py::arg("spin") = std::nullopt);
    m.def(
        "fit_eta_from_curve",
        [](const SpectralDensity& sv, const SpinSpecies& spin,
           const SequenceTemplate& shape, const CoherenceCurve& measured, double eta_min,
           double eta_max, bool weighted) {
            EtaFitOptions options;
            options.eta_min = eta_min;
            options.eta_max = eta_max;
            options.weighted = weighted;
            return fit_eta_from_curve(sv, spin, shape, measured, options);
        },
        py::arg("sv"), py::arg("spin"), py::arg("shape"), py::arg("measured"),
        py::arg("eta_min") = 0.1, py::arg("eta_max") = 1000.0, py::arg("weighted") = true);
    m.def("eta_from_phase_slope", &eta_from_phase_slope, py::arg("v0"), py::arg("omega"),
          py::arg("dphi_dm"), py::arg("spin"));
}

void bind_montecarlo(py::module_& m) {
    py::class_<NoiseRealization>(m, "NoiseRealization")
        .def_readonly("sample_rate", &NoiseRealization::sample_rate)
        .def_readonly("samples", &NoiseRealization::samples)
        .def_readonly("master_seed", &NoiseRealization::master_seed)
        .def_readonly("trajectory_index", &NoiseRealization::trajectory_index);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("coherence", &McEstimate::coherence)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("trajectories", &McEstimate::trajectories)
        .def_readonly("mean_phase", &McEstimate::mean_phase)
        .def_readonly("mean_phase_sq", &McEstimate::mean_phase_sq);

    m.def("synthesize", &synthesize, py::arg("sbeta"), py::arg("duration"),
          py::arg("sample_rate"), py::arg("seed"), py::arg("trajectory_index") = 0);
    m.def(
        "estimate_coherence",
        [](const SpectralDensity& sbeta, const PulseSequence& seq,
           std::uint64_t trajectories, std::uint64_t seed, double sample_rate,
           double duration_factor, unsigned workers, bool finite_pulse_deadtime) {
            McOptions options;
            options.trajectories = trajectories;
            options.seed = seed;
            options.sample_rate = sample_rate;
            options.duration_factor = duration_factor;
            options.workers = workers;
            options.finite_pulse_deadtime = finite_pulse_deadtime;
            py::gil_scoped_release release;
            return estimate_coherence(sbeta, seq, options);
        },
        py::arg("sbeta"), py::arg("sequence"), py::arg("trajectories") = 10000,
        py::arg("seed") = 1, py::arg("sample_rate") = 0.0,
        py::arg("duration_factor") = 16.0, py::arg("workers") = 0,
        py::arg("finite_pulse_deadtime") = false);
}

void bind_modulation(py::module_& m) {
    py::class_<ToneModulation>(m, "ToneModulation")
        .def(py::init([](double fractional_amplitude, double omega_m, double carrier) {
                 return ToneModulation{fractional_amplitude, omega_m, carrier};
             }),
             py::arg("fractional_amplitude"), py::arg("omega_m"), py::arg("carrier"));

    py::class_<SidebandRow>(m, "SidebandRow")
        .def_readonly("label", &SidebandRow::label)
        .def_readonly("beta_m", &SidebandRow::beta_m)
        .def_readonly("j0", &SidebandRow::j0)
        .def_readonly("j1", &SidebandRow::j1);

    py::class_<EsrNmrComparison>(m, "EsrNmrComparison")
        .def_readonly("esr", &EsrNmrComparison::esr)
        .def_readonly("nmr", &EsrNmrComparison::nmr)
        .def_readonly("dephasing_ratio", &EsrNmrComparison::dephasing_ratio);

    m.def("modulation_index", &modulation_index, py::arg("tone"));
    m.def("sideband_strengths", &sideband_strengths, py::arg("beta_m"), py::arg("n_max"));
    m.def("compare_esr_nmr", &compare_esr_nmr, py::arg("fractional_amplitude"),
          py::arg("omega_m"), py::arg("electron"), py::arg("nuclear"));
}

void bind_environment(py::module_& m) {
    py::class_<TrapConfig>(m, "TrapConfig")
        .def(py::init([](double b0, double charge, double mass, double omega_z,
                         double omega_r) {
                 return TrapConfig{b0, charge, mass, omega_z, omega_r};
             }),
             py::arg("b0"), py::arg("charge"), py::arg("mass"), py::arg("omega_z"),
             py::arg("omega_r"));

    py::class_<TrapSolution>(m, "TrapSolution")
        .def_readonly("cyclotron", &TrapSolution::cyclotron)
        .def_readonly("beta_r", &TrapSolution::beta_r)
        .def_readonly("confining", &TrapSolution::confining)
        .def("potential_energy", &TrapSolution::potential_energy, py::arg("r"),
             py::arg("z"));

    py::class_<GradientTable>(m, "GradientTable")
        .def(py::init<>())
        .def_static("from_csv", &GradientTable::from_csv, py::arg("path"))
        .def_readwrite("x", &GradientTable::x)
        .def_readwrite("y", &GradientTable::y)
        .def_readwrite("z", &GradientTable::z)
        .def_readwrite("xy", &GradientTable::xy)
        .def_readwrite("x2_minus_y2", &GradientTable::x2_minus_y2)
        .def_readwrite("x2_plus_y2", &GradientTable::x2_plus_y2)
        .def_readwrite("z2", &GradientTable::z2)
        .def_readwrite("sensitivity", &GradientTable::sensitivity);

    py::class_<CrystalGeometry>(m, "CrystalGeometry")
        .def(py::init([](double radius_mm, double axial_extent_mm) {
                 return CrystalGeometry{radius_mm, axial_extent_mm};
             }),
             py::arg("radius_mm"), py::arg("axial_extent_mm"));

    py::class_<AveragedTerm>(m, "AveragedTerm")
        .def_readonly("term", &AveragedTerm::term)
        .def_readonly("pre_averaging_hz", &AveragedTerm::pre_averaging_hz);

    py::class_<DispersionReport>(m, "DispersionReport")
        .def_readonly("radial_spread_tesla", &DispersionReport::radial_spread_tesla)
        .def_readonly("radial_spread_hz", &DispersionReport::radial_spread_hz)
        .def_readonly("axial_spread_tesla", &DispersionReport::axial_spread_tesla)
        .def_readonly("axial_spread_hz", &DispersionReport::axial_spread_hz)
        .def_readonly("axial_linear_hz", &DispersionReport::axial_linear_hz)
        .def_readonly("axial_quadratic_hz", &DispersionReport::axial_quadratic_hz)
        .def_readonly("axial_sum_bound_hz", &DispersionReport::axial_sum_bound_hz)
        .def_readonly("rotation_averaged", &DispersionReport::rotation_averaged);

    py::class_<DisplacementShift>(m, "DisplacementShift")
        .def_readonly("shift_x_hz", &DisplacementShift::shift_x_hz)
        .def_readonly("shift_y_hz", &DisplacementShift::shift_y_hz)
        .def_readonly("shift_z_hz", &DisplacementShift::shift_z_hz);

    py::class_<MagnetizedTube>(m, "MagnetizedTube")
        .def(py::init([](double length, double outer_radius, double inner_radius,
                         double susceptibility, double ambient_field) {
                 return MagnetizedTube{length, outer_radius, inner_radius, susceptibility,
                                       ambient_field};
             }),
             py::arg("length"), py::arg("outer_radius"), py::arg("inner_radius"),
             py::arg("susceptibility"), py::arg("ambient_field"));

    py::class_<TubeFieldSample>(m, "TubeFieldSample")
        .def_readonly("b_z", &TubeFieldSample::b_z)
        .def_readonly("gradient", &TubeFieldSample::gradient)
        .def_readonly("fractional_shift", &TubeFieldSample::fractional_shift);

    py::class_<TubePeak>(m, "TubePeak")
        .def_readonly("z", &TubePeak::z)
        .def_readonly("gradient", &TubePeak::gradient);

    m.def("trap_frequencies", &trap_frequencies, py::arg("config"));
    m.def("acoustic_fundamental", &acoustic_fundamental, py::arg("length"),
          py::arg("diameter"), py::arg("speed"));
    m.def("multiplication_noise_db", &multiplication_noise_db, py::arg("factor"));
    m.def("gradient_dispersion", &gradient_dispersion, py::arg("table"),
          py::arg("crystal"));
    m.def("displacement_shift", &displacement_shift, py::arg("table"),
          py::arg("displacement_mm"));
    m.def("tube_axial_field", &tube_axial_field, py::arg("tube"), py::arg("z"),
          py::arg("displacement") = 0.0);
    m.def("tube_peak_gradient", &tube_peak_gradient, py::arg("tube"));
    m.def("temperature_sensitivity", &temperature_sensitivity, py::arg("tube"),
          py::arg("dchi_dt"), py::arg("z"));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core bindings for the magnoise field-noise toolkit";
    m.attr("__version__") = version_string;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalErrorException",
                                           PyExc_ArithmeticError);

    auto constants = m.def_submodule("constants", "Physical constants (SI)");
    constants.attr("pi") = magnoise::constants::pi;
    constants.attr("two_pi") = magnoise::constants::two_pi;
    constants.attr("hbar") = magnoise::constants::hbar;
    constants.attr("mu_bohr") = magnoise::constants::mu_bohr;
    constants.attr("mu_nuclear") = magnoise::constants::mu_nuclear;
    constants.attr("g_electron") = magnoise::constants::g_electron;
    constants.attr("gamma_electron") = magnoise::constants::gamma_electron;
    constants.attr("magneton_ratio") = magnoise::constants::magneton_ratio;
    constants.attr("elementary_charge") = magnoise::constants::elementary_charge;
    constants.attr("atomic_mass_unit") = magnoise::constants::atomic_mass_unit;

    bind_spectra(m);
    bind_sequences(m);
    bind_coherence(m);
    bind_montecarlo(m);
    bind_modulation(m);
    bind_environment(m);
}
