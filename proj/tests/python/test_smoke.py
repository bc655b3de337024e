"""Smoke tests for the magnoise python bindings."""

import math

import pytest

import magnoise as mn

TWO_PI = 2.0 * math.pi


def white_band(c, f_lo, f_hi):
    return mn.SpectralDensity.power_law(
        mn.DensityKind.frequency, math.sqrt(c), 0.0, TWO_PI * f_lo, TWO_PI * f_hi
    )


def test_version_and_constants():
    assert mn.__version__ == "0.1.0"
    assert mn.constants.gamma_electron == pytest.approx(1.76086e11, rel=1e-4)
    assert mn.constants.magneton_ratio == pytest.approx(1836.15, rel=1e-4)


def test_spectral_conversions_roundtrip():
    sv = mn.SpectralDensity.tabulated(
        mn.DensityKind.voltage, [TWO_PI * 100.0, TWO_PI * 300.0], [1e-6, 2e-6]
    )
    spin = mn.SpinSpecies.electron(4.46)
    sb = mn.voltage_to_field(sv, mn.CouplingEta.scalar(10.0))
    assert sb.amplitudes[0] == pytest.approx(1e-6 / (10.0 * TWO_PI * 100.0))
    sbeta = mn.field_to_frequency(sb, spin)
    assert sbeta.grid == sv.grid  # conversions never touch the grid
    back = [a / abs(spin.gamma) for a in sbeta.amplitudes]
    assert back == pytest.approx(sb.amplitudes, rel=1e-14)


def test_kind_mismatch_raises():
    sb = mn.SpectralDensity.tabulated(mn.DensityKind.field, [100.0], [1e-12])
    with pytest.raises(ValueError):
        mn.voltage_to_field(sb, mn.CouplingEta.scalar(1.0))


def test_filter_function_printed_forms():
    tau = 2.5e-3
    w = math.pi / tau
    echo = mn.PulseSequence(2, tau)
    assert mn.filter_function(echo, w) == pytest.approx(16.0)
    ramsey = mn.PulseSequence(1, tau)
    assert mn.filter_function(ramsey, w) == pytest.approx(
        4.0 * math.sin(w * tau / 2.0) ** 2
    )
    assert mn.synchronous_tau(TWO_PI * 200.0) == pytest.approx(2.5e-3)


def test_chi_and_delta_rms_white_band():
    c, f_lo, f_hi = 12.5, 10.0, 50.0
    sbeta = white_band(c, f_lo, f_hi)
    rms = mn.delta_rms(sbeta)
    expected = math.sqrt(c * TWO_PI * (f_hi - f_lo) / math.pi)
    assert rms.delta_rms == pytest.approx(expected, rel=1e-12)

    tau = 1e-2 / rms.delta_rms
    result = mn.chi(sbeta, mn.PulseSequence(1, tau, 0.0))
    ratio = (1.0 - math.exp(-result.chi)) / (0.5 * (rms.delta_rms * tau) ** 2)
    assert 0.99 < ratio < 1.01


def test_predict_and_extract_t2():
    sbeta = white_band(3600.0, 5.0, 400.0)
    times = [1e-3 * (1.3**i) for i in range(18)]
    curve = mn.predict_curve(sbeta, mn.SequenceTemplate(2, 0.0, 0.0), times)
    t2 = mn.extract_t2(curve)
    assert t2.reached
    analytic = -math.log(math.exp(-1.0))  # crossing at chi == 1
    seq = mn.PulseSequence(2, t2.t2 / 2.0, 0.0)
    assert mn.chi(sbeta, seq).chi == pytest.approx(analytic, rel=5e-3)


def test_monte_carlo_matches_chi():
    sbeta = white_band(3600.0, 10.0, 400.0)
    seq = mn.PulseSequence(2, 2.5e-3, 0.0)
    analytic = mn.chi(sbeta, seq)
    est = mn.estimate_coherence(
        sbeta, seq, trajectories=2000, seed=11, duration_factor=32.0
    )
    assert est.trajectories == 2000
    assert abs(est.coherence - analytic.coherence) < 3.0 * est.std_error

    again = mn.estimate_coherence(
        sbeta, seq, trajectories=2000, seed=11, duration_factor=32.0, workers=4
    )
    assert again.coherence == est.coherence  # bit-identical across workers


def test_eta_calibration_round_trip():
    spin = mn.SpinSpecies.electron(4.46)
    w = TWO_PI * 500.0
    tau = mn.synchronous_tau(w)
    eta_true, v0 = 15.0, 2.4e-6
    b_m = v0 / (w * eta_true)
    p3 = mn.phase_accrual(mn.PulseSequence(3, tau), mn.ToneField(b_m, w, 0.0), spin)
    p2 = mn.phase_accrual(mn.PulseSequence(2, tau), mn.ToneField(b_m, w, 0.0), spin)
    assert mn.eta_from_phase_slope(v0, w, p3 - p2, spin) == pytest.approx(
        eta_true, rel=1e-9
    )


def test_modulation_table():
    carrier = TWO_PI * 124e9
    b0 = carrier / mn.constants.gamma_electron
    cmp = mn.compare_esr_nmr(
        1e-9, TWO_PI * 50.0, mn.SpinSpecies.electron(b0), mn.SpinSpecies.nuclear(b0)
    )
    assert cmp.esr.beta_m == pytest.approx(2.48)
    assert cmp.nmr.beta_m == pytest.approx(2.48 / mn.constants.magneton_ratio)
    assert cmp.dephasing_ratio == pytest.approx(3e-7, rel=0.02)
    j = mn.sideband_strengths(2.5, 1)
    assert j[0] == pytest.approx(-0.048383776, abs=1e-9)
    assert j[1] == pytest.approx(0.497094102, abs=1e-9)
    with pytest.raises(ValueError):
        mn.sideband_strengths(51.0, 5)


def test_environment_estimators():
    assert mn.acoustic_fundamental(1.0, 0.127, 343.0) == pytest.approx(155.68, rel=1e-3)
    assert mn.multiplication_noise_db(1240.0) == pytest.approx(61.87, abs=0.01)

    cfg = mn.TrapConfig(
        4.46,
        mn.constants.elementary_charge,
        9.0122 * mn.constants.atomic_mass_unit,
        TWO_PI * 800e3,
        TWO_PI * 45e3,
    )
    sol = mn.trap_frequencies(cfg)
    assert sol.cyclotron / TWO_PI == pytest.approx(7.60e6, rel=0.005)
    assert sol.confining

    tube = mn.MagnetizedTube(0.05, 0.0625, 0.0375, 2.22e-5, 4.5)
    peak = mn.tube_peak_gradient(tube)
    assert abs(peak.gradient) == pytest.approx(630e-6, rel=0.05)
    sample = mn.tube_axial_field(tube, peak.z, 3e-6)
    assert sample.fractional_shift * 124.05e9 == pytest.approx(52.0, rel=0.05)


def test_gradient_dispersion():
    table = mn.GradientTable()
    table.x2_plus_y2 = 0.1e-6
    table.z = 0.03e-6
    table.z2 = 0.2e-6
    table.y = 0.78e-6
    report = mn.gradient_dispersion(table, mn.CrystalGeometry(0.25, 0.06))
    assert report.radial_spread_hz == pytest.approx(175.0)
    assert report.axial_spread_hz == pytest.approx(50.4, rel=0.01)
    shift = mn.displacement_shift(table, 0.003)
    assert shift.shift_y_hz == pytest.approx(65.52, rel=1e-3)


def test_csv_io(tmp_path):
    path = tmp_path / "sv.csv"
    path.write_text("# test\n100,1e-6\n200,2e-6\n")
    sd = mn.load_psd(str(path), mn.DensityKind.voltage, mn.FrequencyUnit.hertz)
    assert sd.grid[0] == pytest.approx(TWO_PI * 100.0)
    out = tmp_path / "out.csv"
    mn.save_psd(sd, str(out), mn.FrequencyUnit.hertz)
    again = mn.load_psd(str(out), mn.DensityKind.voltage, mn.FrequencyUnit.hertz)
    assert again.amplitudes == pytest.approx(sd.amplitudes)
