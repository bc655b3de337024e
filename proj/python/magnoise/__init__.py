"""Analysis toolkit for vibration-induced magnetic-field noise in
superconducting magnets: spectral-density conversions, filter-function
coherence prediction, T2 / delta_rms extraction, eta calibration, a
Monte-Carlo dephasing oracle, FM-sideband analysis, and bore-environment
estimators."""

from magnoise._core import (  # noqa: F401
    ChiResult,
    CoherenceCurve,
    CouplingEta,
    CrystalGeometry,
    CurvePoint,
    DensityKind,
    DispersionReport,
    DisplacementShift,
    EsrNmrComparison,
    EtaFitReport,
    FrequencyUnit,
    GradientTable,
    MagnetizedTube,
    McEstimate,
    NoiseRealization,
    PhaseMax,
    PulseSequence,
    RmsReport,
    SequenceTemplate,
    SidebandRow,
    SpectralDensity,
    SpinSpecies,
    T2Result,
    Tone,
    ToneField,
    ToneModulation,
    TrapConfig,
    TrapSolution,
    TubeFieldSample,
    TubePeak,
    ValidationError,
    __version__,
    acoustic_fundamental,
    chi,
    compare_esr_nmr,
    constants,
    delta_rms,
    displacement_shift,
    estimate_coherence,
    eta_from_phase_slope,
    extract_t2,
    field_to_frequency,
    filter_function,
    fit_eta_from_curve,
    gradient_dispersion,
    load_psd,
    modulation_index,
    multiplication_noise_db,
    phase_accrual,
    phase_accrual_delta,
    phase_accrual_delta_max,
    predict_curve,
    save_psd,
    sideband_strengths,
    synchronous_tau,
    synthesize,
    temperature_sensitivity,
    trap_frequencies,
    tube_axial_field,
    tube_peak_gradient,
    voltage_to_field,
)
