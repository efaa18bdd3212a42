"""Desk-scale simulator of a self-compensating Sagnac-loop polarization
encoder and the three-state BB84 link built around it."""

from .elements import (
    ElementParams,
    db_to_power,
    make_attenuator,
    make_hwp,
    make_pbs,
    make_polarization_controller,
    phase_from_voltage,
)
from .encoder import (
    DriftProfile,
    EmittedPulse,
    EncoderConfig,
    emit_pulse,
    encode,
    encode_with_drift,
    inline_encoder_reference,
    loop_transit_lead,
    output_pc_mapping,
    phases_from_waveform,
)
from .errors import ConfigFileError, ConfigurationError
from .polarization import (
    ABSORBED,
    JonesVector,
    StokesVector,
    TransferMatrix,
    apply,
    fidelity,
    jones_from_stokes,
    normalize,
    to_stokes,
)
from .presets import PRESETS, expected_qber, preset_config, preset_expected_qber
from .receiver import (
    DetectionRecord,
    DetectorParams,
    click_probabilities,
    records_to_csv,
    simulate_detection,
)
from .runner import (
    DriftComparisonResult,
    LabelStats,
    QberSeries,
    RunConfig,
    RunResult,
    WindowRow,
    drift_comparison,
    generate_sequence,
    run_experiment,
    sift_and_qber,
)
from .waveform import (
    PatternSpec,
    Segment,
    Waveform,
    pattern_for_state,
    quantize_delay,
    voltage_at,
)

__version__ = "0.1.0"
