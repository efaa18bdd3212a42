import math

import numpy as np
import pytest

from pognac.encoder import DriftProfile, EncoderConfig, emit_pulse
from pognac.errors import ConfigurationError
from pognac.polarization import fidelity
from pognac.receiver import (
    BASIS_DA,
    DetectionRecord,
    DetectorParams,
    click_probabilities,
)
from pognac.runner import (
    LABEL_ORDER,
    SEQUENCE_DA,
    SEQUENCE_HVD,
    RunConfig,
    drift_comparison,
    generate_sequence,
    output_pc_mapping,
    run_experiment,
    sift_and_qber,
)


def quiet_config(**kw):
    defaults = dict(
        encoder=EncoderConfig(),
        detector=DetectorParams(dark_count_prob_per_gate=0.0),
        repetition_rate_hz=1e4,
        duration_s=3.0,
        window_s=3.0,
        sequence_mode=SEQUENCE_HVD,
        sequence_seed=11,
        detection_seed=12,
    )
    defaults.update(kw)
    return RunConfig(**defaults)


def test_generate_sequence_da_alternates():
    assert generate_sequence(SEQUENCE_DA, 4, 0) == ["D", "A", "D", "A"]


def test_generate_sequence_reproducible():
    a = generate_sequence(SEQUENCE_HVD, 1000, 42)
    b = generate_sequence(SEQUENCE_HVD, 1000, 42)
    c = generate_sequence(SEQUENCE_HVD, 1000, 43)
    assert a == b
    assert a != c


def test_generate_sequence_uniform():
    n = 3_000_000
    seq = generate_sequence(SEQUENCE_HVD, n, 7)
    for label in ("L", "R", "D"):
        freq = seq.count(label) / n
        se = math.sqrt((1 / 3) * (2 / 3) / n)
        assert freq == pytest.approx(1 / 3, abs=4 * se)


def test_generate_sequence_rejects_empty():
    with pytest.raises(ConfigurationError):
        generate_sequence(SEQUENCE_HVD, 0, 1)


def test_output_pc_mapping_exported():
    assert output_pc_mapping().is_unitary(1e-12)


def test_sift_ideal_d_in_da():
    sequence = ["D"] * 10
    records = [DetectionRecord(i, "D", BASIS_DA, "click_0") for i in range(10)]
    series = sift_and_qber(records, sequence, 1.0, 10.0)
    stats = series.label_stats()["D"]
    assert stats.qber == 0.0
    assert stats.n_correct == 10


def test_sift_counts_errors_on_wrong_branch():
    sequence = ["D"] * 8
    records = [
        DetectionRecord(i, "D", BASIS_DA, "click_1" if i < 2 else "click_0") for i in range(8)
    ]
    series = sift_and_qber(records, sequence, 1.0, 8.0)
    stats = series.label_stats()["D"]
    assert stats.n_error == 2
    assert stats.qber == pytest.approx(0.25)


def test_sift_empty_window_flagged_nan():
    sequence = ["D"] * 10
    series = sift_and_qber([], sequence, 0.5, 10.0)
    assert len(series.rows) == 2  # two windows, one label
    for row in series.rows:
        assert math.isnan(row.qber)
        assert row.n_correct == row.n_error == 0


def test_sift_rejects_misaligned_records():
    sequence = ["D", "A"]
    bad = [DetectionRecord(1, "D", BASIS_DA, "click_0")]  # index 1 is A
    with pytest.raises(ConfigurationError):
        sift_and_qber(bad, sequence, 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        sift_and_qber([DetectionRecord(5, "D", BASIS_DA, "click_0")], sequence, 1.0, 2.0)


def test_sift_double_click_policies():
    sequence = ["D"] * 6
    records = [DetectionRecord(i, "D", BASIS_DA, "double") for i in range(6)]
    discard = sift_and_qber(records, sequence, 1.0, 6.0, "discard")
    assert discard.label_stats()["D"].n_discarded == 6
    assert math.isnan(discard.label_stats()["D"].qber)

    random_policy = sift_and_qber(records, sequence, 1.0, 6.0, "random", assignment_seed=3)
    stats = random_policy.label_stats()["D"]
    assert stats.n_discarded == 0
    assert stats.n_correct + stats.n_error == 6
    again = sift_and_qber(records, sequence, 1.0, 6.0, "random", assignment_seed=3)
    assert again.rows == random_policy.rows


def test_window_counts_sum_to_run_totals():
    config = quiet_config(duration_s=9.0, window_s=3.0, detection_seed=5)
    result = run_experiment(config)
    windows = {r.window_start_s for r in result.series.rows}
    assert windows == {0.0, 3.0, 6.0}
    for label, stats in result.summary.items():
        rows = [r for r in result.series.rows if r.sent_label == label]
        assert sum(r.n_correct for r in rows) == stats.n_correct
        assert sum(r.n_error for r in rows) == stats.n_error
        assert sum(r.n_discarded for r in rows) == stats.n_discarded


def test_zero_noise_run_has_zero_qber():
    result = run_experiment(quiet_config())
    for label in ("H", "V"):
        assert result.summary[label].qber == 0.0
    # the unbiased D label keeps both branches busy instead
    d = result.summary["D"]
    assert d.n_error > 0 and d.n_correct > 0


def test_frame_consistency_ideal_config():
    # every emitted label lands exactly on its receiver-frame target
    from pognac.encoder import POST_PC_LABEL
    from test_encoder import RECEIVER_TARGET

    for label in ("D", "L", "R", "A"):
        pulse = emit_pulse(label, 0.0, EncoderConfig(), 0)
        assert fidelity(pulse.state, RECEIVER_TARGET[label]) >= 1.0 - 1e-12
        assert pulse.sent_label == POST_PC_LABEL[label]


def test_run_determinism():
    config = quiet_config(duration_s=6.0)
    a = run_experiment(config)
    b = run_experiment(config)
    assert a.series == b.series


def test_qber_converges_to_click_probability_ratio():
    # constant frame offset: analytic expectation straight from
    # click_probabilities on the actual emitted states
    offset = 0.25
    from pognac.elements import ElementParams

    config = quiet_config(
        encoder=EncoderConfig(elements=ElementParams(pc_phase_phi0=offset)),
        duration_s=15.0,
        window_s=3.0,
        repetition_rate_hz=1e4,
    )
    result = run_experiment(config)

    for enc_label, sent_label, branch in (("L", "H", 0), ("R", "V", 1)):
        pulse = emit_pulse(enc_label, 0.0, config.encoder, 0)
        p = click_probabilities(pulse.state, pulse.mean_photon_number, config.detector)
        singles = (p.click_0, p.click_1)
        expected = singles[1 - branch] / (singles[0] + singles[1])
        stats = result.summary[sent_label]
        n = stats.n_correct + stats.n_error
        se = math.sqrt(expected * (1.0 - expected) / n)
        assert stats.qber == pytest.approx(expected, abs=4 * se)


def test_labels_follow_sequence_mode():
    hvd = run_experiment(quiet_config())
    assert hvd.series.labels == ("H", "V", "D")
    da = run_experiment(quiet_config(sequence_mode=SEQUENCE_DA, detector=DetectorParams(basis=BASIS_DA)))
    assert da.series.labels == ("D", "A")
    assert set(da.series.labels) <= set(LABEL_ORDER)


def test_drift_comparison_without_drift_is_identical():
    config = quiet_config()
    paired = drift_comparison(config, DriftProfile.none())
    assert paired.pognac.series == paired.inline.series


def test_constant_drift_leaves_loop_encoder_untouched():
    config = quiet_config(duration_s=6.0)
    baseline = run_experiment(config)
    for offset in (1.3, 43210.0):
        paired = drift_comparison(config, DriftProfile.constant(offset))
        assert paired.pognac.series == baseline.series


def test_linear_drift_hits_only_the_inline_reference():
    config = quiet_config(
        duration_s=60.0,
        window_s=3.0,
        repetition_rate_hz=2e3,
        detection_seed=21,
    )
    baseline = run_experiment(config)
    paired = drift_comparison(config, DriftProfile.linear(0.05))
    assert paired.pognac.series == baseline.series

    # theta sweeps 0..3 rad: time-averaged error probability
    # <sin^2(theta/2)> = 0.5 (1 - sin(3)/3) ~ 0.476
    ts = np.linspace(0.0, 60.0, 100001)
    expected = float(np.mean(np.sin(0.05 * ts / 2.0) ** 2))
    for label in ("H", "V"):
        stats = paired.inline.summary[label]
        assert stats.qber == pytest.approx(expected, abs=0.05)
        assert paired.pognac.summary[label].qber < 0.01


def test_run_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(duration_s=1.0, window_s=3.0)
    with pytest.raises(ConfigurationError):
        RunConfig(repetition_rate_hz=0.0)
    with pytest.raises(ConfigurationError):
        RunConfig(sequence_mode="bogus")


def test_series_csv_schema():
    result = run_experiment(quiet_config())
    lines = result.series.to_csv().splitlines()
    assert lines[0] == "window_start_s,sent_label,n_correct,n_error,n_discarded,qber"
    first = lines[1].split(",")
    assert first[0] == "0.0"
    assert first[1] in LABEL_ORDER
