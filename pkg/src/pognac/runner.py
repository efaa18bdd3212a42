"""Experiment orchestration: pseudorandom state sequences, windowed QBER
accounting, and the drift comparison against an inline-modulator baseline.

Randomness is organized so results are bit-identical however the work is
chunked: the label sequence comes from one seeded generator, and each
analysis window gets its own emission and detection streams derived from
(detection_seed, window, role). Counts reduce order-independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .encoder import (
    POST_PC_LABEL,
    EncoderConfig,
    DriftProfile,
    EmittedPulse,
    _drive_phases,
    _OUTPUT_PC,
    emit_pulse,
    inline_encoder_reference,
    output_pc_mapping,
)
from .errors import ConfigurationError
from .polarization import apply
from .receiver import (
    OUTCOME_CLICK_0,
    OUTCOME_CLICK_1,
    OUTCOME_DOUBLE,
    OUTCOME_NONE,
    POLICY_DISCARD,
    POLICY_RANDOM,
    DetectorParams,
    simulate_detection,
)

__all__ = [
    "RunConfig",
    "QberSeries",
    "WindowRow",
    "LabelStats",
    "RunResult",
    "DriftComparisonResult",
    "output_pc_mapping",
    "generate_sequence",
    "sift_and_qber",
    "run_experiment",
    "drift_comparison",
    "SEQUENCE_HVD",
    "SEQUENCE_DA",
    "LABEL_ORDER",
]

SEQUENCE_HVD = "hvd-pseudorandom"
SEQUENCE_DA = "da-alternating"

# Draw order of the uniform {L, R, D} generator (receiver frame H, V, D).
HVD_DRAW_ORDER = ("L", "R", "D")

# Deterministic row order of receiver-frame labels in every output.
LABEL_ORDER = ("H", "V", "D", "A")

# Nominal analyzer branch per (basis, sent label). Branch 0 is the
# transmitted port. Labels unbiased to the measured basis keep a fixed
# conventional branch (H, D -> 0; V, A -> 1) and hover at QBER 0.5.
CORRECT_BRANCH = {
    ("HV", "H"): 0,
    ("HV", "V"): 1,
    ("HV", "D"): 0,
    ("HV", "A"): 1,
    ("DA", "D"): 0,
    ("DA", "A"): 1,
    ("DA", "H"): 0,
    ("DA", "V"): 1,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment run needs.

    sequence_seed drives only the label sequence; detection_seed drives all
    physical randomness (per-pulse phase jitter and detector sampling).
    """

    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    detector: DetectorParams = field(default_factory=DetectorParams)
    repetition_rate_hz: float = 1e6
    duration_s: float = 3.0
    window_s: float = 3.0
    sequence_mode: str = SEQUENCE_HVD
    sequence_seed: int = 1
    detection_seed: int = 2

    def __post_init__(self):
        if self.repetition_rate_hz <= 0.0:
            raise ConfigurationError(f"repetition rate must be positive, got {self.repetition_rate_hz}")
        if self.window_s <= 0.0:
            raise ConfigurationError(f"window must be positive, got {self.window_s}")
        if self.duration_s < self.window_s:
            raise ConfigurationError(
                f"duration {self.duration_s} s must cover at least one window of {self.window_s} s"
            )
        if self.sequence_mode not in (SEQUENCE_HVD, SEQUENCE_DA):
            raise ConfigurationError(f"unknown sequence mode {self.sequence_mode!r}")

    def n_pulses(self) -> int:
        return int(round(self.duration_s * self.repetition_rate_hz))


@dataclass(frozen=True, slots=True)
class WindowRow:
    """Sifted counts for one (window, sent label) cell."""

    window_start_s: float
    sent_label: str
    n_correct: int
    n_error: int
    n_discarded: int

    @property
    def qber(self) -> float:
        """error/(correct+error); nan flags an empty cell, never silent 0."""
        n = self.n_correct + self.n_error
        return self.n_error / n if n else math.nan


@dataclass(frozen=True, slots=True)
class LabelStats:
    """Run-level pooled statistics for one sent label."""

    sent_label: str
    n_correct: int
    n_error: int
    n_discarded: int
    qber: float
    stderr: float


@dataclass(frozen=True)
class QberSeries:
    """Windowed QBER time series plus run-level per-label statistics."""

    rows: tuple[WindowRow, ...]
    labels: tuple[str, ...]
    window_s: float

    def label_stats(self) -> dict[str, LabelStats]:
        out = {}
        for label in self.labels:
            nc = sum(r.n_correct for r in self.rows if r.sent_label == label)
            ne = sum(r.n_error for r in self.rows if r.sent_label == label)
            nd = sum(r.n_discarded for r in self.rows if r.sent_label == label)
            n = nc + ne
            if n:
                q = ne / n
                se = math.sqrt(q * (1.0 - q) / n)
            else:
                q = math.nan
                se = math.nan
            out[label] = LabelStats(label, nc, ne, nd, q, se)
        return out

    def to_csv(self) -> str:
        """Windowed series in the fixed output schema."""
        lines = ["window_start_s,sent_label,n_correct,n_error,n_discarded,qber"]
        lines += [
            f"{r.window_start_s!r},{r.sent_label},{r.n_correct},{r.n_error},"
            f"{r.n_discarded},{r.qber!r}"
            for r in self.rows
        ]
        return "\n".join(lines) + "\n"


class RunResult(NamedTuple):
    series: QberSeries
    summary: dict[str, LabelStats]


class DriftComparisonResult(NamedTuple):
    pognac: RunResult
    inline: RunResult


def generate_sequence(mode: str, n_pulses: int, seed) -> list[str]:
    """Reproducible emission sequence in encoder-frame labels.

    HVD mode draws uniformly from {L, R, D} (H, V, D at the receiver) with
    numpy's default PCG64 generator, index order L, R, D; DA mode alternates
    D, A deterministically.
    """
    if n_pulses <= 0:
        raise ConfigurationError(f"n_pulses must be positive, got {n_pulses}")
    if mode == SEQUENCE_DA:
        return ["D" if i % 2 == 0 else "A" for i in range(n_pulses)]
    if mode != SEQUENCE_HVD:
        raise ConfigurationError(f"unknown sequence mode {mode!r}")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, 3, size=n_pulses)
    return [HVD_DRAW_ORDER[i] for i in draws.tolist()]


def sift_and_qber(
    records,
    sequence,
    window_s: float,
    repetition_rate_hz: float,
    double_click_policy: str = POLICY_DISCARD,
    assignment_seed=0,
) -> QberSeries:
    """Windowed per-label sifting of detection records.

    A click in the branch matching the sent label (CORRECT_BRANCH) counts
    as correct, the opposite branch as an error; empty outcomes drop out.
    Double clicks are discarded or coin-assigned per the policy (the coin
    stream is consumed in pulse-index order). Records must align with the
    sequence by pulse index.
    """
    if window_s <= 0.0 or repetition_rate_hz <= 0.0:
        raise ConfigurationError("window and repetition rate must be positive")
    if double_click_policy not in (POLICY_DISCARD, POLICY_RANDOM):
        raise ConfigurationError(f"unknown double-click policy {double_click_policy!r}")

    n = len(sequence)
    n_windows = int(((n - 1) / repetition_rate_hz) // window_s) + 1 if n else 0
    labels = tuple(l for l in LABEL_ORDER if l in {POST_PC_LABEL[s] for s in sequence})

    counts = {}  # (window, label) -> [correct, error, discarded]
    coin = np.random.default_rng((assignment_seed, 0xD0)) if double_click_policy == POLICY_RANDOM else None

    for rec in sorted(records, key=lambda r: r.pulse_index):
        idx = rec.pulse_index
        if not 0 <= idx < n:
            raise ConfigurationError(f"record pulse_index {idx} outside the sequence of {n} pulses")
        expected = POST_PC_LABEL[sequence[idx]]
        if rec.sent_label != expected:
            raise ConfigurationError(
                f"record {idx} carries sent_label {rec.sent_label!r} but the sequence says {expected!r}"
            )
        outcome = rec.outcome
        if outcome == OUTCOME_NONE:
            continue
        w = int((idx / repetition_rate_hz) // window_s)
        cell = counts.setdefault((w, rec.sent_label), [0, 0, 0])
        if outcome == OUTCOME_DOUBLE:
            if coin is None:
                cell[2] += 1
                continue
            branch = int(coin.integers(0, 2))
        elif outcome == OUTCOME_CLICK_0:
            branch = 0
        elif outcome == OUTCOME_CLICK_1:
            branch = 1
        else:
            raise ConfigurationError(f"unknown outcome {outcome!r} in record {idx}")
        if branch == CORRECT_BRANCH[(rec.basis, rec.sent_label)]:
            cell[0] += 1
        else:
            cell[1] += 1

    rows = []
    for w in range(n_windows):
        for label in labels:
            c, e, d = counts.get((w, label), (0, 0, 0))
            rows.append(WindowRow(w * window_s, label, c, e, d))
    return QberSeries(tuple(rows), labels, window_s)


def _run_records(config: RunConfig, sequence, emit):
    """Shared per-slot loop; ``emit(label, t, encoder, rng)`` makes the pulse.

    Window w draws from generators seeded (detection_seed, w, 0|1), so any
    window-parallel execution reproduces the same records.
    """
    rate = config.repetition_rate_hz
    window = config.window_s
    records = []
    current_window = -1
    rng_emit = rng_det = None
    for i, label in enumerate(sequence):
        t = i / rate
        w = int(t // window)
        if w != current_window:
            rng_emit = np.random.default_rng((config.detection_seed, w, 0))
            rng_det = np.random.default_rng((config.detection_seed, w, 1))
            current_window = w
        pulse = emit(label, t, config.encoder, rng_emit)
        records.append(simulate_detection(pulse, config.detector, rng_det, i))
    return records


def _emit_inline(label: str, t: float, enc: EncoderConfig, rng) -> EmittedPulse:
    """Inline-modulator counterpart of emit_pulse: same drive electronics,
    same jitter recipe, but the drift adds directly at the emission time."""
    phi_e, phi_l, driven, mu = _drive_phases(label, enc)
    sigma = enc.phase_jitter_sigma
    if driven:
        sigma = math.hypot(sigma, enc.drive_jitter_sigma)
    delta = rng.normal(0.0, sigma)
    phi_applied = (phi_e + delta) - phi_l - (enc.phi0 + enc.elements.pc_misalignment_eps)
    state = inline_encoder_reference(phi_applied, enc.drift, t)
    out = apply(_OUTPUT_PC, state).state
    return EmittedPulse(t, out, mu, label, POST_PC_LABEL[label])


def _finish(config: RunConfig, sequence, records) -> RunResult:
    series = sift_and_qber(
        records,
        sequence,
        config.window_s,
        config.repetition_rate_hz,
        config.detector.double_click_policy,
        config.detection_seed,
    )
    return RunResult(series, series.label_stats())


def run_experiment(config: RunConfig) -> RunResult:
    """Deterministic end-to-end pipeline:
    sequence -> emit_pulse per slot -> simulate_detection -> sift_and_qber.
    """
    sequence = generate_sequence(config.sequence_mode, config.n_pulses(), config.sequence_seed)
    records = _run_records(config, sequence, emit_pulse)
    return _finish(config, sequence, records)


def drift_comparison(config: RunConfig, drift: DriftProfile) -> DriftComparisonResult:
    """Identical sequence, seeds, and noise through the loop encoder and an
    inline single-pass modulator; only the drift response differs.

    With zero drift the two pipelines produce identical records.
    """
    cfg = replace(config, encoder=replace(config.encoder, drift=drift))
    sequence = generate_sequence(cfg.sequence_mode, cfg.n_pulses(), cfg.sequence_seed)
    pognac_records = _run_records(cfg, sequence, emit_pulse)
    inline_records = _run_records(cfg, sequence, _emit_inline)
    return DriftComparisonResult(
        _finish(cfg, sequence, pognac_records),
        _finish(cfg, sequence, inline_records),
    )
