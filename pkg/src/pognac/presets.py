"""Canned experiment scenarios emulating the reference bench runs of the
encoder, plus the analytic QBER expectation they are calibrated against.

Calibration targets (mean sifted QBER of the emulated hardware runs):

    pseudorandom H/V/D stream, HV analyzer:   H 1.23 %, V 1.10 %
    same stream, DA analyzer:                 D 1.12 %
    alternating D/A stream, DA analyzer:      D 0.13 %, A 0.20 %

The first two scenarios share one encoder state (only the analyzer plate
turns between them), so they share one calibration: the baseline jitter is
solved from the D target and the extra drive jitter lifts H/V to the
compromise 2*1.23*1.10/(1.23+1.10) = 1.161 % that sits within 6 % of both
measured values. The alternating-D/A run used a cleaner pulse generator and
gets its own, much smaller pair. Solved by scripts/calibrate_presets.py
against expected_qber() below; rerun it if the model changes.
"""

from __future__ import annotations

import math

import numpy as np

from .encoder import POST_PC_LABEL, DriftProfile, EncoderConfig, _drive_phases
from .errors import ConfigurationError
from .receiver import BASIS_DA, BASIS_HV, DetectorParams
from .runner import SEQUENCE_DA, SEQUENCE_HVD, RunConfig

# Solved jitter calibration, radians (see module docstring).
HVD_BASE_JITTER = 0.2259
HVD_DRIVE_JITTER = 0.0436
DA_BASE_JITTER = 0.0759
DA_DRIVE_JITTER = 0.0565

# Reference mean QBERs the presets emulate, by (preset, receiver label).
REFERENCE_QBER = {
    ("fig2", "H"): 0.0123,
    ("fig2", "V"): 0.0110,
    ("fig3", "D"): 0.0112,
    ("fig4", "D"): 0.0013,
    ("fig4", "A"): 0.0020,
}


def expected_qber(
    mu: float,
    efficiency: float,
    dark: float,
    jitter_sigma: float,
    phase_offset: float = 0.0,
    n_nodes: int = 81,
) -> float:
    """Analytic mean sifted QBER of a state measured in its own basis.

    The per-pulse phase error is e = delta + phase_offset with
    delta ~ N(0, jitter_sigma); the analyzer branch powers are sin^2(e/2)
    and cos^2(e/2); detectors click independently with marginal
    1 - (1 - dark) exp(-mu * efficiency * q); double clicks are excluded,
    so the expectation is the ratio of the exclusive error and correct
    click masses. Gauss-Hermite quadrature over the jitter distribution.
    """
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    weights = weights / math.sqrt(2.0 * math.pi)  # normalize to a probability measure
    e = jitter_sigma * nodes + phase_offset
    q_err = np.sin(e / 2.0) ** 2
    q_corr = 1.0 - q_err
    gain = mu * efficiency
    keep = 1.0 - dark
    p_err = 1.0 - keep * np.exp(-gain * q_err)
    p_corr = 1.0 - keep * np.exp(-gain * q_corr)
    mass_err = float(np.sum(weights * p_err * (1.0 - p_corr)))
    mass_corr = float(np.sum(weights * p_corr * (1.0 - p_err)))
    return mass_err / (mass_err + mass_corr)


def preset_expected_qber(config: RunConfig, sent_label: str) -> float:
    """expected_qber() evaluated with a run config's own parameters.

    Valid for labels measured in their own basis (the deterministic ones).
    """
    encoder_label = {post: enc for enc, post in POST_PC_LABEL.items()}[sent_label]
    _, _, driven, mu = _drive_phases(encoder_label, config.encoder)
    sigma = config.encoder.phase_jitter_sigma
    if driven:
        sigma = math.hypot(sigma, config.encoder.drive_jitter_sigma)
    return expected_qber(
        mu,
        config.detector.efficiency,
        config.detector.dark_count_prob_per_gate,
        sigma,
        phase_offset=config.encoder.elements.pc_misalignment_eps,
    )


def _hvd_encoder() -> EncoderConfig:
    return EncoderConfig(
        phase_jitter_sigma=HVD_BASE_JITTER,
        drive_jitter_sigma=HVD_DRIVE_JITTER,
    )


def fig2_config() -> RunConfig:
    """Pseudorandom H/V/D stream analyzed in the HV basis."""
    return RunConfig(
        encoder=_hvd_encoder(),
        detector=DetectorParams(basis=BASIS_HV),
        repetition_rate_hz=1e4,
        duration_s=60.0,
        window_s=3.0,
        sequence_mode=SEQUENCE_HVD,
        sequence_seed=101,
        detection_seed=201,
    )


def fig3_config() -> RunConfig:
    """Same encoder state as fig2, analyzer plate turned to the DA basis."""
    return RunConfig(
        encoder=_hvd_encoder(),
        detector=DetectorParams(basis=BASIS_DA),
        repetition_rate_hz=1e4,
        duration_s=60.0,
        window_s=3.0,
        sequence_mode=SEQUENCE_HVD,
        sequence_seed=101,
        detection_seed=202,
    )


def fig4_config() -> RunConfig:
    """Alternating D/A stream with full-wave drive, analyzed in DA."""
    return RunConfig(
        encoder=EncoderConfig(
            phase_jitter_sigma=DA_BASE_JITTER,
            drive_jitter_sigma=DA_DRIVE_JITTER,
        ),
        detector=DetectorParams(basis=BASIS_DA),
        repetition_rate_hz=1e4,
        duration_s=60.0,
        window_s=3.0,
        sequence_mode=SEQUENCE_DA,
        sequence_seed=104,
        detection_seed=204,
    )


def drift_config() -> RunConfig:
    """Slow sinusoidal loop drift (amplitude pi over 10 minutes) for the
    loop-vs-inline comparison."""
    return RunConfig(
        encoder=EncoderConfig(
            phase_jitter_sigma=HVD_BASE_JITTER,
            drive_jitter_sigma=HVD_DRIVE_JITTER,
            drift=DriftProfile.sinusoidal(math.pi, 600.0),
        ),
        detector=DetectorParams(basis=BASIS_HV),
        repetition_rate_hz=1e3,
        duration_s=300.0,
        window_s=3.0,
        sequence_mode=SEQUENCE_HVD,
        sequence_seed=105,
        detection_seed=205,
    )


PRESETS = {
    "fig2": fig2_config,
    "fig3": fig3_config,
    "fig4": fig4_config,
    "drift": drift_config,
}


def preset_config(name: str) -> RunConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; expected one of {sorted(PRESETS)} or custom"
        ) from None
