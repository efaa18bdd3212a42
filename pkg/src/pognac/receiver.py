"""Free-space analyzer (half-wave plate + PBS) and single-photon detection
statistics for attenuated coherent pulses.

Two detectors, one per analyzer port, click independently. Each pulse ends
in exactly one of four outcomes: a single click on either branch, a double
click, or nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .elements import make_hwp
from .encoder import EmittedPulse
from .errors import ConfigurationError

BASIS_HV = "HV"
BASIS_DA = "DA"

OUTCOME_CLICK_0 = "click_0"
OUTCOME_CLICK_1 = "click_1"
OUTCOME_DOUBLE = "double"
OUTCOME_NONE = "none"

POLICY_DISCARD = "discard"
POLICY_RANDOM = "random"

# Analyzer branches: HWP at 0 (HV) or pi/8 (DA) followed by an ideal PBS.
# Branch 0 is the transmitted port (H after the plate), branch 1 the
# reflected port; the effective projection bras are the HWP matrix rows.
_BRANCH_ROWS = {}
for _basis, _angle in ((BASIS_HV, 0.0), (BASIS_DA, math.pi / 8.0)):
    _m = make_hwp(_angle).m
    _BRANCH_ROWS[_basis] = (
        (complex(_m[0, 0]), complex(_m[0, 1])),
        (complex(_m[1, 0]), complex(_m[1, 1])),
    )


@dataclass(frozen=True)
class DetectorParams:
    """Analyzer basis and detector behaviour.

    double_click_policy controls sifting later on: "discard" drops double
    clicks from the QBER tally (the conservative default), "random" assigns
    them to a branch with a fair coin.
    """

    efficiency: float = 0.5
    dark_count_prob_per_gate: float = 1e-5
    basis: str = BASIS_HV
    double_click_policy: str = POLICY_DISCARD

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigurationError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if not 0.0 <= self.dark_count_prob_per_gate <= 1.0:
            raise ConfigurationError(
                f"dark_count_prob_per_gate must be in [0, 1], got {self.dark_count_prob_per_gate}"
            )
        if self.basis not in (BASIS_HV, BASIS_DA):
            raise ConfigurationError(f"basis must be HV or DA, got {self.basis!r}")
        if self.double_click_policy not in (POLICY_DISCARD, POLICY_RANDOM):
            raise ConfigurationError(
                f"double_click_policy must be discard or random, got {self.double_click_policy!r}"
            )


class ClickProbabilities(NamedTuple):
    click_0: float
    click_1: float
    double: float
    none: float


class DetectionRecord(NamedTuple):
    pulse_index: int
    sent_label: str
    basis: str
    outcome: str


def click_probabilities(state, mu: float, params: DetectorParams) -> ClickProbabilities:
    """Joint outcome probabilities for one pulse.

    The analyzer projects the state onto the two branch powers q0, q1; each
    detector then fires with marginal 1 - (1 - d) exp(-mu eta q). The four
    returned outcomes are mutually exclusive and sum to one.
    """
    if mu < 0.0:
        raise ConfigurationError(f"mean photon number must be >= 0, got {mu}")
    (b00, b01), (b10, b11) = _BRANCH_ROWS[params.basis]
    a0 = b00 * state.h + b01 * state.v
    a1 = b10 * state.h + b11 * state.v
    q0 = (a0 * a0.conjugate()).real
    q1 = (a1 * a1.conjugate()).real
    gain = mu * params.efficiency
    keep = 1.0 - params.dark_count_prob_per_gate
    p0 = 1.0 - keep * math.exp(-gain * q0)
    p1 = 1.0 - keep * math.exp(-gain * q1)
    return ClickProbabilities(
        p0 * (1.0 - p1),
        p1 * (1.0 - p0),
        p0 * p1,
        (1.0 - p0) * (1.0 - p1),
    )


def simulate_detection(
    pulse: EmittedPulse,
    params: DetectorParams,
    rng_seed,
    pulse_index: int = 0,
) -> DetectionRecord:
    """Sample one joint detection outcome; deterministic given ``rng_seed``
    (a seed or a hot Generator)."""
    p = click_probabilities(pulse.state, pulse.mean_photon_number, params)
    u = np.random.default_rng(rng_seed).random()
    if u < p.click_0:
        outcome = OUTCOME_CLICK_0
    elif u < p.click_0 + p.click_1:
        outcome = OUTCOME_CLICK_1
    elif u < p.click_0 + p.click_1 + p.double:
        outcome = OUTCOME_DOUBLE
    else:
        outcome = OUTCOME_NONE
    return DetectionRecord(pulse_index, pulse.sent_label, params.basis, outcome)


def records_to_csv(records: Sequence[DetectionRecord]) -> str:
    """Debug dump of detection records; column order is fixed."""
    lines = ["pulse_index,sent_label,basis,outcome"]
    lines += [f"{r.pulse_index},{r.sent_label},{r.basis},{r.outcome}" for r in records]
    return "\n".join(lines) + "\n"
