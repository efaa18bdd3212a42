"""Transfer-matrix factories for the physical components of the link:
polarizing beamsplitter, polarization controller, half-wave plate,
attenuators, and the electro-optic phase response of the modulator.

Loss bookkeeping is scalar (dB -> power factor); polarization action is a
2x2 transfer matrix. Factories are pure and the resulting matrices are
immutable, so everything here is safe to share between threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .polarization import SQRT_HALF, TransferMatrix


def db_to_power(db: float) -> float:
    """Power transmission factor 10^(-dB/10) of a loss given in dB."""
    return 10.0 ** (-db / 10.0)


@dataclass(frozen=True)
class ElementParams:
    """Imperfection and loss knobs for every optical element in the chain.

    pbs_extinction_db        power extinction ratio of the fiber PBS
                             (math.inf = ideal)
    pc_phase_phi0            equator angle phi0 the input controller dials in
    pc_misalignment_eps      residual controller misalignment, radians
    bs_insertion_loss_db     per-pass loss of the 50:50 splitter standing in
                             for a circulator (two passes per pulse)
    attenuator_loss_db       output attenuator bringing pulses down to the
                             single-photon level
    modulator_vpi            half-wave voltage of the phase modulator
    modulator_insertion_loss_db
    """

    pbs_extinction_db: float = 30.0
    pc_phase_phi0: float = 0.0
    pc_misalignment_eps: float = 0.0
    bs_insertion_loss_db: float = 3.0
    attenuator_loss_db: float = 64.0
    modulator_vpi: float = 4.0
    modulator_insertion_loss_db: float = 3.0

    def __post_init__(self):
        for name in (
            "pbs_extinction_db",
            "bs_insertion_loss_db",
            "attenuator_loss_db",
            "modulator_insertion_loss_db",
        ):
            if getattr(self, name) < 0.0:
                raise ConfigurationError(f"{name} must be >= 0 dB, got {getattr(self, name)}")
        if self.modulator_vpi <= 0.0:
            raise ConfigurationError(f"modulator_vpi must be positive, got {self.modulator_vpi}")


def phase_from_voltage(volts: float, vpi: float) -> float:
    """Linear electro-optic response pi * volts / vpi, not wrapped."""
    if vpi <= 0.0:
        raise ConfigurationError(f"modulator vpi must be positive, got {vpi}")
    return math.pi * volts / vpi


def make_pbs(extinction_ratio_db: float = 30.0) -> tuple[TransferMatrix, TransferMatrix]:
    """(transmit, reflect) transfer matrices of a polarizing beamsplitter.

    The transmit port passes H with amplitude sqrt(1 - l) and leaks V with
    amplitude sqrt(l), where l = 10^(-ER/10); the reflect port is the
    complement, so the two survival probabilities always sum to 1.
    """
    if extinction_ratio_db < 0.0:
        raise ConfigurationError(f"extinction ratio must be >= 0 dB, got {extinction_ratio_db}")
    leak = 0.0 if math.isinf(extinction_ratio_db) else db_to_power(extinction_ratio_db)
    t = math.sqrt(1.0 - leak)
    r = math.sqrt(leak)
    transmit = TransferMatrix(np.array([[t, 0.0], [0.0, r]], dtype=complex))
    reflect = TransferMatrix(np.array([[r, 0.0], [0.0, t]], dtype=complex))
    return transmit, reflect


def make_polarization_controller(phi0: float, eps: float = 0.0) -> TransferMatrix:
    """Unitary taking the |H>-polarized source onto the equator state
    (|H> + e^{i phi0} |V>)/sqrt(2).

    ``eps`` models residual alignment error as a Bloch rotation of the
    incoming polarization about the s2 axis ahead of the ideal mapping.
    The produced state then sits at equator angle phi0 + eps, so its
    fidelity to the eps = 0 target is cos^2(eps/2).
    """
    e0 = cmath.exp(1j * phi0)
    ideal = np.array([[1.0, 1.0], [e0, -e0]], dtype=complex) * SQRT_HALF
    c = math.cos(eps / 2.0)
    s = math.sin(eps / 2.0)
    misalign = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return TransferMatrix(ideal @ misalign)


def make_attenuator(loss_db: float) -> float:
    """Scalar power factor of a polarization-neutral attenuator."""
    if loss_db < 0.0:
        raise ConfigurationError(f"attenuation must be >= 0 dB, got {loss_db}")
    return db_to_power(loss_db)


def make_hwp(angle: float) -> TransferMatrix:
    """Half-wave retarder with its fast axis at ``angle`` to horizontal.

    theta = 0 leaves |H> and |V> alone; theta = pi/8 swaps the {H, V} and
    {D, A} bases. Applying the same plate twice is the identity up to a
    global phase.
    """
    c = math.cos(2.0 * angle)
    s = math.sin(2.0 * angle)
    return TransferMatrix(np.array([[c, s], [s, -c]], dtype=complex))
