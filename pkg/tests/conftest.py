import math

import numpy as np

from pognac.polarization import TransferMatrix


def su2(alpha: float, beta: float, gamma: float) -> TransferMatrix:
    """Arbitrary 2x2 unitary from Euler angles (used as a random-unitary source)."""
    rz1 = np.array([[np.exp(-0.5j * alpha), 0], [0, np.exp(0.5j * alpha)]])
    ry = np.array(
        [
            [math.cos(beta / 2), -math.sin(beta / 2)],
            [math.sin(beta / 2), math.cos(beta / 2)],
        ]
    )
    rz2 = np.array([[np.exp(-0.5j * gamma), 0], [0, np.exp(0.5j * gamma)]])
    return TransferMatrix(rz1 @ ry @ rz2)
