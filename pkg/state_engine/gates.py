import numpy as np
from scipy.linalg import expm

from .state_types import (
    FloquetIsingFamily, GateFamily, HaarFamily, TwoQubitGate, UnitaryFamily)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)


def make_gate(matrix, family: GateFamily = GateFamily.CUSTOM, **params) -> TwoQubitGate:
    """Wraps a 4x4 matrix as a gate; the gate rejects wrong shapes and non-unitary input."""
    return TwoQubitGate(matrix=matrix, family=family, params=params)


def sample_haar_unitaries(rng: np.random.Generator, size: int, dim: int = 4) -> np.ndarray:
    """
    Stack of `size` Haar-random dim x dim unitaries.

    QR of a complex Ginibre matrix, with the phases of R's diagonal moved
    into Q so the result is exactly Haar distributed.
    """
    z = (rng.standard_normal((size, dim, dim))
         + 1j * rng.standard_normal((size, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def sample_haar_unitary(rng: np.random.Generator) -> TwoQubitGate:
    return TwoQubitGate(matrix=sample_haar_unitaries(rng, 1)[0], family=GateFamily.HAAR)


def floquet_ising_gate(J: float = 1.0, g: float = 0.9045, h: float = 0.8090) -> TwoQubitGate:
    hamiltonian = (J * np.kron(_Z, _Z)
                   + g * (np.kron(_X, _I2) + np.kron(_I2, _X))
                   + h * (np.kron(_Z, _I2) + np.kron(_I2, _Z)))
    return make_gate(expm(-1j * hamiltonian), GateFamily.FLOQUET_ISING, J=J, g=g, h=h)


class GateSource:
    """
    Hands out the gates of one realization in order; gate id = draw index.

    Haar gates come from the realization's own gate stream, so the same
    stream replays the same gates. Floquet-Ising gates are all identical.
    """

    def __init__(self, family: UnitaryFamily, rng: np.random.Generator):
        self._family = family
        self._rng = rng
        self._next_id = 0
        self._fixed = None
        if isinstance(family, FloquetIsingFamily):
            self._fixed = floquet_ising_gate(family.J, family.g, family.h)

    def next_gate(self) -> tuple[int, TwoQubitGate]:
        gate_id = self._next_id
        self._next_id += 1
        if self._fixed is not None:
            return gate_id, self._fixed
        if isinstance(self._family, HaarFamily):
            return gate_id, sample_haar_unitary(self._rng)
        raise ValueError(f"unknown unitary family {self._family!r}")
