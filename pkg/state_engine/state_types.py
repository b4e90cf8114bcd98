from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, Field

UNITARITY_TOL = 1e-12


def unitarity_error(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


class GateFamily(str, Enum):
    HAAR = "HAAR"
    FLOQUET_ISING = "FLOQUET_ISING"
    CUSTOM = "CUSTOM"


class HaarFamily(BaseModel):
    """
    Two-qubit gates drawn independently from the Haar measure on U(4).
    """
    kind: Literal["HAAR"] = "HAAR"


class FloquetIsingFamily(BaseModel):
    """
    Fixed gate exp(-i(J Z⊗Z + g(X⊗I + I⊗X) + h(Z⊗I + I⊗Z))).

    The defaults are a common chaotic choice; they are placeholders, not a
    reproduction of any particular published circuit.
    """
    kind: Literal["FLOQUET_ISING"] = "FLOQUET_ISING"
    J: float = Field(1.0, description="Ising coupling.")
    g: float = Field(0.9045, description="Transverse field.")
    h: float = Field(0.8090, description="Longitudinal field.")


UnitaryFamily = Union[HaarFamily, FloquetIsingFamily]


@dataclass(frozen=True)
class StateVector:
    """
    Pure state of `n_qubits` qubits in the computational basis.

    Site 0 is the most significant bit of the amplitude index, so
    `amplitudes.reshape((2,) * n_qubits)` has axis k for site k.
    """
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** self.n_qubits,):
            raise ValueError(
                f"expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}")

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class TwoQubitGate:
    """
    4x4 unitary acting on an ordered site pair (i, j); row/column index is 2*b_i + b_j.
    """
    matrix: np.ndarray
    family: GateFamily = GateFamily.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"two-qubit gate must be 4x4, got {matrix.shape}")
        if (err := unitarity_error(matrix)) > UNITARITY_TOL:
            raise ValueError(f"gate is not unitary: max|U^dag U - I| = {err:.3e}")
        object.__setattr__(self, "matrix", matrix)


class MeasurementEvent(BaseModel):
    """
    One projective Z measurement as it happened in a realization.
    """
    site: int = Field(..., ge=0, description="Measured site.")
    layer: int = Field(..., ge=0, description="Global layer index in the schedule.")
    outcome: Literal[0, 1] = Field(..., description="Recorded bit.")
    pre_probability: float = Field(
        ..., ge=0.0, le=1.0,
        description="Born probability of the recorded outcome right before the measurement.")
