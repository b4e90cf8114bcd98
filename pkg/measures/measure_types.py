from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

RDM_TOL = 1e-10
# criterion raw values at or below this are "zero within machine precision"
NUMERICAL_ZERO = 1e-10
ITERATIONS_PER_PARAMETER = 2000
MAX_ITERATIONS = 20000


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """
    State of an m-spin subregion, canonical computational ordering
    (|00..0>, |00..1>, ..., |11..1>) with the first kept spin most significant.
    """
    m: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2 ** self.m
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for {self.m} spins, got {self.matrix.shape}")

    def validate(self, tol: float = RDM_TOL) -> "ReducedDensityMatrix":
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > tol:
            raise ValueError(f"density matrix trace is {np.trace(self.matrix).real}, expected 1")
        if np.min(np.linalg.eigvalsh(self.matrix)) < -tol:
            raise ValueError("density matrix has a negative eigenvalue")
        return self

    @classmethod
    def from_pure(cls, amplitudes) -> "ReducedDensityMatrix":
        psi = np.asarray(amplitudes, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(m=int(np.log2(psi.size)), matrix=np.outer(psi, psi.conj()))


class OptimizerConfig(BaseModel):
    """
    Budget of the multi-start Nelder-Mead search behind a criterion.
    """
    n_restarts: int = Field(24, gt=0, description="Random restarts on top of the mandatory starts.")
    max_iterations: Optional[int] = Field(
        None, gt=0, description="Iteration cap of one local search; 2000 per parameter up to 20000 when unset.")
    tolerance: float = Field(1e-7, gt=0, description="Absolute x and f tolerance of the simplex search.")
    include_identity_start: bool = Field(True, description="Always start one search at the identity point.")
    patience: Optional[int] = Field(
        None, gt=0, description="Stop after this many random restarts in a row without improvement.")
    refine_restarts: Optional[int] = Field(
        None, ge=0, description="Random restarts of warm-started refinement stages (D at k > 1); n_restarts when unset.")

    def iteration_cap(self, dim: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return min(ITERATIONS_PER_PARAMETER * dim, MAX_ITERATIONS)


DEFAULT_OPTIMIZERS = {
    "W": OptimizerConfig(n_restarts=24, patience=8),
    "I2": OptimizerConfig(n_restarts=50, patience=12),
    "W4": OptimizerConfig(n_restarts=50, patience=12),
    "D": OptimizerConfig(n_restarts=30, patience=8, refine_restarts=4),
}


class GMEResult(BaseModel):
    """
    Value of one entanglement criterion plus what the optimizer did to get it.
    """
    criterion: str = Field(..., description="W, I2, W4 or D.")
    value: float = Field(..., description="Reported value; clamped at 0 for W, I2 and W4.")
    raw_value: float = Field(..., description="Best objective value before clamping.")
    n_restarts: int = Field(0, description="Local searches actually run.")
    n_iterations: int = Field(0, description="Simplex iterations summed over all searches.")
    converged: bool = Field(True, description="Whether the search that produced the best value converged.")
    fast_path: bool = Field(False, description="Value decided without optimization (product across some party).")
    best_parameters: list[float] = Field(default_factory=list, description="Optimizer coordinates of the best point.")
    best_k: Optional[int] = Field(None, description="Mixture size that attained the geometric distance.")


@dataclass(frozen=True)
class SeparableAnsatz:
    """
    k-term mixture of 3-spin product states, each spin a Bloch vector with |r| <= 1.

    `weights` has shape (k,), `bloch` shape (k, 3, 3) as [component, spin, xyz].
    """
    weights: np.ndarray
    bloch: np.ndarray

    @property
    def k(self) -> int:
        return self.weights.size
