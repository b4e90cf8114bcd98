from itertools import combinations
from typing import Sequence, Union

import numpy as np

from state_engine.state_types import StateVector
from .measure_types import ReducedDensityMatrix

MAX_KEPT_SITES = 12
PURE_MARGINAL_TOL = 1e-10


def _check_keep(keep_sites: Sequence[int], n: int):
    if len(keep_sites) > MAX_KEPT_SITES:
        raise ValueError(f"cannot keep {len(keep_sites)} sites as a dense matrix (max {MAX_KEPT_SITES})")
    if len(set(keep_sites)) != len(keep_sites):
        raise ValueError(f"kept sites must be distinct: {list(keep_sites)}")
    for site in keep_sites:
        if not 0 <= site < n:
            raise ValueError(f"site {site} out of range for {n} spins")


def partial_trace(state: Union[StateVector, ReducedDensityMatrix],
                  keep_sites: Sequence[int]) -> ReducedDensityMatrix:
    """
    Reduced state of `keep_sites`, in the order given (first kept site is the
    most significant bit of the result).
    """
    keep_sites = list(keep_sites)
    m = len(keep_sites)

    if isinstance(state, StateVector):
        n = state.n_qubits
        _check_keep(keep_sites, n)
        rest = [s for s in range(n) if s not in keep_sites]
        psi = np.transpose(state.tensor, keep_sites + rest).reshape(2 ** m, 2 ** (n - m))
        rho = psi @ psi.conj().T
        return ReducedDensityMatrix(m=m, matrix=rho / np.trace(rho).real)

    n = state.m
    _check_keep(keep_sites, n)
    rest = [s for s in range(n) if s not in keep_sites]
    tensor = state.matrix.reshape((2,) * (2 * n))
    order = keep_sites + rest + [n + s for s in keep_sites] + [n + s for s in rest]
    blocks = np.transpose(tensor, order).reshape(2 ** m, 2 ** (n - m), 2 ** m, 2 ** (n - m))
    rho = np.einsum('ajbj->ab', blocks)
    return ReducedDensityMatrix(m=m, matrix=rho / np.trace(rho).real)


def partial_transpose(rho: ReducedDensityMatrix, partition: Sequence[int]) -> np.ndarray:
    m = rho.m
    tensor = rho.matrix.reshape((2,) * (2 * m))
    axes = list(range(2 * m))
    for s in partition:
        axes[s], axes[m + s] = axes[m + s], axes[s]
    return np.transpose(tensor, axes).reshape(2 ** m, 2 ** m)


def permute_spins(rho: ReducedDensityMatrix, order: Sequence[int]) -> ReducedDensityMatrix:
    """Relabels spins so that new spin k is old spin order[k]."""
    m = rho.m
    tensor = rho.matrix.reshape((2,) * (2 * m))
    axes = list(order) + [m + s for s in order]
    return ReducedDensityMatrix(m=m, matrix=np.transpose(tensor, axes).reshape(2 ** m, 2 ** m))


def single_spin_marginals(rho: ReducedDensityMatrix) -> list[np.ndarray]:
    return [partial_trace(rho, [s]).matrix for s in range(rho.m)]


def has_pure_party(rho: ReducedDensityMatrix, tol: float = PURE_MARGINAL_TOL) -> bool:
    """True when some spin's marginal is pure, i.e. rho factorizes across that spin."""
    return any(np.trace(r @ r).real > 1.0 - tol for r in single_spin_marginals(rho))


def bipartitions(m: int) -> list[tuple[int, ...]]:
    """Non-trivial spin subsets containing spin 0, one per bipartition (1|23, 12|3, 13|2 for m=3)."""
    return [(0,) + rest for size in range(m - 1) for rest in combinations(range(1, m), size)]
