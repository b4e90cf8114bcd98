"""
Random states that are biseparable by construction, for validity checks of
the witnesses: no criterion may report a positive value on them.
"""
import numpy as np

from .density import bipartitions, permute_spins
from .measure_types import ReducedDensityMatrix


def random_density_matrix(rng: np.random.Generator, n_qubits: int, rank: int | None = None) -> np.ndarray:
    """Ginibre-induced mixed state; rank 1 gives a random pure state."""
    dim = 2 ** n_qubits
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _random_local(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    # pure components half of the time; they sit on the boundary where witnesses are tight
    rank = 1 if rng.random() < 0.5 else int(rng.integers(1, 2 ** n_qubits + 1))
    return random_density_matrix(rng, n_qubits, rank)


def _product_across(rng: np.random.Generator, m: int, part: tuple[int, ...]) -> np.ndarray:
    rest = tuple(s for s in range(m) if s not in part)
    block = np.kron(_random_local(rng, len(part)), _random_local(rng, len(rest)))
    # block is ordered (part, rest); send it back to spin order 0..m-1
    order = list(part) + list(rest)
    inverse = [order.index(s) for s in range(m)]
    return permute_spins(ReducedDensityMatrix(m=m, matrix=block), inverse).matrix


def sample_biseparable(rng: np.random.Generator, m: int = 3, n_terms: int | None = None) -> ReducedDensityMatrix:
    """
    Mixture of states each separable across some bipartition of the m spins.

    For m = 3 this is sum_k p_k rho_1 x rho_23 + q_k rho_13 x rho_2 + r_k rho_12 x rho_3.
    """
    cuts = bipartitions(m)
    n_terms = n_terms or int(rng.integers(1, 7))
    weights = rng.dirichlet(np.ones(n_terms))
    matrix = sum(w * _product_across(rng, m, cuts[rng.integers(len(cuts))]) for w in weights)
    return ReducedDensityMatrix(m=m, matrix=matrix)
