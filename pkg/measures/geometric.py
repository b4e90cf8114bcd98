from typing import Optional

import numpy as np
from scipy.special import softmax

from .density import single_spin_marginals
from .measure_types import (
    DEFAULT_OPTIMIZERS, GMEResult, OptimizerConfig, ReducedDensityMatrix, SeparableAnsatz)
from .optimizer import minimize_from

_PAULIS = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# logit given to a freshly added mixture component; its weight is ~1e-13
NEW_COMPONENT_LOGIT = -30.0
N_SPINS = 3


def bloch_vector(rho1: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho1 @ p).real for p in _PAULIS])


def unpack(params: np.ndarray, k: int) -> SeparableAnsatz:
    """
    Parameter layout: k-1 logits (component 0 is the zero-logit reference),
    then 3 Bloch components per spin per mixture component: 9k + (k - 1) reals.
    """
    logits = np.concatenate([[0.0], params[:k - 1]])
    bloch = params[k - 1:].reshape(k, N_SPINS, 3)
    norms = np.maximum(np.linalg.norm(bloch, axis=-1, keepdims=True), 1.0)
    return SeparableAnsatz(weights=softmax(logits), bloch=bloch / norms)


def separable_state(ansatz: SeparableAnsatz) -> np.ndarray:
    # (k, 3, 2, 2) single-spin states of every component; Bloch vectors are already in the unit ball
    spins = 0.5 * (np.eye(2) + np.einsum("ksx,xab->ksab", ansatz.bloch, _PAULIS))
    products = np.einsum("kab,kcd,kef->kacebdf", spins[:, 0], spins[:, 1], spins[:, 2])
    return np.tensordot(ansatz.weights, products, axes=1).reshape(8, 8)


def hilbert_schmidt_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b))


def _sample(rng: np.random.Generator, k: int) -> np.ndarray:
    logits = rng.standard_normal(k - 1)
    directions = rng.standard_normal((k, N_SPINS, 3))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    radii = rng.uniform(0.0, 1.0, size=(k, N_SPINS, 1)) ** (1 / 3)
    return np.concatenate([logits, (directions * radii).reshape(-1)])


def _grow(params: np.ndarray, k: int, fill: np.ndarray) -> np.ndarray:
    """Optimum of size k-1 plus one (effectively) zero-weight component."""
    logits, bloch = params[:k - 2], params[k - 2:]
    return np.concatenate([logits, [NEW_COMPONENT_LOGIT], bloch, fill])


def geometric_entanglement(rhoA: ReducedDensityMatrix, k_max: int = 7,
                           opt: Optional[OptimizerConfig] = None,
                           rng: Optional[np.random.Generator] = None) -> GMEResult:
    """
    Hilbert-Schmidt distance from rhoA to the nearest k-term mixture of
    3-spin product states, minimized for k = 1..k_max.

    Each k starts from the k-1 optimum with an extra zero-weight component,
    so the best distance never increases with k. The k = 1 search starts at
    the product of the single-spin marginals and spends the full restart
    budget; later stages refine a warm start with `opt.refine_restarts`.
    """
    if rhoA.m != N_SPINS:
        raise ValueError(f"geometric entanglement needs a 3-spin state, got m={rhoA.m}")
    if not 1 <= k_max <= 7:
        raise ValueError(f"k_max must be in 1..7, got {k_max}")
    opt = opt or DEFAULT_OPTIMIZERS["D"]
    rng = rng or np.random.default_rng(0)

    target = rhoA.matrix
    marginal_start = np.concatenate([bloch_vector(r) for r in single_spin_marginals(rhoA)])

    best_value, best_params, best_k = np.inf, None, 1
    n_restarts = n_iterations = 0
    converged = True
    previous = None
    for k in range(1, k_max + 1):
        def objective(params, k=k):
            return hilbert_schmidt_distance(target, separable_state(unpack(params, k)))

        warm = [marginal_start] if previous is None else [_grow(previous, k, marginal_start)]
        outcome = minimize_from(
            objective, opt, rng, sample_start=lambda r, k=k: _sample(r, k),
            warm_starts=warm, label=f"D(k={k})",
            n_restarts=None if previous is None else opt.refine_restarts)
        n_restarts += outcome.n_restarts
        n_iterations += outcome.n_iterations
        previous = outcome.best_x
        if outcome.best_value < best_value:
            best_value, best_params, best_k = outcome.best_value, outcome.best_x, k
            converged = outcome.converged

    return GMEResult(
        criterion="D", value=best_value, raw_value=best_value,
        n_restarts=n_restarts, n_iterations=n_iterations, converged=converged,
        best_parameters=best_params.tolist(), best_k=best_k)
