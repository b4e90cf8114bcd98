"""
Genuine multipartite entanglement witnesses on 3- and 4-spin reduced states.

Every criterion is a lower-bound witness: a positive value proves GME, a
value of 0 proves nothing. Raw values at or below NUMERICAL_ZERO are reported
as 0.
"""
from functools import reduce
from typing import Optional

import numpy as np

from utils.errors import NumericalError
from .density import bipartitions, has_pure_party
from .measure_types import (
    DEFAULT_OPTIMIZERS, GMEResult, NUMERICAL_ZERO, OptimizerConfig, ReducedDensityMatrix)
from .optimizer import maximize

FILTER_TRACE_MIN = 1e-12
MAX_FILTER_REDRAWS = 100


def _clamp(raw: float) -> float:
    return raw if raw > NUMERICAL_ZERO else 0.0


def _fast_zero(criterion: str) -> GMEResult:
    return GMEResult(criterion=criterion, value=0.0, raw_value=0.0, fast_path=True)


def _check_spins(rho: ReducedDensityMatrix, allowed: tuple[int, ...], criterion: str):
    if rho.m not in allowed:
        raise ValueError(f"{criterion} needs a {' or '.join(map(str, allowed))}-spin state, got m={rho.m}")


# --- W: local-unitary maximized 3-spin criterion -------------------------------

def su2(theta: float, phi: float, lam: float) -> np.ndarray:
    return su2_batch(np.array([theta, phi, lam]))[0]


def su2_batch(angles: np.ndarray) -> np.ndarray:
    """(n, 2, 2) stack of SU(2) matrices from n consecutive (theta, phi, lam) triples."""
    theta, phi, lam = np.asarray(angles, dtype=float).reshape(-1, 3).T
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.empty((theta.size, 2, 2), dtype=complex)
    u[:, 0, 0] = c
    u[:, 0, 1] = -np.exp(1j * lam) * s
    u[:, 1, 0] = np.exp(1j * phi) * s
    u[:, 1, 1] = np.exp(1j * (phi + lam)) * c
    return u


def _local_unitary(angles: np.ndarray) -> np.ndarray:
    u1, u2, u3 = su2_batch(angles)
    return np.einsum("ab,cd,ef->acebdf", u1, u2, u3).reshape(8, 8)


def _w_terms(corner: complex, d: np.ndarray) -> float:
    d = np.clip(d, 0.0, None)
    return float(abs(corner) - np.sqrt(d[1] * d[6]) - np.sqrt(d[2] * d[5]) - np.sqrt(d[3] * d[4]))


def w_expression(matrix: np.ndarray) -> float:
    """|rho_18| - sqrt(rho_22 rho_77) - sqrt(rho_33 rho_66) - sqrt(rho_44 rho_55), 1-based."""
    return _w_terms(matrix[0, 7], np.diag(matrix).real)


def w_objective(matrix: np.ndarray, angles: np.ndarray) -> float:
    """w_expression(U rho U^dag) for U the product of the three su2 rotations in `angles`."""
    u = _local_unitary(angles)
    rotated = u @ matrix
    # only the diagonal and the (0, 7) corner of U rho U^dag enter the expression
    d = np.einsum("ij,ij->i", rotated, u.conj()).real
    return _w_terms(rotated[0] @ u[7].conj(), d)


def _sample_angles(rng: np.random.Generator, n_spins: int) -> np.ndarray:
    angles = rng.uniform(0.0, 2 * np.pi, size=(n_spins, 3))
    angles[:, 0] = rng.uniform(0.0, np.pi, size=n_spins)
    return angles.reshape(-1)


def w_criterion(rho3: ReducedDensityMatrix, opt: Optional[OptimizerConfig] = None,
                rng: Optional[np.random.Generator] = None) -> GMEResult:
    _check_spins(rho3, (3,), "W")
    opt = opt or DEFAULT_OPTIMIZERS["W"]
    rng = rng or np.random.default_rng(0)
    if has_pure_party(rho3):
        return _fast_zero("W")

    matrix = rho3.matrix

    def objective(angles):
        return w_objective(matrix, angles)

    outcome = maximize(
        objective, opt, rng,
        sample_start=lambda r: _sample_angles(r, 3),
        identity_start=np.zeros(9),
        label="W")
    return GMEResult(
        criterion="W", value=_clamp(outcome.best_value), raw_value=outcome.best_value,
        n_restarts=outcome.n_restarts, n_iterations=outcome.n_iterations,
        converged=outcome.converged, best_parameters=outcome.best_x.tolist())


# --- I2: two-copy swap criterion over product states ---------------------------

def _qubit(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _bloch_angles(v: np.ndarray) -> tuple[float, float]:
    theta = 2 * np.arccos(np.clip(abs(v[0]), 0.0, 1.0))
    phi = float(np.angle(v[1]) - np.angle(v[0])) if abs(v[1]) > 0 else 0.0
    return float(theta), phi


def i2_objective(matrix: np.ndarray, qubits: list[np.ndarray]) -> float:
    """
    sqrt(<Phi| rho x rho Pi |Phi>) - sum_i sqrt(<Phi| P_i^dag rho x rho P_i |Phi>)
    for |Phi> = |phi_1> ... |phi_2m>.

    On product states both copies factorize: the first term is |<a|rho|b>|
    with a = phi_1..phi_m, b = phi_m+1..phi_2m, and each partial swap P_i
    exchanges the factors of party set A_i between a and b.
    """
    m = len(qubits) // 2
    a, b = qubits[:m], qubits[m:]
    ket_a, ket_b = reduce(np.kron, a), reduce(np.kron, b)
    value = abs(np.vdot(ket_a, matrix @ ket_b))
    for swapped in bipartitions(m):
        a_i = [b[k] if k in swapped else a[k] for k in range(m)]
        b_i = [a[k] if k in swapped else b[k] for k in range(m)]
        ka, kb = reduce(np.kron, a_i), reduce(np.kron, b_i)
        value -= np.sqrt(max(np.vdot(ka, matrix @ ka).real, 0.0) * max(np.vdot(kb, matrix @ kb).real, 0.0))
    return float(value)


def w_start_for_i2(w_result: GMEResult) -> Optional[np.ndarray]:
    """
    Product states at which the I2 objective equals the W value of `w_result`.

    For local unitaries U_k, <0..0|U rho U^dag|1..1> = <a|rho|b> with
    a_k = conj(U_k[0, :]) and b_k = conj(U_k[1, :]); the subtracted diagonal
    terms map onto the partial swaps the same way.
    """
    if len(w_result.best_parameters) != 9:
        return None
    angles = np.asarray(w_result.best_parameters)
    rows = su2_batch(angles)
    first = [_bloch_angles(u[0, :].conj()) for u in rows]
    second = [_bloch_angles(u[1, :].conj()) for u in rows]
    return np.array([x for pair in first + second for x in pair])


def i2_criterion(rho_m: ReducedDensityMatrix, opt: Optional[OptimizerConfig] = None,
                 rng: Optional[np.random.Generator] = None,
                 warm_start: Optional[np.ndarray] = None) -> GMEResult:
    _check_spins(rho_m, (3, 4), "I2")
    opt = opt or DEFAULT_OPTIMIZERS["I2"]
    rng = rng or np.random.default_rng(0)
    if has_pure_party(rho_m):
        return _fast_zero("I2")

    m = rho_m.m
    matrix = rho_m.matrix

    def objective(params):
        return i2_objective(matrix, [_qubit(params[2 * k], params[2 * k + 1]) for k in range(2 * m)])

    def sample(r):
        params = np.empty(4 * m)
        params[0::2] = np.arccos(r.uniform(-1.0, 1.0, size=2 * m))
        params[1::2] = r.uniform(0.0, 2 * np.pi, size=2 * m)
        return params

    # |0..0> on the first copy, |1..1> on the second
    identity = np.zeros(4 * m)
    identity[2 * m::2] = np.pi

    outcome = maximize(
        objective, opt, rng, sample_start=sample, identity_start=identity,
        warm_starts=[] if warm_start is None else [np.asarray(warm_start)],
        label="I2")
    return GMEResult(
        criterion="I2", value=_clamp(outcome.best_value), raw_value=outcome.best_value,
        n_restarts=outcome.n_restarts, n_iterations=outcome.n_iterations,
        converged=outcome.converged, best_parameters=outcome.best_x.tolist())


# --- W4: local-filter maximized 4-spin criterion ------------------------------

_W4_OFF_DIAGONAL = [(1, 2), (1, 4), (1, 8), (2, 4), (2, 8), (4, 8)]
_W4_DIAGONAL = [1, 2, 4, 8]
_W4_SQRT_PARTNERS = [3, 5, 6, 9, 10, 12]


def w4_expression(matrix: np.ndarray) -> float:
    """The 4-spin W-state criterion in 0-based indices of the canonical basis."""
    d = np.clip(np.diag(matrix).real, 0.0, None)
    value = sum(abs(matrix[i, j]) for i, j in _W4_OFF_DIAGONAL)
    value -= sum(d[i] for i in _W4_DIAGONAL)
    value -= sum(np.sqrt(d[0] * d[j]) for j in _W4_SQRT_PARTNERS)
    return float(value)


def _filters(params: np.ndarray) -> Optional[list[np.ndarray]]:
    filters = []
    for k in range(4):
        chunk = params[8 * k:8 * k + 8]
        f = (chunk[:4] + 1j * chunk[4:]).reshape(2, 2)
        norm = np.linalg.norm(f)
        if norm < FILTER_TRACE_MIN:
            return None
        filters.append(f / norm)
    return filters


def _filtered(matrix: np.ndarray, params: np.ndarray) -> Optional[np.ndarray]:
    """Filtered state renormalized to unit trace, None when the filter annihilates it."""
    filters = _filters(params)
    if filters is None:
        return None
    f = reduce(np.kron, filters)
    out = f @ matrix @ f.conj().T
    trace = np.trace(out).real
    if trace < FILTER_TRACE_MIN:
        return None
    return out / trace


def w4_criterion(rho4: ReducedDensityMatrix, opt: Optional[OptimizerConfig] = None,
                 rng: Optional[np.random.Generator] = None) -> GMEResult:
    _check_spins(rho4, (4,), "W4")
    opt = opt or DEFAULT_OPTIMIZERS["W4"]
    rng = rng or np.random.default_rng(0)
    if has_pure_party(rho4):
        return _fast_zero("W4")

    matrix = rho4.matrix

    def objective(params):
        filtered = _filtered(matrix, params)
        # a filter can always map the state to zero, where the expression is 0
        return 0.0 if filtered is None else w4_expression(filtered)

    def sample(r):
        for _ in range(MAX_FILTER_REDRAWS):
            params = r.standard_normal(32)
            if _filtered(matrix, params) is not None:
                return params
        raise NumericalError("could not draw a local filter that keeps the state")

    identity = np.zeros(32)
    for k in range(4):
        identity[8 * k] = identity[8 * k + 3] = 1 / np.sqrt(2)

    outcome = maximize(objective, opt, rng, sample_start=sample, identity_start=identity, label="W4")
    return GMEResult(
        criterion="W4", value=_clamp(outcome.best_value), raw_value=outcome.best_value,
        n_restarts=outcome.n_restarts, n_iterations=outcome.n_iterations,
        converged=outcome.converged, best_parameters=outcome.best_x.tolist())
