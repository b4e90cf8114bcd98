import numpy as np

from utils.errors import NumericalError
from .state_types import MeasurementEvent, StateVector, TwoQubitGate

# below this both outcomes are treated as impossible and the state as corrupt
MIN_BORN_PROBABILITY = 1e-14


def _check_site(site: int, n_qubits: int):
    if not 0 <= site < n_qubits:
        raise ValueError(f"site {site} out of range for {n_qubits} qubits")


def product_state(n_qubits: int, bits=None) -> StateVector:
    """Computational basis state; all-0 unless `bits` (site 0 first) is given."""
    bits = [0] * n_qubits if bits is None else list(bits)
    if len(bits) != n_qubits:
        raise ValueError(f"expected {n_qubits} bits, got {len(bits)}")
    amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
    amplitudes[int(''.join(str(b) for b in bits), 2) if bits else 0] = 1.0
    return StateVector(n_qubits=n_qubits, amplitudes=amplitudes)


def apply_two_qubit_gate(state: StateVector, gate: TwoQubitGate, sites: tuple[int, int]) -> StateVector:
    i, j = sites
    n = state.n_qubits
    _check_site(i, n)
    _check_site(j, n)
    if i == j:
        raise ValueError(f"gate sites must differ, got ({i}, {j})")
    if np.array_equal(gate.matrix, np.eye(4)):
        return StateVector(n_qubits=n, amplitudes=state.amplitudes.copy())

    u = gate.matrix.reshape(2, 2, 2, 2)
    out = np.tensordot(u, state.tensor, axes=([2, 3], [i, j]))
    out = np.moveaxis(out, (0, 1), (i, j))
    return StateVector(n_qubits=n, amplitudes=np.ascontiguousarray(out).reshape(-1))


def z_probabilities(state: StateVector, site: int) -> tuple[float, float]:
    _check_site(site, state.n_qubits)
    weights = np.abs(state.tensor) ** 2
    p0 = float(np.sum(np.take(weights, 0, axis=site)))
    p1 = float(np.sum(np.take(weights, 1, axis=site)))
    return p0, p1


def project_z(state: StateVector, site: int, outcome: int) -> tuple[StateVector, float]:
    """Projects `site` onto |outcome> and renormalizes; returns the pre-measurement probability."""
    p0, p1 = z_probabilities(state, site)
    if p0 < MIN_BORN_PROBABILITY and p1 < MIN_BORN_PROBABILITY:
        raise NumericalError(f"corrupt state: both Born probabilities of site {site} vanish")
    total = p0 + p1
    probability = (p0 if outcome == 0 else p1) / total
    if probability < MIN_BORN_PROBABILITY:
        raise NumericalError(
            f"outcome {outcome} on site {site} has Born probability {probability:.3e}")

    projected = state.tensor.copy()
    index = [slice(None)] * state.n_qubits
    index[site] = 1 - outcome
    projected[tuple(index)] = 0.0
    # renormalize right away so 2^L amplitudes do not drift over many layers
    projected /= np.sqrt(probability * total)
    return StateVector(n_qubits=state.n_qubits, amplitudes=projected.reshape(-1)), probability


def measure_z(state: StateVector, site: int, rng: np.random.Generator,
              layer: int = 0) -> tuple[StateVector, MeasurementEvent]:
    p0, p1 = z_probabilities(state, site)
    if p0 < MIN_BORN_PROBABILITY and p1 < MIN_BORN_PROBABILITY:
        raise NumericalError(f"corrupt state: both Born probabilities of site {site} vanish")
    outcome = 0 if rng.random() < p0 / (p0 + p1) else 1
    post, probability = project_z(state, site, outcome)
    event = MeasurementEvent(
        site=site, layer=layer, outcome=outcome, pre_probability=min(max(probability, 0.0), 1.0))
    return post, event
