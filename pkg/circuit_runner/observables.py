"""
Position families and evaluation of the configured observables on a state.
"""
import re
from typing import Iterator, Optional

from measures.density import partial_trace
from measures.measure_types import DEFAULT_OPTIMIZERS, GMEResult, OptimizerConfig
from measures.negativity import log_negativity
from measures.geometric import geometric_entanglement
from measures.witnesses import i2_criterion, w4_criterion, w_criterion, w_start_for_i2
from state_engine.state_types import StateVector
from .circuit_types import Boundary, CircuitConfig, ObservableRow, ObservableSpec
from .seeding import observable_rng

_TERM = re.compile(r"^i(?:\+(\d*)x)?$")

REQUIRED_SPINS = {"W": (3,), "I2": (3, 4), "W4": (4,), "E": (2,), "D": (3,)}


def parse_positions_spec(spec: str) -> list[int]:
    """'(i,i+x,i+2x)' -> [0, 1, 2]: the multiple of x added to i for each spin."""
    body = spec.replace(" ", "")
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"positions spec must be parenthesized: {spec!r}")
    multipliers = []
    for term in body[1:-1].split(","):
        match = _TERM.match(term)
        if match is None:
            raise ValueError(f"cannot parse position {term!r} in {spec!r}")
        if match.group(0) == "i":
            multipliers.append(0)
        else:
            multipliers.append(int(match.group(1) or 1))
    if len(set(multipliers)) != len(multipliers):
        raise ValueError(f"positions in {spec!r} coincide")
    return multipliers


def max_separation(L: int, boundary: Boundary, multipliers: list[int]) -> int:
    span = max(multipliers)
    if span == 0:
        return 0
    if boundary == Boundary.PBC:
        return L // (span + 1)
    return (L - 1) // span


def enumerate_positions(L: int, boundary: Boundary, multipliers: list[int],
                        separations: Optional[list[int]] = None) -> Iterator[tuple[int, tuple[int, ...]]]:
    """
    Every (x, positions) of the family: all base sites i under PBC (taken mod L),
    all i keeping the last spin on the chain under OBC.
    """
    x_max = max_separation(L, boundary, multipliers)
    xs = range(1, x_max + 1) if separations is None else separations
    for x in xs:
        if not 1 <= x <= x_max:
            raise ValueError(f"separation {x} outside 1..{x_max} for L={L} {boundary.value}")
        if boundary == Boundary.PBC:
            bases = range(L)
        else:
            bases = range(L - max(multipliers) * x)
        for i in bases:
            yield x, tuple((i + k * x) % L for k in multipliers)


def positions_for(config: CircuitConfig, spec: ObservableSpec) -> list[tuple[Optional[int], tuple[int, ...]]]:
    if spec.sites is not None:
        for site in spec.sites:
            if not 0 <= site < config.L:
                raise ValueError(f"site {site} out of range for L={config.L}")
        return [(None, tuple(spec.sites))]
    multipliers = parse_positions_spec(spec.positions_spec)
    return list(enumerate_positions(config.L, config.boundary, multipliers, spec.separations))


def _optimizer(config: CircuitConfig, name: str) -> OptimizerConfig:
    return config.optimizer.get(name, DEFAULT_OPTIMIZERS.get(name))


def _result_meta(result: GMEResult) -> dict:
    meta = {"raw_value": result.raw_value, "n_restarts": result.n_restarts,
            "converged": result.converged, "fast_path": result.fast_path}
    if result.best_k is not None:
        meta["best_k"] = result.best_k
    return meta


def evaluate_observables(state: StateVector, config: CircuitConfig, realization_index: int,
                         layer: Optional[int] = None, layer_kind: Optional[str] = None,
                         observables: Optional[list[ObservableSpec]] = None) -> list[ObservableRow]:
    """
    Rows for every observable at every position of its family.

    W runs before I2 so that I2 at the same positions starts from the W optimum.
    """
    specs = config.observables if observables is None else observables
    specs = sorted(specs, key=lambda s: 0 if s.name == "W" else 1)
    w_results: dict[tuple[int, ...], GMEResult] = {}
    rows = []
    for spec in specs:
        for x, positions in positions_for(config, spec):
            if len(positions) not in REQUIRED_SPINS[spec.name]:
                raise ValueError(
                    f"{spec.name} needs {' or '.join(map(str, REQUIRED_SPINS[spec.name]))} spins, "
                    f"got positions {positions}")
            rho = partial_trace(state, positions)
            meta = {"x": x}
            if layer is not None:
                meta.update(layer=layer, layer_kind=layer_kind)

            if spec.name == "E":
                value = log_negativity(rho, [0])
            else:
                rng = observable_rng(config.master_seed, realization_index, spec.name, positions, layer)
                opt = _optimizer(config, spec.name)
                if spec.name == "W":
                    result = w_criterion(rho, opt, rng)
                    w_results[positions] = result
                elif spec.name == "I2":
                    warm = w_start_for_i2(w_results[positions]) if positions in w_results else None
                    result = i2_criterion(rho, opt, rng, warm_start=warm)
                elif spec.name == "W4":
                    result = w4_criterion(rho, opt, rng)
                else:
                    result = geometric_entanglement(rho, opt=opt, rng=rng)
                value = result.value
                meta.update(_result_meta(result))

            rows.append(ObservableRow(
                realization=realization_index, observable=spec.name,
                positions=list(positions), value=value, meta=meta))
    return rows
