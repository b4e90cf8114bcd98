from typing import Callable, Optional

from circuit_runner.circuit_types import Boundary, CircuitConfig, ObservableSpec
from state_engine.state_types import FloquetIsingFamily

PAIRS = "(i,i+x)"
TRIPLES = "(i,i+x,i+2x)"


def _fig4() -> CircuitConfig:
    return CircuitConfig(L=18, boundary=Boundary.OBC, p=0.3,
                         observables=[ObservableSpec(name="W", positions_spec=TRIPLES)])


def _fig3_negativity() -> CircuitConfig:
    return CircuitConfig(L=24, boundary=Boundary.PBC, p=0.17,
                         observables=[ObservableSpec(name="E", positions_spec=PAIRS)])


def _criticality(L: int) -> CircuitConfig:
    return CircuitConfig(L=L, boundary=Boundary.PBC, p=0.17, observables=[
        ObservableSpec(name="E", positions_spec=PAIRS),
        ObservableSpec(name="W", positions_spec=TRIPLES),
        ObservableSpec(name="I2", positions_spec=TRIPLES),
    ])


def _fig2_time() -> CircuitConfig:
    return CircuitConfig(
        L=14, boundary=Boundary.OBC, p=0.3, n_unitary_layers=20,
        unitary_family=FloquetIsingFamily(), time_resolved=True,
        observables=[ObservableSpec(name="D", sites=[4, 7, 10]),
                     ObservableSpec(name="W", sites=[4, 7, 10])])


PRESETS: dict[str, Callable[[], CircuitConfig]] = {
    "fig4": _fig4,
    "fig3-negativity": _fig3_negativity,
    "fig5-criticality": lambda: _criticality(24),
    "fig8-L16": lambda: _criticality(16),
    "fig2-time": _fig2_time,
}


def preset_config(name: str, L: Optional[int] = None, p: Optional[float] = None,
                  layers: Optional[int] = None, seed: Optional[int] = None) -> CircuitConfig:
    """A named experiment with the scale knobs (L, p, depth, seed) overridden."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    config = PRESETS[name]()
    overrides = {k: v for k, v in
                 {"L": L, "p": p, "n_unitary_layers": layers, "master_seed": seed}.items() if v is not None}
    # re-validate so overridden values pass the same checks as a config file
    return CircuitConfig.model_validate({**config.model_dump(), **overrides})
