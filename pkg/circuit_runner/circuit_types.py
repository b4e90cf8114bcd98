from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from measures.measure_types import OptimizerConfig
from state_engine.state_types import HaarFamily, MeasurementEvent, StateVector, UnitaryFamily

ObservableName = Literal["W", "I2", "W4", "E", "D"]


class Boundary(str, Enum):
    OBC = "OBC"
    PBC = "PBC"


class LayerKind(str, Enum):
    UNITARY = "unitary"
    MEASUREMENT = "measurement"


class ObservableSpec(BaseModel):
    """
    One quantity to evaluate on final states, over a family of spin positions.
    """
    name: ObservableName = Field(..., description="W, I2, W4, E (log negativity) or D (geometric).")
    positions_spec: str = Field(
        "(i,i+x,i+2x)",
        description="Position template, e.g. '(i,i+x)' or '(i,i+x,i+2x)'; every admissible i and x is used.")
    separations: Optional[list[int]] = Field(
        None, description="Restrict to these x values; all admissible x when omitted.")
    sites: Optional[list[int]] = Field(
        None, description="One explicit position tuple; overrides the template.")


class CircuitConfig(BaseModel):
    """
    Everything needed to reproduce an ensemble of monitored brickwork circuits.
    """
    L: int = Field(..., ge=2, description="Number of qubits.")
    boundary: Boundary = Field(Boundary.OBC, description="OBC or PBC.")
    p: float = Field(..., ge=0.0, le=1.0, description="Per-site measurement probability in each measurement layer.")
    n_unitary_layers: int = Field(49, ge=1, description="Unitary layers; each is followed by a measurement layer.")
    unitary_family: UnitaryFamily = Field(
        default_factory=HaarFamily, discriminator="kind", description="Gate family.")
    master_seed: int = Field(0, ge=0, lt=2 ** 64, description="Root of all per-realization random streams.")
    observables: list[ObservableSpec] = Field(default_factory=list, description="Quantities evaluated per realization.")
    time_resolved: bool = Field(False, description="Evaluate observables after every layer instead of only at the end.")
    optimizer: dict[str, OptimizerConfig] = Field(
        default_factory=dict, description="Per-criterion optimizer overrides keyed by observable name.")


class Layer(BaseModel):
    index: int
    kind: LayerKind
    bonds: list[tuple[int, int]] = Field(default_factory=list)


class GateEvent(BaseModel):
    layer: int = Field(..., description="Global layer index.")
    bond: tuple[int, int] = Field(..., description="Ordered site pair the gate acted on.")
    gate_id: int = Field(..., description="Draw index in the realization's gate stream.")


class CircuitRecord(BaseModel):
    """
    Spacetime event log of one realization; enough to replay its states.
    """
    config: CircuitConfig
    realization_index: int
    gate_events: list[GateEvent] = Field(default_factory=list)
    measurement_events: list[MeasurementEvent] = Field(default_factory=list)


class ObservableRow(BaseModel):
    """
    One persisted value: a JSONL line of the observables file.
    """
    realization: int
    observable: ObservableName
    positions: list[int]
    value: float
    meta: dict[str, Any] = Field(default_factory=dict)


@dataclass
class RealizationResult:
    state: StateVector
    record: CircuitRecord
    rows: list[ObservableRow] = field(default_factory=list)

    @property
    def values(self) -> dict[tuple[str, tuple[int, ...]], float]:
        return {(row.observable, tuple(row.positions)): row.value
                for row in self.rows if row.meta.get("layer") is None}
