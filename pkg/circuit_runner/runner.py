from collections import defaultdict
from typing import Iterator

from state_engine.gates import GateSource
from state_engine.state_types import StateVector
from state_engine.statevector import apply_two_qubit_gate, measure_z, product_state, project_z
from .circuit_types import CircuitConfig, CircuitRecord, GateEvent, LayerKind, RealizationResult
from .observables import evaluate_observables
from .schedule import build_layer_schedule
from .seeding import realization_streams


def run_realization(config: CircuitConfig, realization_index: int, evaluate: bool = True) -> RealizationResult:
    """
    One monitored circuit from |0...0>: each unitary layer applies a gate to
    every bond of its parity, each measurement layer measures every site
    independently with probability p.

    Everything random comes from child(master_seed, realization_index), so
    the record and the rows are reproducible from those two numbers.
    """
    streams = realization_streams(config.master_seed, realization_index)
    gates = GateSource(config.unitary_family, streams.gates)
    record = CircuitRecord(config=config, realization_index=realization_index)
    state = product_state(config.L)
    rows = []

    for layer in build_layer_schedule(config):
        if layer.kind == LayerKind.UNITARY:
            for bond in layer.bonds:
                gate_id, gate = gates.next_gate()
                state = apply_two_qubit_gate(state, gate, bond)
                record.gate_events.append(GateEvent(layer=layer.index, bond=bond, gate_id=gate_id))
        else:
            # one draw per site in every layer keeps the site stream aligned across p
            draws = streams.sites.random(config.L)
            for site in range(config.L):
                if draws[site] < config.p:
                    state, event = measure_z(state, site, streams.outcomes, layer=layer.index)
                    record.measurement_events.append(event)
        if evaluate and config.time_resolved:
            rows += evaluate_observables(state, config, realization_index,
                                         layer=layer.index, layer_kind=layer.kind.value)

    if evaluate:
        rows += evaluate_observables(state, config, realization_index)
    return RealizationResult(state=state, record=record, rows=rows)


def replay_states(record: CircuitRecord) -> Iterator[tuple[int, StateVector]]:
    """
    (layer index, state after that layer) for every layer of the record.

    Gates are regenerated from the realization's gate stream by gate id and the
    recorded outcomes are forced, so no random choice is made again.
    """
    config = record.config
    gates = GateSource(config.unitary_family, realization_streams(config.master_seed, record.realization_index).gates)
    gates_by_layer = defaultdict(list)
    for event in record.gate_events:
        gates_by_layer[event.layer].append(event)
    measurements_by_layer = defaultdict(list)
    for event in record.measurement_events:
        measurements_by_layer[event.layer].append(event)

    state = product_state(config.L)
    for layer in build_layer_schedule(config):
        for event in sorted(gates_by_layer[layer.index], key=lambda e: e.gate_id):
            gate_id, gate = gates.next_gate()
            while gate_id < event.gate_id:
                gate_id, gate = gates.next_gate()
            state = apply_two_qubit_gate(state, gate, event.bond)
        for event in measurements_by_layer[layer.index]:
            state, _ = project_z(state, event.site, event.outcome)
        yield layer.index, state


def replay_realization(record: CircuitRecord) -> StateVector:
    state = product_state(record.config.L)
    for _, state in replay_states(record):
        pass
    return state
