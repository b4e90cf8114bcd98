import networkx as nx

from circuit_runner.circuit_types import CircuitRecord
from .graph_types import EdgeType, SpacetimeGraph


def build_spacetime_graph(record: CircuitRecord) -> SpacetimeGraph:
    """
    Unitary layer 2t sits at step t; measurement layer 2t + 1 cuts the IDLE
    edge from step t to t + 1 at every measured site. The closing measurement
    layer has no later step to cut and is kept as `final_measured` only.
    """
    config = record.config
    L, last = config.L, config.n_unitary_layers - 1
    g = nx.Graph()
    g.add_nodes_from(((s, t) for t in range(last + 1) for s in range(L)), measured=False)

    measured_after = {}
    for event in record.measurement_events:
        step = (event.layer - 1) // 2
        measured_after.setdefault(step, set()).add(event.site)
        if step < last:
            g.nodes[(event.site, step)]["measured"] = True

    for event in record.gate_events:
        i, j = event.bond
        t = event.layer // 2
        g.add_edge((i, t), (j, t), type=EdgeType.UNITARY, gate_id=event.gate_id, layer=event.layer)

    for t in range(last):
        cut = measured_after.get(t, set())
        for s in range(L):
            if s not in cut:
                g.add_edge((s, t), (s, t + 1), type=EdgeType.IDLE, layer=2 * t + 1)

    return SpacetimeGraph(L=L, n_steps=last, graph=g,
                          final_measured=frozenset(measured_after.get(last, set())))
