from circuit_runner.circuit_types import CircuitRecord
from .graph_types import Cone, ConeForest, EdgeType, SpacetimeGraph
from .spacetime import build_spacetime_graph


def _partners(graph: SpacetimeGraph, step: int) -> dict[int, int]:
    partners = {}
    for s in range(graph.L):
        for (site, _), data in graph.graph[(s, step)].items():
            if data["type"] == EdgeType.UNITARY:
                partners[s] = site
    return partners


def forward_cone(graph: SpacetimeGraph, bond: tuple[int, int], step: int) -> set[tuple[int, int]]:
    """
    Vertices reachable from a gate by moving forward along IDLE edges and
    across the gates met on the way.
    """
    active = set(bond)
    vertices = {(s, step) for s in active}
    for t in range(step + 1, graph.n_steps + 1):
        active = {s for s in active if graph.graph.has_edge((s, t - 1), (s, t))}
        if not active:
            break
        partners = _partners(graph, t)
        active |= {partners[s] for s in active if s in partners}
        vertices |= {(s, t) for s in active}
    return vertices


def entanglement_cones(record: CircuitRecord) -> ConeForest:
    """Forward cones of every gate of the record that reach the final step."""
    return cones_of(build_spacetime_graph(record))


def cones_of(graph: SpacetimeGraph) -> ConeForest:
    """
    Forward cones of every gate in `graph`, earliest seed first.

    A cone's parent is the latest-seeded earlier cone that already contains
    both of its seed vertices, so each cone hangs below the cone it branches
    from.
    """
    final = graph.final_step
    cones: list[Cone] = []
    gates = sorted(
        (data["layer"], data["gate_id"], (u[0], v[0]))
        for u, v, data in graph.graph.edges(data=True) if data["type"] == EdgeType.UNITARY)
    for layer, gate_id, bond in gates:
        step = layer // 2
        vertices = forward_cone(graph, bond, step)
        final_sites = tuple(sorted(s for s, t in vertices if t == final))
        if not final_sites:
            continue
        seed_vertices = {(bond[0], step), (bond[1], step)}
        parent = None
        for k in range(len(cones) - 1, -1, -1):
            if cones[k].seed_step < step and seed_vertices <= cones[k].vertices:
                parent = k
                break
        cones.append(Cone(
            seed_gate_id=gate_id, seed_step=step, bond=bond,
            vertices=frozenset(vertices), final_sites=final_sites, parent=parent))
    return ConeForest(cones=cones)
