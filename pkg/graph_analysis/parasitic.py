from typing import Optional, Sequence

import networkx as nx

from .graph_types import Edge, SpacetimeGraph, SpanningGraph


def _inside(graph: SpacetimeGraph, g_min: SpanningGraph) -> set:
    return g_min.vertices or {graph.final_vertex(s) for s in g_min.spanned}


def escape_edges(graph: SpacetimeGraph, g_min: SpanningGraph, B: Sequence[int]) -> list[Edge]:
    """
    Edges leaving V(G_min) whose outer end lies in a component of
    G - V(G_min) that contains the final vertex of some B site.
    """
    inside = _inside(graph, g_min)
    outside = graph.graph.subgraph(v for v in graph.graph if v not in inside)
    reaching_b = set()
    for component in nx.connected_components(outside):
        if any(graph.final_vertex(s) in component for s in B):
            reaching_b |= component
    escapes = []
    for u in sorted(inside):
        for w in sorted(graph.graph[u]):
            if w in reaching_b:
                escapes.append((u, w))
    return escapes


def b_contacts(graph: SpacetimeGraph, g_min: SpanningGraph, B: Sequence[int]) -> list[int]:
    """B sites whose final vertex G_min passes through: a leak of path length zero."""
    inside = _inside(graph, g_min)
    return sorted(s for s in B if graph.final_vertex(s) in inside)


def parasitic_score(graph: SpacetimeGraph, g_min: SpanningGraph,
                    A: Sequence[int], B: Optional[Sequence[int]] = None) -> float:
    """
    Count of ways the targets' minimal graph leaks into the rest of the chain
    at the final time: escape edges plus B final vertices inside G_min.
    B defaults to every site not in A.
    """
    if B is None:
        B = [s for s in range(graph.L) if s not in set(A)]
    return float(len(escape_edges(graph, g_min, B)) + len(b_contacts(graph, g_min, B)))
