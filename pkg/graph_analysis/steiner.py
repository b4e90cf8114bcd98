"""
Minimum-edge Steiner trees on the spacetime graph (Dreyfus-Wagner over
terminal subsets, exact for up to MAX_TERMINALS terminals).
"""
import heapq
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .cones import cones_of
from .graph_types import (
    MAX_TERMINALS, Edge, EdgeType, SpacetimeGraph, SpanningGraph, SpanningMode, Vertex)


def _edge(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u <= v else (v, u)


def _edge_weights(g: nx.Graph) -> tuple[dict[Edge, int], int]:
    """
    Exact integer weights: `unit` per edge minus a distinct power-of-two bonus,
    largest for the lexicographically first edge. The bonuses of any edge set
    sum to less than `unit`, so a lighter tree has fewer edges or, at equal
    size, is lexicographically first (the smallest edge where two sets differ
    belongs to it).
    """
    ranked = sorted(_edge(u, v) for u, v in g.edges)
    unit = 1 << len(ranked)
    return {e: unit - (1 << (len(ranked) - 1 - r)) for r, e in enumerate(ranked)}, unit


def steiner_tree(g: nx.Graph, terminals: Sequence[Vertex]) -> Optional[set[Edge]]:
    """
    Minimum edge set connecting `terminals` in `g`, None if they are not all
    in one component.

    Vertices are (site, step) pairs. Among trees with the fewest edges the one
    reaching the earliest step wins, then the lexicographically first sorted
    edge list. The earliest step of a minimal tree is its seed step: its
    lowest vertex is not a leaf, so a gate edge leaves it sideways.
    """
    terminals = list(dict.fromkeys(terminals))
    if len(terminals) <= 1:
        return set()
    nodes = sorted(g.nodes, key=lambda v: (v[1], v[0]))
    index = {v: k for k, v in enumerate(nodes)}
    weight, unit = _edge_weights(g)
    adjacency = [[(index[w], weight[_edge(v, w)]) for w in sorted(g[v])] for v in nodes]
    n, k = len(nodes), len(terminals)
    full = (1 << k) - 1
    unreached = unit * (len(weight) + 2)

    cost = np.full((full + 1, n), unreached, dtype=object)
    split = np.zeros((full + 1, n), dtype=np.int64)
    pred = np.full((full + 1, n), -1, dtype=np.int64)
    for q, t in enumerate(terminals):
        cost[1 << q, index[t]] = 0

    for mask in range(1, full + 1):
        row = cost[mask]
        low = mask & -mask
        if mask != low:
            sub = (mask - 1) & mask
            while sub:
                if sub & low:
                    merged = cost[sub] + cost[mask ^ sub]
                    better = (merged < row).astype(bool)
                    row[better] = merged[better]
                    split[mask, better] = sub
                sub = (sub - 1) & mask

        # shortest-path relaxation seeded with the merged costs
        heap = [(row[v], int(v)) for v in np.flatnonzero((row < unreached).astype(bool))]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if d > row[u]:
                continue
            for w, step in adjacency[u]:
                if d + step < row[w]:
                    row[w] = d + step
                    pred[mask, w] = u
                    split[mask, w] = 0
                    heapq.heappush(heap, (d + step, w))

    final = cost[full]
    reachable = [v for v in range(n) if final[v] < unreached]
    if not reachable:
        return None
    # cost[full, v] is the lightest tree through v; its edge count rounds the weight up to whole units
    size = {v: -(-final[v] // unit) for v in reachable}
    fewest = min(size.values())
    optimal = [v for v in reachable if size[v] == fewest]
    earliest = min(nodes[v][1] for v in optimal)
    root = min((v for v in optimal if nodes[v][1] == earliest), key=lambda v: final[v])

    edges: set[Edge] = set()
    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        if pred[mask, v] >= 0:
            u = int(pred[mask, v])
            edges.add(_edge(nodes[u], nodes[v]))
            stack.append((mask, u))
        elif split[mask, v]:
            sub = int(split[mask, v])
            stack += [(sub, v), (mask ^ sub, v)]
    return edges


def _gates(graph: SpacetimeGraph, edges: set[Edge]) -> list[tuple[int, int]]:
    return sorted(
        (u[1], graph.graph.edges[u, v]["gate_id"]) for u, v in edges
        if graph.graph.edges[u, v]["type"] == EdgeType.UNITARY)


def _preference(graph: SpacetimeGraph, edges: set[Edge]) -> tuple:
    """Fewest edges, then earliest seed step, then lexicographic edge order."""
    unitary = _gates(graph, edges)
    return len(edges), unitary[0][0] if unitary else graph.n_steps + 1, sorted(edges)


def _spanning(graph: SpacetimeGraph, targets: list[int], spanned: list[int], edges: set[Edge],
              mode: SpanningMode) -> SpanningGraph:
    unitary = _gates(graph, edges)
    seed_step = unitary[0][0] if unitary else None
    return SpanningGraph(
        targets=targets, spanned=spanned, connected=len(spanned) == len(targets),
        edge_count=len(edges), edges=sorted(edges),
        seeds=[gate_id for step, gate_id in unitary if step == seed_step],
        seed_step=seed_step, mode=mode)


def _check_targets(graph: SpacetimeGraph, targets: Sequence[int]) -> list[int]:
    targets = list(targets)
    if not targets:
        raise ValueError("target list is empty")
    if len(targets) > MAX_TERMINALS:
        raise ValueError(f"at most {MAX_TERMINALS} targets are supported, got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct: {targets}")
    for site in targets:
        if not 0 <= site < graph.L:
            raise ValueError(f"target {site} out of range for L={graph.L}")
    return targets


def minimal_spanning_graph(graph: SpacetimeGraph, target_spins: Sequence[int],
                           mode: SpanningMode = SpanningMode.UNRESTRICTED) -> SpanningGraph:
    """
    Fewest edges joining the final-time vertices of as many targets as possible.

    UNRESTRICTED searches the whole graph; the component holding the most
    targets wins, ties going to the one with the lowest target. SINGLE_SEED only
    uses edges inside one gate's forward cone, picking the cone that covers
    the most targets, then the fewest edges, then the earliest seed step,
    then the lexicographically first edge list. Within one search the tree
    follows the same order (see `steiner_tree`).
    """
    targets = _check_targets(graph, target_spins)

    if mode == SpanningMode.UNRESTRICTED:
        groups: dict[int, list[int]] = {}
        component_of = {}
        for number, component in enumerate(nx.connected_components(graph.graph)):
            for v in component:
                component_of[v] = number
        for site in targets:
            groups.setdefault(component_of[graph.final_vertex(site)], []).append(site)
        spanned = sorted(max(groups.values(), key=lambda sites: (len(sites), -min(sites))))
        component = nx.node_connected_component(graph.graph, graph.final_vertex(spanned[0]))
        edges = steiner_tree(graph.graph.subgraph(component),
                             [graph.final_vertex(s) for s in spanned])
        return _spanning(graph, targets, spanned, edges, mode)

    best = None
    forest = cones_of(graph)
    coverage = [sorted(set(targets) & set(cone.final_sites)) for cone in forest.cones]
    most = max((len(c) for c in coverage), default=0)
    if most >= 2:
        for cone, covered in zip(forest.cones, coverage):
            if len(covered) != most:
                continue
            edges = steiner_tree(graph.graph.subgraph(cone.vertices),
                                 [graph.final_vertex(s) for s in covered])
            if edges is not None and (best is None or _preference(graph, edges) < _preference(graph, best[1])):
                best = (covered, edges)
    if best is None:
        return _spanning(graph, targets, [min(targets)], set(), mode)
    return _spanning(graph, targets, best[0], best[1], mode)
