import csv
from pathlib import Path
from typing import Optional

from .graph_types import Edge, SpacetimeGraph, SpanningGraph

LAYOUT_COLUMNS = ["u_site", "u_layer", "v_site", "v_layer", "edge_type", "in_gmin", "escape"]


def adjacency_text(graph: SpacetimeGraph) -> str:
    """One line per vertex: '<site>,<step>: <site>,<step> ...', neighbors sorted."""
    lines = []
    for v in sorted(graph.graph.nodes, key=lambda v: (v[1], v[0])):
        neighbors = " ".join(f"{s},{t}" for s, t in sorted(graph.graph[v], key=lambda w: (w[1], w[0])))
        lines.append(f"{v[0]},{v[1]}: {neighbors}".rstrip())
    return "\n".join(lines) + "\n"


def write_adjacency(graph: SpacetimeGraph, path: str | Path):
    Path(path).write_text(adjacency_text(graph), encoding="utf-8")


def write_layout(graph: SpacetimeGraph, path: str | Path, g_min: Optional[SpanningGraph] = None,
                 escapes: Optional[list[Edge]] = None):
    in_gmin = {tuple(sorted(e)) for e in (g_min.edges if g_min else [])}
    escaping = {tuple(sorted(e)) for e in (escapes or [])}
    rows = sorted((tuple(sorted((u, v))), kind) for u, v, kind in graph.graph.edges(data="type"))
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(LAYOUT_COLUMNS)
        for (u, v), kind in rows:
            key = (u, v)
            writer.writerow([u[0], u[1], v[0], v[1], kind.value, int(key in in_gmin), int(key in escaping)])
