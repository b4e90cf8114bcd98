from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import networkx as nx
from pydantic import BaseModel, Field

# (site, step): a site right after unitary step `step`
Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

MAX_TERMINALS = 8


class EdgeType(str, Enum):
    UNITARY = "UNITARY"
    IDLE = "IDLE"


class SpanningMode(str, Enum):
    UNRESTRICTED = "UNRESTRICTED"
    SINGLE_SEED = "SINGLE_SEED"


@dataclass
class SpacetimeGraph:
    """
    Undirected circuit graph. Vertices are (site, step) for step 0..n_steps;
    UNITARY edges join the two sites of a gate within its step, IDLE edges join
    (s, t) to (s, t + 1) unless s was measured between the two steps.
    """
    L: int
    n_steps: int
    graph: nx.Graph
    final_measured: frozenset[int] = frozenset()

    @property
    def final_step(self) -> int:
        return self.n_steps

    def final_vertex(self, site: int) -> Vertex:
        return site, self.n_steps

    def edges_of_type(self, edge_type: EdgeType) -> list[Edge]:
        return sorted(tuple(sorted((u, v))) for u, v, kind in self.graph.edges(data="type") if kind == edge_type)


@dataclass(frozen=True)
class Cone:
    seed_gate_id: int
    seed_step: int
    bond: tuple[int, int]
    vertices: frozenset[Vertex]
    final_sites: tuple[int, ...]
    parent: Optional[int] = None

    @property
    def width(self) -> int:
        return len(self.final_sites)


@dataclass
class ConeForest:
    """Cones that reach the final state, earliest seed first; `parent` indexes this list."""
    cones: list[Cone] = field(default_factory=list)

    @property
    def roots(self) -> list[int]:
        return [k for k, cone in enumerate(self.cones) if cone.parent is None]

    def children(self, index: int) -> list[int]:
        return [k for k, cone in enumerate(self.cones) if cone.parent == index]


class SpanningGraph(BaseModel):
    """
    Minimal connected edge set joining the final-time vertices of the largest
    connectable subset of the target spins.
    """
    targets: list[int] = Field(..., description="Requested target sites.")
    spanned: list[int] = Field(..., description="Targets whose final vertices the edge set joins.")
    connected: bool = Field(..., description="Whether every target is spanned.")
    edge_count: int = Field(..., description="Number of edges; the quantity that is minimized.")
    edges: list[tuple[tuple[int, int], tuple[int, int]]] = Field(default_factory=list)
    seeds: list[int] = Field(default_factory=list, description="Gate ids of the earliest unitaries contained.")
    seed_step: Optional[int] = Field(None, description="Step of those earliest unitaries.")
    mode: SpanningMode = SpanningMode.UNRESTRICTED

    @property
    def vertices(self) -> set[Vertex]:
        return {v for edge in self.edges for v in edge}


class GraphRow(BaseModel):
    """One persisted line of graphs.jsonl."""
    realization: int
    targets: list[int]
    spanned: list[int]
    connected: bool
    edge_count: int
    parasitic_score: Optional[float] = None
    seeds: list[int] = Field(default_factory=list)
    mode: SpanningMode = SpanningMode.UNRESTRICTED
