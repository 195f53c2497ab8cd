"""The multilayer graph: a transport layer, an MPLS layer, and one layer per flow.

Vertices are (layer, node) pairs. Intra-layer edges live inside one layer;
inter-layer edges tie a vertex to its mirror in the adjacent layer. MPLS
intra-layer edges are logical links and carry the transport path realizing
them.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx

from mlsynth.errors import LayerNotFound, UnknownLogicalLink, Violation
from mlsynth.instance import Demand

if TYPE_CHECKING:
    from mlsynth.optimizer import Solution

UNBOUNDED = math.inf


class LayerKind(enum.IntEnum):
    TRANSPORT = 0
    MPLS = 1
    FLOW = 2


class EdgeKind(enum.Enum):
    INTRA = "intra"
    INTER = "inter"


class LayerId(NamedTuple):
    kind: LayerKind
    flow_index: int | None = None

    def __str__(self) -> str:
        if self.kind is LayerKind.FLOW:
            return f"flow{self.flow_index}"
        return self.kind.name.lower()

    def sort_key(self) -> tuple[int, int]:
        return (int(self.kind), -1 if self.flow_index is None else self.flow_index)


TRANSPORT = LayerId(LayerKind.TRANSPORT)
MPLS = LayerId(LayerKind.MPLS)


def flow_layer(index: int) -> LayerId:
    return LayerId(LayerKind.FLOW, index)


class LayeredVertex(NamedTuple):
    layer: LayerId
    node: str

    def __str__(self) -> str:
        return f"{self.layer}:{self.node}"


class MlgEdge(NamedTuple):
    id: str
    u: LayeredVertex
    v: LayeredVertex
    kind: EdgeKind
    weight: float = 0
    capacity: float = UNBOUNDED
    realization: tuple[str, ...] = ()
    mirrors: str | None = None  # flow-layer edges: id of the MPLS link they stand for


@dataclass(frozen=True)
class LogicalLink:
    """A candidate MPLS link: LSR endpoints plus the transport path under it."""

    id: str
    a: str
    b: str
    nodes: tuple[str, ...]
    edges: tuple[str, ...]
    unit_cost: float

    @property
    def hops(self) -> int:
        return len(self.edges)

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


def logical_link_id(nodes: Iterable[str]) -> str:
    """Stable id of the logical link over a transport node sequence (either direction)."""
    seq = tuple(nodes)
    if seq[-1] < seq[0]:
        seq = seq[::-1]
    return "L:" + "~".join(seq)


def make_logical_link(nodes: Iterable[str], adjacency: dict[str, dict[str, str]],
                      channel_cost: dict[str, float]) -> LogicalLink:
    seq = tuple(nodes)
    if seq[-1] < seq[0]:
        seq = seq[::-1]
    edges = tuple(adjacency[u][v] for u, v in zip(seq, seq[1:]))
    return LogicalLink(logical_link_id(seq), seq[0], seq[-1], seq, edges,
                       sum(channel_cost[e] for e in edges))


@dataclass(frozen=True)
class MultilayerGraph:
    """Immutable MLG = (layers, vertices, edges) plus the demands the flow layers carry."""

    layers: tuple[LayerId, ...]
    vertices: tuple[LayeredVertex, ...]
    edges: tuple[MlgEdge, ...]
    vertex_weights: dict[LayeredVertex, float] = field(default_factory=dict)
    demands: tuple[Demand, ...] = ()
    channel_capacity: float = 1

    def edges_by_id(self) -> dict[str, MlgEdge]:
        cached = self.__dict__.get("_by_id")
        if cached is None:
            cached = {e.id: e for e in self.edges}
            object.__setattr__(self, "_by_id", cached)
        return cached

    def logical_links(self) -> dict[str, LogicalLink]:
        """The MPLS-layer candidate links keyed by id."""
        cached = self.__dict__.get("_links")
        if cached is None:
            trans = {e.id: e for e in self.edges
                     if e.kind is EdgeKind.INTRA and e.u.layer.kind is LayerKind.TRANSPORT}
            cached = {}
            for e in self.edges:
                if e.kind is not EdgeKind.INTRA or e.u.layer.kind is not LayerKind.MPLS:
                    continue
                nodes = [e.u.node]
                for tid in e.realization:
                    te = trans[tid]
                    nodes.append(te.v.node if te.u.node == nodes[-1] else te.u.node)
                cached[e.id] = LogicalLink(e.id, e.u.node, e.v.node, tuple(nodes),
                                           e.realization, e.weight)
            object.__setattr__(self, "_links", cached)
        return cached

    def lsr_candidates(self) -> tuple[str, ...]:
        return tuple(v.node for v in self.vertices if v.layer == MPLS)

    def transport_edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges
                     if e.kind is EdgeKind.INTRA and e.u.layer == TRANSPORT)


def validate(mlg: MultilayerGraph) -> list[Violation]:
    """Every structural invariant violation of ``mlg``; empty when well formed."""
    out: list[Violation] = []
    kinds = Counter(layer.kind for layer in mlg.layers)
    for kind in (LayerKind.TRANSPORT, LayerKind.MPLS):
        if kinds[kind] != 1:
            out.append(Violation("LAYER_COUNT", kind.name, f"{kinds[kind]} layers, expected 1"))
    flow_seen: set[int] = set()
    for layer in mlg.layers:
        if (layer.kind is LayerKind.FLOW) != (layer.flow_index is not None):
            out.append(Violation("FLOW_INDEX", str(layer), "flow_index present iff flow layer"))
        elif layer.kind is LayerKind.FLOW:
            if layer.flow_index in flow_seen:
                out.append(Violation("DUPLICATE_FLOW_INDEX", str(layer)))
            elif not 0 <= layer.flow_index < len(mlg.demands):
                out.append(Violation("FLOW_WITHOUT_DEMAND", str(layer)))
            flow_seen.add(layer.flow_index)
    for i in range(len(mlg.demands)):
        if i not in flow_seen:
            out.append(Violation("DEMAND_WITHOUT_FLOW", f"demands[{i}]"))
    keys = [layer.sort_key() for layer in mlg.layers]
    if keys != sorted(keys):
        out.append(Violation("LAYER_ORDER", "layers"))

    layer_set = set(mlg.layers)
    vertex_set: set[LayeredVertex] = set()
    by_kind: dict[LayerKind, set[str]] = {k: set() for k in LayerKind}
    for v in mlg.vertices:
        if v in vertex_set:
            out.append(Violation("DUPLICATE_VERTEX", str(v)))
        vertex_set.add(v)
        if v.layer not in layer_set:
            out.append(Violation("UNKNOWN_LAYER", str(v)))
        if v.layer.kind is not LayerKind.FLOW:
            by_kind[v.layer.kind].add(v.node)
    for v in mlg.vertices:
        if v.layer.kind is LayerKind.MPLS and v.node not in by_kind[LayerKind.TRANSPORT]:
            out.append(Violation("MISSING_MIRROR", str(v), "no transport vertex"))
        if v.layer.kind is LayerKind.FLOW and v.node not in by_kind[LayerKind.MPLS]:
            out.append(Violation("MISSING_MIRROR", str(v), "no MPLS vertex"))
    for v, w in mlg.vertex_weights.items():
        if w < 0:
            out.append(Violation("NEGATIVE_WEIGHT", str(v)))

    transport: dict[str, MlgEdge] = {}
    ids: set[str] = set()
    pairs: Counter[tuple] = Counter()
    for e in mlg.edges:
        if e.id in ids:
            out.append(Violation("DUPLICATE_EDGE_ID", e.id))
        ids.add(e.id)
        if e.weight < 0:
            out.append(Violation("NEGATIVE_WEIGHT", e.id))
        if e.capacity < 0:
            out.append(Violation("NEGATIVE_CAPACITY", e.id))
        for end in (e.u, e.v):
            if end not in vertex_set:
                out.append(Violation("UNKNOWN_VERTEX", e.id, str(end)))
        if e.kind is EdgeKind.INTRA:
            if e.u.layer != e.v.layer:
                out.append(Violation("LAYER_MISMATCH", e.id, "intra-layer edge spans layers"))
                continue
            if e.u.node == e.v.node:
                out.append(Violation("SELF_LOOP", e.id))
                continue
            key = (e.u.layer, frozenset((e.u.node, e.v.node)))
            if e.u.layer == MPLS:
                key += (e.realization,)
            elif e.u.layer.kind is LayerKind.FLOW:
                key += (e.mirrors,)
            pairs[key] += 1
            if pairs[key] == 2:
                out.append(Violation("PARALLEL_EDGE", e.id))
            if e.u.layer == TRANSPORT:
                transport[e.id] = e
            if e.u.layer != MPLS and e.realization:
                out.append(Violation("UNEXPECTED_REALIZATION", e.id))
        else:
            gap = abs(int(e.u.layer.kind) - int(e.v.layer.kind))
            if gap != 1:
                out.append(Violation("NON_ADJACENT_LAYERS", e.id, f"{e.u.layer}-{e.v.layer}"))
            if e.u.node != e.v.node:
                out.append(Violation("MIRROR_MISMATCH", e.id, f"{e.u} vs {e.v}"))
            if e.realization:
                out.append(Violation("UNEXPECTED_REALIZATION", e.id))

    mpls_pairs = {e.id: frozenset((e.u.node, e.v.node)) for e in mlg.edges
                  if e.kind is EdgeKind.INTRA and e.u.layer == MPLS}
    for e in mlg.edges:
        if e.kind is not EdgeKind.INTRA or e.u.layer != e.v.layer:
            continue
        if e.u.layer.kind is LayerKind.FLOW:
            if mpls_pairs.get(e.mirrors) != frozenset((e.u.node, e.v.node)):
                out.append(Violation("MIRROR_MISMATCH", e.id, f"mirrors {e.mirrors}"))
            continue
        if e.u.layer != MPLS:
            continue
        if not e.realization:
            out.append(Violation("EMPTY_REALIZATION", e.id))
            continue
        problem = _realization_problem(e, transport)
        if problem:
            out.append(Violation("BROKEN_REALIZATION", e.id, problem))
    return out


def _realization_problem(e: MlgEdge, transport: dict[str, MlgEdge]) -> str:
    node = e.u.node
    visited = {node}
    for tid in e.realization:
        te = transport.get(tid)
        if te is None:
            return f"{tid} is not a transport edge"
        if node == te.u.node:
            node = te.v.node
        elif node == te.v.node:
            node = te.u.node
        else:
            return f"{tid} does not continue the path at {node}"
        if node in visited:
            return f"path revisits {node}"
        visited.add(node)
    if node != e.v.node:
        return f"path ends at {node}, not {e.v.node}"
    return ""


def layer_subgraph(mlg: MultilayerGraph, layer: LayerId) -> nx.MultiGraph:
    """Vertices and intra-layer edges of one layer, keyed by edge id."""
    if layer not in mlg.layers:
        raise LayerNotFound(str(layer))
    g = nx.MultiGraph(layer=str(layer))
    for v in mlg.vertices:
        if v.layer == layer:
            g.add_node(v.node, weight=mlg.vertex_weights.get(v, 0))
    for e in mlg.edges:
        if e.kind is EdgeKind.INTRA and e.u.layer == layer:
            g.add_edge(e.u.node, e.v.node, key=e.id, weight=e.weight,
                       capacity=e.capacity, realization=e.realization)
    return g


def physical_load(mlg: MultilayerGraph, sol: Solution) -> dict[str, float]:
    """Bandwidth provisioned on each transport edge by the solution's channels."""
    load = dict.fromkeys(mlg.transport_edge_ids(), 0)
    by_id = mlg.edges_by_id()
    for link in sol.logical_links:
        e = by_id.get(link.id)
        if e is None or e.kind is not EdgeKind.INTRA or e.u.layer != MPLS:
            raise UnknownLogicalLink(link.id)
        for tid in e.realization:
            load[tid] += link.channels * e.capacity
    return load
