"""Construction of the redundant multilayer graph from an instance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from mlsynth.errors import ParamsInfeasible
from mlsynth.instance import Instance
from mlsynth.mlg import (
    MPLS,
    TRANSPORT,
    UNBOUNDED,
    EdgeKind,
    LayeredVertex,
    LogicalLink,
    MlgEdge,
    MultilayerGraph,
    flow_layer,
    make_logical_link,
)
from mlsynth.paths import k_shortest_paths


@dataclass(frozen=True)
class BuilderParams:
    """Sizing of the candidate universe.

    Attributes:
        k_paths: transport realizations kept per LSR pair; ``None`` keeps every
            simple path (only sensible on toy instances).
        max_logical_degree: optional cap on candidate links touching one node.
        candidate_lsrs: ``None`` makes every node a candidate LSR; otherwise the
            given extra nodes on top of the demand endpoints, which are always in.
    """

    k_paths: int | None = 2
    max_logical_degree: int | None = None
    candidate_lsrs: frozenset[str] | None = None

    def __post_init__(self):
        if self.k_paths is not None and self.k_paths < 1:
            raise ParamsInfeasible(f"k_paths must be >= 1, got {self.k_paths}")
        if self.max_logical_degree is not None and self.max_logical_degree < 1:
            raise ParamsInfeasible("max_logical_degree must be >= 1")


def candidate_lsr_nodes(instance: Instance, params: BuilderParams) -> tuple[str, ...]:
    if params.candidate_lsrs is None:
        return tuple(instance.nodes)
    unknown = set(params.candidate_lsrs) - set(instance.nodes)
    if unknown:
        raise ParamsInfeasible(f"candidate LSRs not in the instance: {sorted(unknown)}")
    keep = set(params.candidate_lsrs) | instance.endpoints()
    return tuple(n for n in instance.nodes if n in keep)


def candidate_logical_links(instance: Instance, params: BuilderParams) -> list[LogicalLink]:
    """The k hop-shortest transport paths between every pair of candidate LSRs."""
    adjacency = instance.adjacency()
    neighbours = {n: sorted(nbrs) for n, nbrs in adjacency.items()}
    lsrs = sorted(candidate_lsr_nodes(instance, params))
    links: list[LogicalLink] = []
    for a, b in itertools.combinations(lsrs, 2):
        for path in k_shortest_paths(neighbours, a, b, params.k_paths):
            links.append(make_logical_link(path, adjacency, instance.cost.channel_cost))
    if params.max_logical_degree is not None:
        links = _cap_degree(instance, links, params.max_logical_degree)
    return links


def _cap_degree(instance: Instance, links: list[LogicalLink], cap: int) -> list[LogicalLink]:
    # shortest realizations claim degree first
    degree: dict[str, int] = {}
    kept = []
    for link in sorted(links, key=lambda l: (l.hops, l.nodes)):
        if degree.get(link.a, 0) < cap and degree.get(link.b, 0) < cap:
            kept.append(link)
            degree[link.a] = degree.get(link.a, 0) + 1
            degree[link.b] = degree.get(link.b, 0) + 1
    comp = _components({n for d in instance.demands for n in (d.src, d.dst)}, kept)
    for i, d in enumerate(instance.demands):
        if comp[d.src] != comp[d.dst]:
            raise ParamsInfeasible(
                f"max_logical_degree={cap} leaves demand {i} ({d.src}->{d.dst}) unconnected")
    kept_ids = {l.id for l in kept}
    return [l for l in links if l.id in kept_ids]


def _components(nodes: set[str], links: list[LogicalLink]) -> dict[str, str]:
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for link in links:
        parent[find(link.a)] = find(link.b)
    return {n: find(n) for n in nodes}


def build_redundant_mlg(instance: Instance, params: BuilderParams = BuilderParams()) -> MultilayerGraph:
    """Assemble transport, MPLS and per-demand flow layers with their inter-layer ties.

    Flow layer i mirrors every candidate LSR and every candidate link, since
    any of them may carry demand i.
    """
    lsrs = candidate_lsr_nodes(instance, params)
    links = candidate_logical_links(instance, params)
    cost = instance.cost

    layers = [TRANSPORT, MPLS]
    vertices = [LayeredVertex(TRANSPORT, n) for n in instance.nodes]
    mpls_vertices = [LayeredVertex(MPLS, n) for n in lsrs]
    vertices += mpls_vertices
    weights = {v: cost.lsr_cost[v.node] for v in mpls_vertices}
    edges = [
        MlgEdge(e.id, LayeredVertex(TRANSPORT, e.a), LayeredVertex(TRANSPORT, e.b),
                EdgeKind.INTRA, cost.channel_cost[e.id], UNBOUNDED)
        for e in instance.transport_edges
    ]
    edges += [
        MlgEdge(l.id, LayeredVertex(MPLS, l.a), LayeredVertex(MPLS, l.b), EdgeKind.INTRA,
                l.unit_cost, cost.channel_capacity, l.edges)
        for l in links
    ]
    edges += [
        MlgEdge(f"x:transport-mpls:{n}", LayeredVertex(TRANSPORT, n), LayeredVertex(MPLS, n),
                EdgeKind.INTER)
        for n in lsrs
    ]
    intra = EdgeKind.INTRA
    for i in range(len(instance.demands)):
        layer = flow_layer(i)
        layers.append(layer)
        mirror = {n: LayeredVertex(layer, n) for n in lsrs}
        vertices += mirror.values()
        edges += [
            MlgEdge(f"f{i}:{l.id}", mirror[l.a], mirror[l.b], intra, l.unit_cost,
                    UNBOUNDED, (), l.id)
            for l in links
        ]
        edges += [
            MlgEdge(f"x:mpls-flow{i}:{n}", LayeredVertex(MPLS, n), mirror[n], EdgeKind.INTER)
            for n in lsrs
        ]
    return MultilayerGraph(
        layers=tuple(layers),
        vertices=tuple(vertices),
        edges=tuple(edges),
        vertex_weights=weights,
        demands=tuple(instance.demands),
        channel_capacity=cost.channel_capacity,
    )
