"""Hand-built instances and brute-force oracles shared by the tests.

Nothing here calls the solvers under test. The oracles enumerate designs
straight from the instance with networkx path enumeration.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence

import networkx as nx

from mlsynth.instance import CostModel, Demand, Instance, TransportEdge, VariantParams, generate_instance
from mlsynth.mlg import (
    MPLS,
    TRANSPORT,
    EdgeKind,
    LayeredVertex,
    MlgEdge,
    MultilayerGraph,
    flow_layer,
    logical_link_id,
)
from mlsynth.optimizer import ChosenLink, CostBreakdown, Solution
from mlsynth.routing import FlowAssignment


def make_instance(edges: Iterable[tuple[str, str]], demands: Iterable[tuple[str, str, float]],
                  lsr_cost: float | dict = 5, channel_cost: float | dict = 10,
                  capacity: float = 10) -> Instance:
    """Instance with edge ids ``e<A><B>`` and uniform or per-item costs."""
    edges = [tuple(sorted(e)) for e in edges]
    nodes = sorted({n for e in edges for n in e})
    tes = tuple(TransportEdge(f"e{a}{b}", a, b) for a, b in edges)
    lsr = lsr_cost if isinstance(lsr_cost, dict) else dict.fromkeys(nodes, lsr_cost)
    chan = channel_cost if isinstance(channel_cost, dict) else {e.id: channel_cost for e in tes}
    return Instance(tuple(nodes), tes, tuple(Demand(*d) for d in demands),
                    CostModel(lsr, chan, capacity))


def triangle() -> Instance:
    """A, B, C fully meshed; lsr 5, channel 10, capacity 10; one demand A->C of 4."""
    return make_instance([("A", "B"), ("A", "C"), ("B", "C")], [("A", "C", 4)])


def path3() -> Instance:
    """A-B-C with demands A->C:3 and B->C:3, so grooming at B is possible."""
    return make_instance([("A", "B"), ("B", "C")], [("A", "C", 3), ("B", "C", 3)])


def micro_instance(seed: int) -> Instance:
    """Member ``seed`` of the 200-instance micro-suite (3-5 nodes, 1-4 demands)."""
    n = 3 + seed % 3
    params = VariantParams(0.7 if n > 3 else 1.0, 1 + (seed // 3) % 4, (1, 8), (5, 40), (5, 30), 10)
    return generate_instance(n, params, seed)


def transport_graph(inst: Instance) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(inst.nodes)
    for e in inst.transport_edges:
        g.add_edge(e.a, e.b, id=e.id, cost=inst.cost.channel_cost[e.id])
    return g


def realizations(inst: Instance) -> dict[frozenset, list[tuple[float, tuple[str, ...]]]]:
    """Every simple transport path per node pair as (per-channel cost, edge ids)."""
    g = transport_graph(inst)
    out: dict[frozenset, list] = {}
    for a, b in itertools.combinations(inst.nodes, 2):
        paths = []
        for p in nx.all_simple_paths(g, a, b):
            ids = tuple(g.edges[u, v]["id"] for u, v in zip(p, p[1:]))
            paths.append((sum(g.edges[u, v]["cost"] for u, v in zip(p, p[1:])), ids))
        out[frozenset((a, b))] = sorted(paths)
    return out


def _ceil(load, cap) -> int:
    return -(-load // cap)


def _lsr_level_paths(src, dst, lsrs) -> list[tuple[str, ...]]:
    inner = [n for n in lsrs if n not in (src, dst)]
    return [(src, *mid, dst) for r in range(len(inner) + 1)
            for mid in itertools.permutations(inner, r)]


def brute_force_optimum(inst: Instance) -> float:
    """Cheapest design by enumerating LSR sets and every demand's LSR-level path.

    Each hop uses the cheapest transport realization of its LSR pair;
    ``full_enumeration_optimum`` checks that this loses nothing.
    """
    cheapest = {pair: paths[0][0] for pair, paths in realizations(inst).items()}
    cap = inst.cost.channel_capacity
    ends = inst.endpoints()
    rest = [n for n in inst.nodes if n not in ends]
    best = float("inf")
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            lsrs = sorted(ends | set(extra))
            lsr_total = sum(inst.cost.lsr_cost[n] for n in lsrs)
            options = [_lsr_level_paths(d.src, d.dst, lsrs) for d in inst.demands]
            for combo in itertools.product(*options):
                load: dict[frozenset, float] = {}
                for d, path in zip(inst.demands, combo):
                    for hop in zip(path, path[1:]):
                        key = frozenset(hop)
                        load[key] = load.get(key, 0) + d.rate
                total = lsr_total + sum(_ceil(x, cap) * cheapest[k] for k, x in load.items())
                best = min(best, total)
    return best


def full_enumeration_optimum(inst: Instance) -> float:
    """Like ``brute_force_optimum`` but every hop may use any realization.

    Two hops on the same LSR pair with different realizations are different
    logical links. Exponential; only for 3-4 node instances.
    """
    reals = realizations(inst)
    cap = inst.cost.channel_capacity
    ends = inst.endpoints()
    rest = [n for n in inst.nodes if n not in ends]
    best = float("inf")
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            lsrs = sorted(ends | set(extra))
            lsr_total = sum(inst.cost.lsr_cost[n] for n in lsrs)
            options = []
            for d in inst.demands:
                routes = []
                for path in _lsr_level_paths(d.src, d.dst, lsrs):
                    hops = [reals[frozenset(h)] for h in zip(path, path[1:])]
                    routes.extend(itertools.product(*hops))
                options.append(routes)
            for combo in itertools.product(*options):
                load: dict[tuple, float] = {}
                for d, route in zip(inst.demands, combo):
                    for link in route:
                        load[link] = load.get(link, 0) + d.rate
                total = lsr_total + sum(_ceil(x, cap) * link[0] for link, x in load.items())
                best = min(best, total)
    return best


def hand_mlg(inst: Instance, lsrs: Sequence[str], link_paths: Sequence[Sequence[str]],
             flows: bool = True) -> MultilayerGraph:
    """An MLG assembled edge by edge, without the builder."""
    adj = inst.adjacency()
    T = {n: LayeredVertex(TRANSPORT, n) for n in inst.nodes}
    M = {n: LayeredVertex(MPLS, n) for n in lsrs}
    layers = [TRANSPORT, MPLS]
    vertices = list(T.values()) + list(M.values())
    edges = [MlgEdge(e.id, T[e.a], T[e.b], EdgeKind.INTRA, inst.cost.channel_cost[e.id])
             for e in inst.transport_edges]
    links = []
    for p in link_paths:
        ids = tuple(adj[u][v] for u, v in zip(p, p[1:]))
        lid = logical_link_id(p)
        links.append(lid)
        edges.append(MlgEdge(lid, M[p[0]], M[p[-1]], EdgeKind.INTRA,
                             sum(inst.cost.channel_cost[i] for i in ids),
                             inst.cost.channel_capacity, ids))
    edges += [MlgEdge(f"tm:{n}", T[n], M[n], EdgeKind.INTER) for n in lsrs]
    if flows:
        for i in range(len(inst.demands)):
            layer = flow_layer(i)
            layers.append(layer)
            F = {n: LayeredVertex(layer, n) for n in lsrs}
            vertices += F.values()
            for p, lid in zip(link_paths, links):
                edges.append(MlgEdge(f"f{i}:{lid}", F[p[0]], F[p[-1]], EdgeKind.INTRA,
                                     mirrors=lid))
            edges += [MlgEdge(f"mf{i}:{n}", M[n], F[n], EdgeKind.INTER) for n in lsrs]
    return MultilayerGraph(tuple(layers), tuple(vertices), tuple(edges),
                           {M[n]: inst.cost.lsr_cost[n] for n in lsrs},
                           inst.demands if flows else (), inst.cost.channel_capacity)


def hand_solution(lsrs, links, routes, loads) -> Solution:
    """A design from (path, edge ids, channels) triples; cost left for evaluate_cost."""
    chosen = tuple(ChosenLink(f"L:{'~'.join(nodes)}", tuple(nodes), edges, ch)
                   for nodes, edges, ch in links)
    return Solution(tuple(lsrs), chosen, FlowAssignment(routes, loads), CostBreakdown(0, 0, 0))


def no_grooming() -> Solution:
    """Path instance design without grooming: A->C on its own A-B-C link, B->C on B-C."""
    return hand_solution("ABC", [("ABC", ("eAB", "eBC"), 1), ("BC", ("eBC",), 1)],
                         {0: ("L:A~B~C",), 1: ("L:B~C",)}, {"L:A~B~C": 3, "L:B~C": 3})
