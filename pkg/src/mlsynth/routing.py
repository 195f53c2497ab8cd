"""Demand routing over a chosen overlay and modular channel sizing."""

from __future__ import annotations

import heapq
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from mlsynth.errors import MlsynthError, Unroutable
from mlsynth.instance import Demand, ceil_div
from mlsynth.mlg import LogicalLink, MultilayerGraph


@dataclass(frozen=True)
class Selection:
    """An overlay: the LSR nodes switched on and the logical links between them."""

    lsr_nodes: frozenset[str]
    link_ids: frozenset[str]


@dataclass(frozen=True)
class FlowAssignment:
    """Routes as ordered logical-link ids per demand ordinal, and the summed load per link."""

    routes: dict[int, tuple[str, ...]] = field(default_factory=dict)
    link_load: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CapacityPlan:
    channels: dict[str, int] = field(default_factory=dict)


def demand_order(demands: Sequence[Demand]) -> list[int]:
    """Descending rate, ties by ordinal."""
    return sorted(range(len(demands)), key=lambda i: (-demands[i].rate, i))


def overlay_adjacency(links: Iterable[LogicalLink]) -> dict[str, list[LogicalLink]]:
    adj: dict[str, list[LogicalLink]] = {}
    for link in links:
        adj.setdefault(link.a, []).append(link)
        adj.setdefault(link.b, []).append(link)
    return adj


def cheapest_route(adj: Mapping[str, Iterable[LogicalLink]], src: str, dst: str,
                   length: Callable[[LogicalLink], float]) -> tuple[str, ...] | None:
    """Minimum-``length`` LSR path as link ids; ties by (hops, node sequence, link ids).

    ``length`` must be non-negative. The secondary hop count keeps zero-length
    detours from winning ties.
    """
    # (length, hops, lsr node sequence, link ids, node)
    heap: list[tuple] = [(0, 0, (src,), (), src)]
    done: set[str] = set()
    while heap:
        dist, hops, seq, route, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == dst:
            return route
        for link in adj.get(node, ()):
            nxt = link.b if node == link.a else link.a
            if nxt in done:
                continue
            heapq.heappush(heap, (dist + length(link), hops + len(link.edges), seq + (nxt,),
                                  route + (link.id,), nxt))
    return None


def route_demands(demands: Sequence[Demand], links: Iterable[LogicalLink],
                  lsr_nodes: Iterable[str]) -> FlowAssignment:
    """Shortest path per demand by realization hop count over the given overlay."""
    lsr = set(lsr_nodes)
    links = list(links)
    for link in links:
        if link.a not in lsr or link.b not in lsr:
            raise MlsynthError(f"logical link {link.id} leaves the LSR set", code="INVALID_SELECTION")
    adj = overlay_adjacency(links)
    routes: dict[int, tuple[str, ...]] = {}
    load: dict[str, float] = {}
    for i in demand_order(demands):
        d = demands[i]
        if d.src not in lsr or d.dst not in lsr:
            raise Unroutable(i, f"demand {i} endpoint is not a selected LSR")
        route = cheapest_route(adj, d.src, d.dst, lambda l: l.hops)
        if route is None:
            raise Unroutable(i)
        routes[i] = route
        for lid in route:
            load[lid] = load.get(lid, 0) + d.rate
    return FlowAssignment(dict(sorted(routes.items())), dict(sorted(load.items())))


def route_flows(mlg: MultilayerGraph, selection: Selection) -> FlowAssignment:
    """Route every demand of ``mlg`` over the selected part of its MPLS layer."""
    catalog = mlg.logical_links()
    missing = sorted(selection.link_ids - catalog.keys())
    if missing:
        raise MlsynthError(f"unknown logical links {missing}", code="UNKNOWN_LOGICAL_LINK")
    links = [catalog[i] for i in sorted(selection.link_ids)]
    return route_demands(mlg.demands, links, selection.lsr_nodes)


def assign_capacities(fa: FlowAssignment, channel_capacity: float) -> CapacityPlan:
    if not channel_capacity > 0:
        raise ValueError("channel_capacity must be > 0")
    return CapacityPlan({lid: ceil_div(load, channel_capacity)
                         for lid, load in fa.link_load.items()})
