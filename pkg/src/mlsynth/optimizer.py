"""Minimum-cost overlay search: the full-LSR baseline and the multilayer local search.

Cost of a design = LSR equipment on every switched-on node + for every
logical link, its channel count times the per-channel cost of its transport
realization. Channels are bought whole, so sharing a link between demands
(grooming) can pay for an LSR.
"""

from __future__ import annotations

import itertools
import random
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from mlsynth.builder import BuilderParams, build_redundant_mlg
from mlsynth.errors import InfeasibleSolution, Violation
from mlsynth.instance import Demand, Instance, ceil_div, require_valid
from mlsynth.mlg import LogicalLink, MultilayerGraph, make_logical_link
from mlsynth.routing import (
    CapacityPlan,
    FlowAssignment,
    assign_capacities,
    cheapest_route,
    demand_order,
    route_demands,
)

_EPS = 1e-9


@dataclass(frozen=True)
class CostBreakdown:
    lsr_total: float
    channel_total: float
    grand_total: float


@dataclass(frozen=True)
class ChosenLink:
    """A logical link in a design: its transport realization and channel count."""

    id: str
    nodes: tuple[str, ...]
    edges: tuple[str, ...]
    channels: int

    @property
    def a(self) -> str:
        return self.nodes[0]

    @property
    def b(self) -> str:
        return self.nodes[-1]


@dataclass(frozen=True)
class Solution:
    lsr_nodes: tuple[str, ...]
    logical_links: tuple[ChosenLink, ...]
    flow: FlowAssignment
    cost: CostBreakdown
    solver: str = ""
    stats: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def channels(self) -> CapacityPlan:
        return CapacityPlan({l.id: l.channels for l in self.logical_links})

    def key(self) -> tuple:
        """Total order used to pick among equal-cost designs."""
        return (self.lsr_nodes, tuple(l.id for l in self.logical_links),
                tuple(sorted(self.flow.routes.items())))

    def to_dict(self) -> dict[str, Any]:
        return {
            "solver": self.solver,
            "lsr_nodes": list(self.lsr_nodes),
            "logical_links": [
                {"id": l.id, "path": list(l.nodes), "edges": list(l.edges),
                 "channels": l.channels}
                for l in self.logical_links
            ],
            "routes": {str(i): list(r) for i, r in self.flow.routes.items()},
            "link_load": dict(self.flow.link_load),
            "cost": {"lsr_total": self.cost.lsr_total,
                     "channel_total": self.cost.channel_total,
                     "grand_total": self.cost.grand_total},
            "stats": dict(self.stats),
        }


@dataclass(frozen=True)
class SearchParams:
    max_iters: int = 10_000
    restarts: int = 2
    seed: int = 0


# --------------------------------------------------------------------------
# feasibility and cost


def check_solution(instance: Instance, sol: Solution) -> list[Violation]:
    """Flow conservation, endpoint LSRs, realization paths and channel coverage."""
    out: list[Violation] = []
    nodes = set(instance.nodes)
    lsr = set(sol.lsr_nodes)
    adjacency = instance.adjacency()
    for n in sorted(lsr - nodes):
        out.append(Violation("UNKNOWN_NODE", f"lsr {n}"))
    for i, d in enumerate(instance.demands):
        for end in (d.src, d.dst):
            if end not in lsr:
                out.append(Violation("ENDPOINT_NOT_LSR", f"demand {i}", end))

    links: dict[str, ChosenLink] = {}
    for l in sol.logical_links:
        if l.id in links:
            out.append(Violation("DUPLICATE_LINK", l.id))
        links[l.id] = l
        if l.a not in lsr or l.b not in lsr:
            out.append(Violation("LINK_OUTSIDE_LSR", l.id))
        if len(l.nodes) < 2 or len(set(l.nodes)) != len(l.nodes):
            out.append(Violation("BAD_REALIZATION", l.id, "not a simple path"))
            continue
        expected = tuple(adjacency.get(u, {}).get(v) for u, v in zip(l.nodes, l.nodes[1:]))
        if None in expected or expected != l.edges:
            out.append(Violation("BAD_REALIZATION", l.id, "edges do not match the path"))

    load: dict[str, float] = {}
    for i, d in enumerate(instance.demands):
        route = sol.flow.routes.get(i)
        if route is None:
            out.append(Violation("MISSING_ROUTE", f"demand {i}"))
            continue
        at, seen = d.src, {d.src}
        for lid in route:
            l = links.get(lid)
            if l is None:
                out.append(Violation("UNKNOWN_LINK", f"demand {i}", lid))
                break
            if at not in (l.a, l.b):
                out.append(Violation("BROKEN_ROUTE", f"demand {i}", f"{lid} does not touch {at}"))
                break
            at = l.b if at == l.a else l.a
            if at in seen:
                out.append(Violation("ROUTE_NOT_SIMPLE", f"demand {i}", at))
                break
            seen.add(at)
            load[lid] = load.get(lid, 0) + d.rate
        else:
            if at != d.dst:
                out.append(Violation("BROKEN_ROUTE", f"demand {i}", f"ends at {at}"))
    for i in sorted(set(sol.flow.routes) - set(range(len(instance.demands)))):
        out.append(Violation("UNKNOWN_DEMAND", f"route {i}"))

    cap = instance.cost.channel_capacity
    for lid, l in links.items():
        need = ceil_div(load.get(lid, 0), cap)
        if l.channels != need:
            out.append(Violation("CHANNEL_MISMATCH", lid, f"{l.channels} channels, load needs {need}"))
        stated = sol.flow.link_load.get(lid, 0)
        if abs(stated - load.get(lid, 0)) > _EPS:
            out.append(Violation("LOAD_MISMATCH", lid, f"stated {stated}, routes give {load.get(lid, 0)}"))
    return out


def evaluate_cost(instance: Instance, sol: Solution) -> CostBreakdown:
    """Recompute the cost of ``sol`` from the instance's cost tables."""
    violations = check_solution(instance, sol)
    if violations:
        raise InfeasibleSolution(violations[0])
    cost = instance.cost
    lsr_total = sum(cost.lsr_cost[n] for n in sol.lsr_nodes)
    channel_total = sum(l.channels * sum(cost.channel_cost[e] for e in l.edges)
                        for l in sol.logical_links)
    return CostBreakdown(lsr_total, channel_total, lsr_total + channel_total)


def make_solution(instance: Instance, lsr_nodes, links: Sequence[LogicalLink],
                  fa: FlowAssignment, solver: str, **stats) -> Solution:
    """Size channels for ``fa`` and package a checked, costed solution."""
    plan = assign_capacities(fa, instance.cost.channel_capacity)
    chosen = tuple(
        ChosenLink(l.id, l.nodes, l.edges, plan.channels.get(l.id, 0))
        for l in sorted(links, key=lambda l: l.id)
    )
    loads = {l.id: fa.link_load.get(l.id, 0) for l in chosen}
    flow = FlowAssignment(dict(sorted(fa.routes.items())), loads)
    draft = Solution(tuple(sorted(lsr_nodes)), chosen, flow, CostBreakdown(0, 0, 0), solver, stats)
    return Solution(draft.lsr_nodes, chosen, flow, evaluate_cost(instance, draft), solver, stats)


# --------------------------------------------------------------------------
# baseline


def transport_links(instance: Instance) -> list[LogicalLink]:
    """One single-hop logical link per transport edge."""
    adjacency = instance.adjacency()
    return [make_logical_link((e.a, e.b), adjacency, instance.cost.channel_cost)
            for e in instance.transport_edges]


def solve_full_lsr_baseline(instance: Instance) -> Solution:
    """LSR on every node, one logical link per transport edge, hop-shortest routing."""
    require_valid(instance)
    start = time.perf_counter()
    links = transport_links(instance)
    fa = route_demands(instance.demands, links, instance.nodes)
    return make_solution(instance, instance.nodes, links, fa, "baseline",
                         elapsed_s=round(time.perf_counter() - start, 6))


# --------------------------------------------------------------------------
# multilayer local search


class _Overlay:
    """Mutable search state: LSR set, selected links, routes and loads."""

    def __init__(self, demands: Sequence[Demand], capacity: float,
                 lsr_cost: dict[str, float]):
        self.demands = demands
        self.capacity = capacity
        self.lsr_cost = lsr_cost
        self.lsr: set[str] = set()
        self.adj: dict[str, dict[str, LogicalLink]] = {}
        self.routes: list[tuple[str, ...] | None] = [None] * len(demands)
        self.loads: dict[str, float] = {}
        self.links: dict[str, LogicalLink] = {}
        self.lsr_total = 0.0
        self.channel_total = 0.0

    @property
    def cost(self) -> float:
        return self.lsr_total + self.channel_total

    def clone(self) -> _Overlay:
        t = _Overlay.__new__(_Overlay)
        t.demands, t.capacity, t.lsr_cost = self.demands, self.capacity, self.lsr_cost
        t.lsr = set(self.lsr)
        t.adj = {n: dict(m) for n, m in self.adj.items()}
        t.routes = list(self.routes)
        t.loads = dict(self.loads)
        t.links = dict(self.links)
        t.lsr_total, t.channel_total = self.lsr_total, self.channel_total
        return t

    def add_lsr(self, n: str) -> None:
        self.lsr.add(n)
        self.adj.setdefault(n, {})
        self.lsr_total += self.lsr_cost[n]

    def remove_lsr(self, n: str) -> None:
        for lid in list(self.adj.get(n, {})):
            self.unselect(lid)
        self.adj.pop(n, None)
        self.lsr.discard(n)
        self.lsr_total -= self.lsr_cost[n]

    def select(self, link: LogicalLink) -> None:
        if link.id not in self.links:
            self.links[link.id] = link
            self.adj[link.a][link.id] = link
            self.adj[link.b][link.id] = link

    def unselect(self, lid: str) -> None:
        link = self.links.pop(lid)
        assert not self.loads.get(lid), "unselecting a loaded link"
        self.adj[link.a].pop(lid, None)
        self.adj[link.b].pop(lid, None)

    def _charge(self, lid: str, delta: float) -> None:
        link = self.links[lid]
        old = self.loads.get(lid, 0)
        new = old + delta
        if new <= _EPS:
            new = 0
        self.channel_total += (ceil_div(new, self.capacity) - ceil_div(old, self.capacity)) * link.unit_cost
        if new:
            self.loads[lid] = new
        else:
            self.loads.pop(lid, None)

    def place(self, i: int, route: tuple[str, ...]) -> None:
        self.routes[i] = route
        for lid in route:
            self._charge(lid, self.demands[i].rate)

    def lift(self, i: int) -> tuple[str, ...]:
        route = self.routes[i]
        self.routes[i] = None
        for lid in route:
            self._charge(lid, -self.demands[i].rate)
        return route

    def best_route(self, i: int, banned: str | None = None) -> tuple[str, ...] | None:
        """Route of least extra channel cost given every other demand's load."""
        rate, cap, loads = self.demands[i].rate, self.capacity, self.loads
        get = loads.get

        if isinstance(rate, int) and isinstance(cap, int):
            # every load is a sum of integer rates: ceil(x / cap) == (x + cap - 1) // cap
            up = cap - 1

            def extra(link: LogicalLink) -> float:
                load = get(link.id, 0) + up
                return ((load + rate) // cap - load // cap) * link.unit_cost
        else:
            def extra(link: LogicalLink) -> float:
                load = get(link.id, 0)
                return (ceil_div(load + rate, cap) - ceil_div(load, cap)) * link.unit_cost

        if banned is None:
            adj = {n: m.values() for n, m in self.adj.items()}
        else:
            adj = {n: [l for l in m.values() if l.id != banned] for n, m in self.adj.items()}
        return cheapest_route(adj, self.demands[i].src, self.demands[i].dst, extra)

    def users(self, pred) -> list[int]:
        return [i for i, r in enumerate(self.routes) if r is not None and any(map(pred, r))]


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


class _LocalSearch:
    def __init__(self, instance: Instance, catalog: dict[str, LogicalLink],
                 candidates: Sequence[str], params: SearchParams):
        self.instance = instance
        self.params = params
        self.candidates = sorted(candidates)
        self.endpoints = instance.endpoints()
        self.pair_links: dict[tuple[str, str], list[LogicalLink]] = {}
        for link in sorted(catalog.values(), key=lambda l: (l.hops, l.nodes)):
            self.pair_links.setdefault(_pair(link.a, link.b), []).append(link)
        self.neighbours = {n: sorted(m) for n, m in instance.adjacency().items()}
        self.accepted = 0
        self.evaluated = 0

    def _select_pair(self, t: _Overlay, a: str, b: str) -> None:
        for link in self.pair_links.get(_pair(a, b), ()):
            t.select(link)

    def _reroute(self, t: _Overlay, affected: list[int]) -> bool:
        for i in affected:
            t.lift(i)
        for i in affected:
            route = t.best_route(i)
            if route is None:
                return False
            t.place(i, route)
        return True

    def drop_lsr(self, cur: _Overlay, n: str, order: list[int]) -> _Overlay | None:
        """Switch off LSR ``n``: its links give way to through links between its neighbours."""
        t = cur.clone()
        incident = set(t.adj[n])
        nbrs = sorted({t.links[lid].other(n) for lid in incident})
        affected = [i for i in order if t.routes[i] and not incident.isdisjoint(t.routes[i])]
        for i in affected:
            t.lift(i)
        t.remove_lsr(n)
        for a, b in itertools.combinations(nbrs, 2):
            self._select_pair(t, a, b)
        for i in affected:
            route = t.best_route(i)
            if route is None:
                return None
            t.place(i, route)
        return t

    def add_lsr(self, cur: _Overlay, n: str, order: list[int]) -> _Overlay | None:
        """Switch on LSR ``n`` and split the links passing through it."""
        passing = [l for l in cur.links.values() if n in l.nodes[1:-1]]
        if not passing:
            return None
        t = cur.clone()
        t.add_lsr(n)
        for l in passing:
            self._select_pair(t, l.a, n)
            self._select_pair(t, n, l.b)
        for nb in self.neighbours[n]:
            if nb in t.lsr:
                self._select_pair(t, n, nb)
        through = {l.id for l in passing}
        affected = [i for i in order if t.routes[i] and not through.isdisjoint(t.routes[i])]
        return t if self._reroute(t, affected) else None

    def swap_link(self, cur: _Overlay, lid: str, alt: LogicalLink) -> _Overlay:
        """Move every demand on ``lid`` to a parallel link with another realization."""
        t = cur.clone()
        t.select(alt)
        for i in t.users(lambda x: x == lid):
            route = t.lift(i)
            t.place(i, tuple(alt.id if x == lid else x for x in route))
        return t

    def retire_link(self, cur: _Overlay, lid: str, order: list[int]) -> _Overlay | None:
        """Empty ``lid`` by rerouting all its demands jointly around it."""
        t = cur.clone()
        users = [i for i in order if t.routes[i] and lid in t.routes[i]]
        for i in users:
            t.lift(i)
        for i in users:
            route = t.best_route(i, banned=lid)
            if route is None:
                return None
            t.place(i, route)
        return t

    def run(self, start: _Overlay, rng: random.Random | None) -> _Overlay:
        cur = start
        order = demand_order(self.instance.demands)
        scan = list(self.candidates)
        if rng is not None:
            rng.shuffle(order)
            rng.shuffle(scan)
        limit = self.params.max_iters

        def better(t: _Overlay | None) -> bool:
            self.evaluated += 1
            return t is not None and t.cost < cur.cost - _EPS

        improved = True
        while improved and self.accepted < limit:
            improved = False
            for n in scan:
                if n in cur.lsr and n not in self.endpoints:
                    t = self.drop_lsr(cur, n, order)
                    if better(t):
                        cur, improved = t, True
                        self.accepted += 1
            for n in scan:
                if n not in cur.lsr:
                    t = self.add_lsr(cur, n, order)
                    if better(t):
                        cur, improved = t, True
                        self.accepted += 1
            for lid in sorted(cur.loads):
                if lid not in cur.loads:
                    continue
                link = cur.links[lid]
                candidates = [self.swap_link(cur, lid, alt)
                              for alt in self.pair_links.get(_pair(link.a, link.b), ())
                              if alt.id != lid]
                candidates.append(self.retire_link(cur, lid, order))
                for t in candidates:
                    if better(t):
                        cur, improved = t, True
                        self.accepted += 1
                        break
            for i in order:
                before = cur.cost
                old = cur.lift(i)
                route = cur.best_route(i)
                cur.place(i, route)
                self.evaluated += 1
                if cur.cost < before - _EPS:
                    improved = True
                    self.accepted += 1
                else:
                    cur.lift(i)
                    cur.place(i, old)
            if self.accepted >= limit:
                break
        return cur


def _seed_overlay(instance: Instance, baseline: Solution, catalog: dict[str, LogicalLink],
                  candidates: Sequence[str]) -> _Overlay:
    """The baseline design expressed inside the candidate universe."""
    cost = instance.cost
    t = _Overlay(instance.demands, cost.channel_capacity, cost.lsr_cost)
    for n in sorted(candidates):
        t.add_lsr(n)
    if set(candidates) == set(instance.nodes) and all(l.id in catalog for l in baseline.logical_links):
        links = [catalog[l.id] for l in baseline.logical_links]
        routes = baseline.flow.routes
    else:
        links = sorted(catalog.values(), key=lambda l: l.id)
        routes = route_demands(instance.demands, links, candidates).routes
    for link in links:
        t.select(link)
    for i, route in routes.items():
        t.place(i, route)
    return t


def _to_solution(instance: Instance, t: _Overlay, **stats) -> Solution:
    used = [t.links[lid] for lid in sorted(t.loads)]
    routes = {i: r for i, r in enumerate(t.routes)}
    fa = FlowAssignment(routes, dict(t.loads))
    return make_solution(instance, t.lsr, used, fa, "multilayer", **stats)


def solve_multilayer(instance: Instance, builder: BuilderParams = BuilderParams(),
                     search: SearchParams = SearchParams(),
                     mlg: MultilayerGraph | None = None) -> Solution:
    """Search the redundant multilayer graph for a cheap feasible subgraph.

    Starts from the full-LSR baseline and applies strictly improving moves
    (drop LSR, add LSR, swap a link's realization, reroute a demand) in
    first-improvement order until none helps. Restart 0 scans in
    lexicographic order; later restarts shuffle the scan with a seeded RNG.
    The result never costs more than the baseline.
    """
    require_valid(instance)
    start = time.perf_counter()
    baseline = solve_full_lsr_baseline(instance)
    if mlg is None:
        mlg = build_redundant_mlg(instance, builder)
    catalog = mlg.logical_links()
    candidates = mlg.lsr_candidates()
    seed = _seed_overlay(instance, baseline, catalog, candidates)

    best: Solution | None = None
    accepted = evaluated = 0
    hit_limit = False
    for r in range(max(1, search.restarts)):
        rng = None if r == 0 else random.Random(f"mlsynth-search|{search.seed}|{r}")
        ls = _LocalSearch(instance, catalog, candidates, search)
        result = ls.run(seed.clone(), rng)
        accepted += ls.accepted
        evaluated += ls.evaluated
        hit_limit |= ls.accepted >= search.max_iters
        sol = _to_solution(instance, result)
        if best is None or (sol.cost.grand_total, sol.key()) < (best.cost.grand_total, best.key()):
            best = sol
    if baseline.cost.grand_total < best.cost.grand_total:
        best = baseline
    stats = {
        "accepted_moves": accepted,
        "evaluated_moves": evaluated,
        "hit_iteration_limit": hit_limit,
        "elapsed_s": round(time.perf_counter() - start, 6),
    }
    return Solution(best.lsr_nodes, best.logical_links, best.flow, best.cost, "multilayer", stats)
