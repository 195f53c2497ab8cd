"""Exact branch-and-bound for toy instances, used as an optimality oracle."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from mlsynth.builder import BuilderParams, build_redundant_mlg
from mlsynth.errors import LimitsExceeded
from mlsynth.instance import Instance, ceil_div, require_valid
from mlsynth.mlg import LogicalLink
from mlsynth.optimizer import Solution, make_solution, solve_full_lsr_baseline
from mlsynth.routing import FlowAssignment, demand_order


@dataclass(frozen=True)
class ExactLimits:
    max_nodes: int = 5
    max_demands: int = 4


def _lsr_paths(src: str, dst: str, lsrs: list[str]) -> list[tuple[str, ...]]:
    inner = [n for n in lsrs if n not in (src, dst)]
    out = []
    for r in range(len(inner) + 1):
        for mid in itertools.permutations(inner, r):
            out.append((src, *mid, dst))
    return out


def solve_exact(instance: Instance, limits: ExactLimits = ExactLimits()) -> Solution:
    """Provably cheapest design, by enumeration with an accumulated-cost bound.

    Branches over LSR sets containing every demand endpoint, then over each
    demand's LSR-level path (largest demands first). Among parallel logical
    links joining one LSR pair only the cheapest realization is branched on:
    moving all their traffic onto it never needs more channels, because
    ceil(x + y) <= ceil(x) + ceil(y), and each channel costs no more there.
    """
    require_valid(instance)
    if len(instance.nodes) > limits.max_nodes or len(instance.demands) > limits.max_demands:
        raise LimitsExceeded(
            f"{len(instance.nodes)} nodes / {len(instance.demands)} demands exceed "
            f"{limits.max_nodes} / {limits.max_demands}")
    start = time.perf_counter()
    mlg = build_redundant_mlg(instance, BuilderParams(k_paths=None))
    cheapest: dict[frozenset[str], LogicalLink] = {}
    for link in sorted(mlg.logical_links().values(), key=lambda l: (l.unit_cost, l.hops, l.nodes)):
        cheapest.setdefault(frozenset((link.a, link.b)), link)

    demands = instance.demands
    cap = instance.cost.channel_capacity
    order = demand_order(demands)
    endpoints = instance.endpoints()
    others = sorted(set(instance.nodes) - endpoints)

    incumbent = solve_full_lsr_baseline(instance)
    best_cost = incumbent.cost.grand_total
    best: tuple | None = None  # (lsr set, routes) once something beats or ties the seed
    nodes_visited = 0

    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            lsrs = sorted(endpoints | set(extra))
            lsr_total = sum(instance.cost.lsr_cost[n] for n in lsrs)
            if lsr_total > best_cost or (best is not None and lsr_total >= best_cost):
                continue
            options = []
            for i in order:
                d = demands[i]
                routes = []
                for path in _lsr_paths(d.src, d.dst, lsrs):
                    links = [cheapest[frozenset(p)] for p in zip(path, path[1:])]
                    routes.append((sum(l.unit_cost for l in links), tuple(l.id for l in links)))
                routes.sort()
                options.append([r for _, r in routes])
            unit = {l.id: l.unit_cost for l in cheapest.values()}
            loads: dict[str, float] = {}
            chosen: list[tuple[str, ...]] = [()] * len(order)

            def branch(k: int, channel_cost: float) -> None:
                nonlocal best_cost, best, nodes_visited
                nodes_visited += 1
                total = lsr_total + channel_cost
                if total > best_cost or (best is not None and total >= best_cost):
                    return
                if k == len(order):
                    best_cost = total
                    best = (tuple(lsrs), dict(zip(order, chosen)))
                    return
                rate = demands[order[k]].rate
                for route in options[k]:
                    extra_cost = 0.0
                    for lid in route:
                        old = loads.get(lid, 0)
                        extra_cost += (ceil_div(old + rate, cap) - ceil_div(old, cap)) * unit[lid]
                        loads[lid] = old + rate
                    chosen[k] = route
                    branch(k + 1, channel_cost + extra_cost)
                    for lid in route:
                        loads[lid] -= rate

            branch(0, 0.0)

    stats = {"bnb_nodes": nodes_visited, "elapsed_s": round(time.perf_counter() - start, 6)}
    if best is None:
        return make_solution(instance, incumbent.lsr_nodes,
                             [_as_link(l) for l in incumbent.logical_links],
                             incumbent.flow, "exact", **stats)
    lsrs, routes = best
    catalog = mlg.logical_links()
    load: dict[str, float] = {}
    for i, route in routes.items():
        for lid in route:
            load[lid] = load.get(lid, 0) + demands[i].rate
    used = [catalog[lid] for lid in sorted(load)]
    return make_solution(instance, lsrs, used, FlowAssignment(routes, load), "exact", **stats)


def _as_link(l) -> LogicalLink:
    return LogicalLink(l.id, l.a, l.b, l.nodes, l.edges, 0)
