"""Problem instances: transport topology, demands, costs, generation and JSON I/O."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import networkx as nx

from mlsynth.errors import ParamsInfeasible, ParseError, ValidationError, Violation


@dataclass(frozen=True)
class Demand:
    src: str
    dst: str
    rate: float


@dataclass(frozen=True)
class TransportEdge:
    id: str
    a: str
    b: str


@dataclass(frozen=True)
class CostModel:
    """Per-node LSR cost, per-edge cost of one channel, and the channel size."""

    lsr_cost: dict[str, float]
    channel_cost: dict[str, float]
    channel_capacity: float


@dataclass(frozen=True)
class Instance:
    nodes: tuple[str, ...]
    transport_edges: tuple[TransportEdge, ...]
    demands: tuple[Demand, ...]
    cost: CostModel
    meta: dict[str, Any] = field(default_factory=dict)

    def edge(self, edge_id: str) -> TransportEdge:
        return self._edge_index()[edge_id]

    def _edge_index(self) -> dict[str, TransportEdge]:
        index = self.__dict__.get("_edges_by_id")
        if index is None:
            index = {e.id: e for e in self.transport_edges}
            object.__setattr__(self, "_edges_by_id", index)
        return index

    def adjacency(self) -> dict[str, dict[str, str]]:
        """Map node -> {neighbour: edge id}."""
        adj: dict[str, dict[str, str]] = {n: {} for n in self.nodes}
        for e in self.transport_edges:
            adj[e.a][e.b] = e.id
            adj[e.b][e.a] = e.id
        return adj

    def endpoints(self) -> frozenset[str]:
        return frozenset(n for d in self.demands for n in (d.src, d.dst))


def check_instance(inst: Instance) -> list[Violation]:
    """Return every violated instance invariant (empty list when valid)."""
    out: list[Violation] = []
    node_set = set(inst.nodes)
    if len(node_set) != len(inst.nodes):
        out.append(Violation("DUPLICATE_NODE", "nodes"))
    if "node_count" in inst.meta and inst.meta["node_count"] != len(inst.nodes):
        out.append(Violation("NODE_COUNT_MISMATCH", "meta.node_count",
                             f"{inst.meta['node_count']} != {len(inst.nodes)}"))
    seen_ids: set[str] = set()
    seen_pairs: set[frozenset[str]] = set()
    for i, e in enumerate(inst.transport_edges):
        where = f"transport_edges[{i}]"
        if e.id in seen_ids:
            out.append(Violation("DUPLICATE_EDGE_ID", where, e.id))
        seen_ids.add(e.id)
        if e.a not in node_set or e.b not in node_set:
            out.append(Violation("UNKNOWN_NODE", where, f"{e.a}-{e.b}"))
            continue
        if e.a == e.b:
            out.append(Violation("SELF_LOOP", where, e.a))
            continue
        pair = frozenset((e.a, e.b))
        if pair in seen_pairs:
            out.append(Violation("PARALLEL_EDGE", where, f"{e.a}-{e.b}"))
        seen_pairs.add(pair)
    for i, d in enumerate(inst.demands):
        where = f"demands[{i}]"
        if d.src not in node_set or d.dst not in node_set:
            out.append(Violation("UNKNOWN_NODE", where, f"{d.src}->{d.dst}"))
        if d.src == d.dst:
            out.append(Violation("SELF_DEMAND", where, f"src == dst == {d.src}"))
        if not d.rate > 0:
            out.append(Violation("NONPOSITIVE_RATE", where, str(d.rate)))
    cost = inst.cost
    if not cost.channel_capacity > 0:
        out.append(Violation("NONPOSITIVE_CAPACITY", "cost.channel_capacity"))
    for n in inst.nodes:
        c = cost.lsr_cost.get(n)
        if c is None or c < 0:
            out.append(Violation("BAD_LSR_COST", f"cost.lsr_cost.{n}", str(c)))
    for e in inst.transport_edges:
        c = cost.channel_cost.get(e.id)
        if c is None or c < 0:
            out.append(Violation("BAD_CHANNEL_COST", f"cost.channel_cost.{e.id}", str(c)))
    if inst.nodes:
        g = nx.Graph()
        g.add_nodes_from(inst.nodes)
        g.add_edges_from((e.a, e.b) for e in inst.transport_edges
                         if e.a in node_set and e.b in node_set)
        if not nx.is_connected(g):
            out.append(Violation("DISCONNECTED", "transport_edges",
                                 f"{nx.number_connected_components(g)} components"))
    return out


def require_valid(inst: Instance) -> Instance:
    violations = check_instance(inst)
    if violations:
        raise ValidationError(violations)
    return inst


# --------------------------------------------------------------------------
# generation


@dataclass(frozen=True)
class VariantParams:
    """Generator knobs. ``edge_density`` is the fraction of all node pairs joined."""

    edge_density: float
    demand_count: int
    rate_range: tuple[int, int]
    lsr_cost_range: tuple[int, int]
    channel_cost_range: tuple[int, int]
    channel_capacity: int


@dataclass(frozen=True)
class Preset:
    """A named variant whose size-dependent knobs scale with the node count."""

    name: str
    mean_degree: float
    demands_per_node: float
    rate_range: tuple[int, int]
    lsr_cost_range: tuple[int, int]
    channel_cost_range: tuple[int, int]
    channel_capacity: int = 10

    def params(self, node_count: int) -> VariantParams:
        density = min(1.0, self.mean_degree / (node_count - 1))
        return VariantParams(
            edge_density=density,
            demand_count=max(1, round(self.demands_per_node * node_count)),
            rate_range=self.rate_range,
            lsr_cost_range=self.lsr_cost_range,
            channel_cost_range=self.channel_cost_range,
            channel_capacity=self.channel_capacity,
        )


# sparse/dense x cheap/costly LSR x thin/thick demands; one demand per node
PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("sparse-cheap-thin", 2.6, 1.0, (1, 4), (10, 30), (10, 30)),
        Preset("sparse-cheap-thick", 2.6, 1.0, (3, 9), (10, 30), (10, 30)),
        Preset("sparse-costly-thin", 2.6, 1.0, (1, 4), (30, 60), (10, 30)),
        Preset("sparse-costly-thick", 2.6, 1.0, (3, 9), (30, 60), (10, 30)),
        Preset("dense-cheap-thin", 4.0, 1.0, (1, 4), (10, 30), (10, 30)),
        Preset("dense-cheap-thick", 4.0, 1.0, (3, 9), (10, 30), (10, 30)),
        Preset("dense-costly-thin", 4.0, 1.0, (1, 4), (30, 60), (10, 30)),
        Preset("dense-costly-thick", 4.0, 1.0, (3, 9), (30, 60), (10, 30)),
    )
}
DEFAULT_VARIANTS: tuple[str, ...] = tuple(PRESETS)

# reproduces the hand-worked triangle: lsr 5, channel 10, capacity 10, one demand of 4
WORKED_TRIANGLE = VariantParams(1.0, 1, (4, 4), (5, 5), (10, 10), 10)


def resolve_variant(variant: str | int | VariantParams) -> tuple[str, VariantParams | Preset]:
    """Accept a preset name, a 1-based preset number, or explicit params."""
    if isinstance(variant, VariantParams):
        return "custom", variant
    if isinstance(variant, int) or (isinstance(variant, str) and variant.isdigit()):
        idx = int(variant)
        if not 1 <= idx <= len(DEFAULT_VARIANTS):
            raise ParamsInfeasible(f"variant number {idx} outside 1..{len(DEFAULT_VARIANTS)}")
        name = DEFAULT_VARIANTS[idx - 1]
        return name, PRESETS[name]
    if variant == "worked-triangle":
        return variant, WORKED_TRIANGLE
    if variant not in PRESETS:
        raise ParamsInfeasible(f"unknown variant {variant!r}")
    return variant, PRESETS[variant]


def node_ids(count: int) -> list[str]:
    width = max(2, len(str(count - 1)))
    return [f"n{i:0{width}d}" for i in range(count)]


def generate_instance(node_count: int, variant: str | int | VariantParams, seed: int) -> Instance:
    """Draw a connected random instance; a pure function of its arguments."""
    if node_count < 3:
        raise ParamsInfeasible(f"node_count must be >= 3, got {node_count}")
    tag, source = resolve_variant(variant)
    params = source.params(node_count) if isinstance(source, Preset) else source
    pairs_total = node_count * (node_count - 1) // 2
    edge_target = round(params.edge_density * pairs_total)
    if not 0 < params.edge_density <= 1 or edge_target < node_count - 1:
        raise ParamsInfeasible(
            f"edge_density {params.edge_density} gives {edge_target} edges, "
            f"a spanning tree needs {node_count - 1}")
    if params.demand_count < 0:
        raise ParamsInfeasible("demand_count must be >= 0")
    lo, hi = params.rate_range
    if lo <= 0 or hi < lo:
        raise ParamsInfeasible(f"bad rate_range {params.rate_range}")
    for name in ("lsr_cost_range", "channel_cost_range"):
        lo, hi = getattr(params, name)
        if lo < 0 or hi < lo:
            raise ParamsInfeasible(f"bad {name} {(lo, hi)}")
    if params.channel_capacity <= 0:
        raise ParamsInfeasible("channel_capacity must be > 0")

    # string seeding hashes via sha512: stable across platforms and runs
    rng = random.Random(f"mlsynth|{node_count}|{params!r}|{seed}")
    nodes = node_ids(node_count)

    prufer = [rng.randrange(node_count) for _ in range(node_count - 2)]
    tree = nx.from_prufer_sequence(prufer)
    pairs = {tuple(sorted((nodes[u], nodes[v]))) for u, v in tree.edges()}
    extra = sorted(
        (a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:] if (a, b) not in pairs)
    pairs.update(rng.sample(extra, edge_target - len(pairs)))

    edges = [TransportEdge(f"e{i:04d}", a, b) for i, (a, b) in enumerate(sorted(pairs))]
    demands = []
    for _ in range(params.demand_count):
        src, dst = rng.sample(nodes, 2)
        demands.append(Demand(src, dst, rng.randint(*params.rate_range)))
    lsr_cost = {n: rng.randint(*params.lsr_cost_range) for n in nodes}
    channel_cost = {e.id: rng.randint(*params.channel_cost_range) for e in edges}
    return Instance(
        nodes=tuple(nodes),
        transport_edges=tuple(edges),
        demands=tuple(demands),
        cost=CostModel(lsr_cost, channel_cost, params.channel_capacity),
        meta={"node_count": node_count, "variant": tag, "seed": seed},
    )


def generate_suite(node_counts, variants, seeds) -> list[Instance]:
    return [generate_instance(n, v, s) for n in node_counts for v in variants for s in seeds]


# --------------------------------------------------------------------------
# JSON I/O


def _num(x: float) -> int | float:
    if isinstance(x, bool):
        raise TypeError("boolean where a number was expected")
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {
        "nodes": list(inst.nodes),
        "transport_edges": [{"id": e.id, "a": e.a, "b": e.b} for e in inst.transport_edges],
        "demands": [{"src": d.src, "dst": d.dst, "rate": _num(d.rate)} for d in inst.demands],
        "cost": {
            "lsr_cost": {k: _num(v) for k, v in inst.cost.lsr_cost.items()},
            "channel_cost": {k: _num(v) for k, v in inst.cost.channel_cost.items()},
            "channel_capacity": _num(inst.cost.channel_capacity),
        },
        "meta": dict(inst.meta),
    }


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def _field(obj: Any, key: str, kind: type | tuple[type, ...], where: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}.{key}: missing field")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"{where}.{key}: expected {names}, got {type(value).__name__}")
    return value


_NUMBER = (int, float)


def instance_from_dict(data: Any) -> Instance:
    """Build an instance from decoded JSON, then check its invariants."""
    nodes = _field(data, "nodes", list, "$")
    for i, n in enumerate(nodes):
        if not isinstance(n, str):
            raise ParseError(f"$.nodes[{i}]: expected str")
    edges = []
    for i, e in enumerate(_field(data, "transport_edges", list, "$")):
        where = f"$.transport_edges[{i}]"
        edges.append(TransportEdge(_field(e, "id", str, where), _field(e, "a", str, where),
                                   _field(e, "b", str, where)))
    demands = []
    for i, d in enumerate(_field(data, "demands", list, "$")):
        where = f"$.demands[{i}]"
        demands.append(Demand(_field(d, "src", str, where), _field(d, "dst", str, where),
                              _num(_field(d, "rate", _NUMBER, where))))
    cost = _field(data, "cost", dict, "$")
    costs = {}
    for key in ("lsr_cost", "channel_cost"):
        table = _field(cost, key, dict, "$.cost")
        costs[key] = {k: _num(_field(table, k, _NUMBER, f"$.cost.{key}")) for k in table}
    capacity = _num(_field(cost, "channel_capacity", _NUMBER, "$.cost"))
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("$.meta: expected an object")
    inst = Instance(tuple(nodes), tuple(edges), tuple(demands),
                    CostModel(costs["lsr_cost"], costs["channel_cost"], capacity), dict(meta))
    return require_valid(inst)


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(data)


def read_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def ceil_div(load: float, capacity: float) -> int:
    """Smallest channel count covering ``load``; exact for integers, 1e-9 slack for floats."""
    if load <= 0:
        return 0
    if isinstance(load, int) and isinstance(capacity, int):
        return -(-load // capacity)
    q = load / capacity
    r = round(q)
    return int(r) if abs(q - r) < 1e-9 else math.ceil(q)
