"""Hop-count k-shortest simple paths with deterministic lexicographic tie-breaking.

Paths are ranked by ``(hop count, node-id sequence)``. Yen's algorithm holds
for any such total order as long as the spur search returns the minimum
under the same order, which ``_lex_shortest`` does.
"""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Mapping, Iterable

Path = tuple[str, ...]


def _lex_shortest(adj: Mapping[str, Iterable[str]], src: str, dst: str,
                  banned_nodes: set[str], banned_edges: set[tuple[str, str]]) -> Path | None:
    """Lexicographically smallest among the hop-shortest src->dst paths."""
    if src in banned_nodes or dst in banned_nodes:
        return None
    dist = {dst: 0}
    queue = deque([dst])
    while queue and src not in dist:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist and v not in banned_nodes and (v, u) not in banned_edges:
                dist[v] = dist[u] + 1
                queue.append(v)
    if src not in dist:
        return None
    path = [src]
    node = src
    while node != dst:
        want = dist[node] - 1
        node = min(v for v in adj[node]
                   if dist.get(v) == want and (node, v) not in banned_edges)
        path.append(node)
    return tuple(path)


def k_shortest_paths(adj: Mapping[str, Iterable[str]], src: str, dst: str,
                     k: int | None) -> list[Path]:
    """Up to ``k`` simple paths (all of them when ``k`` is None), best first.

    ``adj`` maps every node to its neighbours in an undirected simple graph.
    """
    if src == dst:
        raise ValueError("src and dst must differ")
    first = _lex_shortest(adj, src, dst, set(), set())
    if first is None:
        return []
    found: list[Path] = [first]
    heap: list[tuple[int, Path]] = []
    queued: set[Path] = {first}
    while k is None or len(found) < k:
        last = found[-1]
        for i in range(len(last) - 1):
            root = last[: i + 1]
            banned_edges = {(p[i], p[i + 1]) for p in found if p[: i + 1] == root}
            spur = _lex_shortest(adj, root[-1], dst, set(root[:-1]), banned_edges)
            if spur is None:
                continue
            cand = root[:-1] + spur
            if cand not in queued:
                queued.add(cand)
                heapq.heappush(heap, (len(cand), cand))
        if not heap:
            break
        found.append(heapq.heappop(heap)[1])
    return found
