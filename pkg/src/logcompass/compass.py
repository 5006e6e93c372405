"""The six-node compass graph and its structural analytics.

Two node types are adjacent exactly when their triplets differ in one
coordinate. Over the six admissible types that yields the single cycle
a-e-c-d-b-f-a: every node has degree 2, the graph is connected, bipartite
({a,b,c} against {d,e,f}), and has diameter 3.

The analytics functions only read ``nodes`` and ``weights`` from the graph
they are given, so tests can run them on modified topologies.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import fsum, inf, sqrt
from typing import Mapping

from .taxonomy import ADMISSIBLE_NODES

NODES: tuple[str, ...] = tuple(n.label for n in ADMISSIBLE_NODES)

Edge = tuple[str, str]

DISTANCE_MODES = ("hops", "weighted")


def canonical_edge(u: str, v: str) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class CrownGraph:
    """Undirected weighted compass graph: six nodes, the six derived edges."""

    nodes: tuple[str, ...]
    weights: dict[Edge, float]


def derive_edges() -> tuple[Edge, ...]:
    """All node pairs whose triplets differ in exactly one coordinate."""
    out: list[Edge] = []
    for i, m in enumerate(ADMISSIBLE_NODES):
        for n in ADMISSIBLE_NODES[i + 1 :]:
            a, b = m.triplet, n.triplet
            diff = (
                (a.n_tend is not b.n_tend)
                + (a.k_tend is not b.k_tend)
                + (a.stab is not b.stab)
            )
            if diff == 1:
                out.append(canonical_edge(m.label, n.label))
    return tuple(sorted(out))


def build_base_graph(weights: Mapping[Edge, float] | None = None) -> CrownGraph:
    """Build the compass graph; unspecified edges weigh 1.

    Weight keys may name an edge in either orientation. Unknown pairs and
    non-positive weights are rejected.
    """
    table: dict[Edge, float] = {e: 1.0 for e in derive_edges()}
    if weights:
        for key, w in weights.items():
            edge = canonical_edge(*key)
            if edge not in table:
                raise ValueError(f"not a compass edge: {key!r}")
            if not w > 0:
                raise ValueError(f"edge weight must be positive, got {w!r} for {key!r}")
            table[edge] = float(w)
    return CrownGraph(NODES, table)


def _adjacency(g: CrownGraph) -> dict[str, list[tuple[str, float]]]:
    adj: dict[str, list[tuple[str, float]]] = {v: [] for v in g.nodes}
    for (u, v), w in sorted(g.weights.items()):
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def neighbors(g: CrownGraph, label: str) -> tuple[str, ...]:
    if label not in g.nodes:
        raise ValueError(f"unknown node {label!r}")
    return tuple(sorted(v for e in g.weights for v in e if label in e and v != label))


def shortest_distance(g: CrownGraph, u: str, v: str, mode: str = "hops") -> float:
    """Shortest-path length between two nodes, by hop count or by weight."""
    if mode not in DISTANCE_MODES:
        raise ValueError(f"unknown mode {mode!r} (expected one of {DISTANCE_MODES})")
    for label in (u, v):
        if label not in g.nodes:
            raise ValueError(f"unknown node {label!r}")
    # Search from the lexicographically smaller endpoint so d(u, v) and
    # d(v, u) run the identical float computation.
    u, v = (u, v) if u <= v else (v, u)
    adj = _adjacency(g)
    if mode == "hops":
        dist = _bfs_distances(adj, u)
    else:
        dist = _dijkstra_distances(adj, u)
    return dist[v]


def _bfs_distances(adj: dict[str, list[tuple[str, float]]], source: str) -> dict[str, float]:
    dist = {v: inf for v in adj}
    dist[source] = 0.0
    frontier = [source]
    while frontier:
        nxt: list[str] = []
        for u in frontier:
            for v, _ in adj[u]:
                if dist[v] == inf:
                    dist[v] = dist[u] + 1.0
                    nxt.append(v)
        frontier = nxt
    return dist


def _dijkstra_distances(
    adj: dict[str, list[tuple[str, float]]], source: str
) -> dict[str, float]:
    dist = {v: inf for v in adj}
    dist[source] = 0.0
    heap: list[tuple[float, str]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def betweenness(g: CrownGraph, *, weighted: bool = False) -> dict[str, float]:
    """Shortest-path betweenness per node (Brandes accumulation).

    Pairs are unordered and endpoints are excluded; when a pair has several
    geodesics each contributes its fraction.
    """
    adj = _adjacency(g)
    bc = dict.fromkeys(adj, 0.0)
    for s in adj:
        order, preds, sigma = (
            _dijkstra_dag(adj, s) if weighted else _bfs_dag(adj, s)
        )
        delta = dict.fromkeys(adj, 0.0)
        while order:
            w = order.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # Undirected: every unordered pair was accumulated from both endpoints.
    return {v: x / 2.0 for v, x in bc.items()}


def _bfs_dag(adj, source):
    dist = {v: inf for v in adj}
    sigma = dict.fromkeys(adj, 0.0)
    preds: dict[str, list[str]] = {v: [] for v in adj}
    dist[source] = 0.0
    sigma[source] = 1.0
    order: list[str] = []
    frontier = [source]
    while frontier:
        nxt: list[str] = []
        for u in frontier:
            order.append(u)
            for v, _ in adj[u]:
                if dist[v] == inf:
                    dist[v] = dist[u] + 1.0
                    nxt.append(v)
                if dist[v] == dist[u] + 1.0:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        frontier = nxt
    return order, preds, sigma


def _dijkstra_dag(adj, source, rel_tol: float = 1e-12):
    dist = {v: inf for v in adj}
    sigma = dict.fromkeys(adj, 0.0)
    preds: dict[str, list[str]] = {v: [] for v in adj}
    dist[source] = 0.0
    sigma[source] = 1.0
    order: list[str] = []
    seen: set[str] = set()
    heap: list[tuple[float, str]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in seen:
            continue
        seen.add(u)
        order.append(u)
        for v, w in adj[u]:
            nd = d + w
            tol = rel_tol * max(1.0, abs(nd))
            if nd < dist[v] - tol:
                dist[v] = nd
                sigma[v] = sigma[u]
                preds[v] = [u]
                heapq.heappush(heap, (nd, v))
            elif abs(nd - dist[v]) <= tol and v not in seen:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return order, preds, sigma


def minimum_spanning_tree(g: CrownGraph) -> tuple[Edge, ...]:
    """Kruskal over (weight, edge label): deterministic lexicographic tie-break."""
    parent = {v: v for v in g.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen: list[Edge] = []
    for w, (u, v) in sorted((w, e) for e, w in g.weights.items()):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v))
    if len(chosen) != len(g.nodes) - 1:
        raise ValueError("graph is not connected")
    return tuple(sorted(chosen))


def assortativity(g: CrownGraph, node_values: Mapping[str, float]) -> float:
    """Pearson correlation of node values over edge endpoints, both orientations."""
    missing = [v for v in g.nodes if v not in node_values]
    if missing:
        raise ValueError(f"missing value for node {missing[0]!r}")
    xs: list[float] = []
    ys: list[float] = []
    for u, v in sorted(g.weights):
        xs += [node_values[u], node_values[v]]
        ys += [node_values[v], node_values[u]]
    n = len(xs)
    mx = fsum(xs) / n
    my = fsum(ys) / n
    var_x = fsum((x - mx) ** 2 for x in xs) / n
    var_y = fsum((y - my) ** 2 for y in ys) / n
    if var_x <= 0.0 or var_y <= 0.0:
        raise ValueError("degenerate values")
    cov = fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / n
    return cov / sqrt(var_x * var_y)
