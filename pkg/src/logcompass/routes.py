"""Search routes over classified blocks, route comparison, and communities.

A route is the ordered sequence of node-type labels a stream (or a single
user) traverses across classified blocks. Routes are compared with a
weighted edit distance whose substitution cost is the compass hop distance
between labels and whose insertion/deletion cost is a fixed 2, and grouped
into communities by single linkage under that distance.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .compass import NODES, build_base_graph, neighbors, shortest_distance
from .errors import ConfigError

GROUPINGS = ("stream", "user")
STREAM_OWNER = "stream"
INDEL_COST = 2.0


def _hop_table() -> dict[tuple[str, str], int]:
    g = build_base_graph()
    return {
        (u, v): int(shortest_distance(g, u, v, "hops"))
        for u in NODES
        for v in NODES
    }


_HOPS = _hop_table()


def compass_hops(x: str, y: str) -> int:
    """Hop distance between two node labels on the compass cycle (0..3)."""
    try:
        return _HOPS[(x, y)]
    except KeyError:
        raise ValueError(f"unknown node label in {(x, y)!r}") from None


@dataclass(frozen=True)
class SearchRoute:
    owner: str
    steps: tuple[str, ...]
    span: tuple[int, int]


@dataclass(frozen=True)
class TransitionGraph:
    """counts[(x, y)] = consecutive x→y steps summed over all routes."""

    counts: dict[tuple[str, str], int]


@dataclass(frozen=True)
class CognitiveCommunity:
    community_id: int
    members: tuple[str, ...]
    label_counts: dict[str, int]
    dominant: str
    size: int


@dataclass(frozen=True)
class CommunityPosition:
    label: str
    neighbors: tuple[str, ...]
    distances: dict[str, int]


def extract_routes(
    classified: Sequence[tuple[int, str]],
    grouping: str = "stream",
    block_users: Mapping[int, Iterable[str]] | None = None,
) -> list[SearchRoute]:
    """Turn per-block classifications into routes.

    Stream grouping yields one route over all classified blocks. User
    grouping yields one route per user from the types of the classified
    blocks that user appears in (needs block_users: block_index -> users;
    a user contributes each block once).
    """
    if grouping not in GROUPINGS:
        raise ConfigError(f"unknown grouping {grouping!r} (expected one of {GROUPINGS})")
    for (b1, _), (b2, _) in zip(classified, classified[1:]):
        if b2 <= b1:
            raise ValueError("classifications must be ordered by block_index")
    if not classified:
        return []
    if grouping == "stream":
        steps = tuple(label for _, label in classified)
        return [SearchRoute(STREAM_OWNER, steps, (classified[0][0], classified[-1][0]))]
    if block_users is None:
        raise ValueError("per-user grouping needs block_users")
    label_of = dict(classified)
    blocks_of: dict[str, list[int]] = {}
    for block_index in sorted(block_users):
        if block_index not in label_of:
            continue  # unclassified blocks (e.g. the first) contribute no steps
        for user in sorted(set(block_users[block_index])):
            blocks_of.setdefault(user, []).append(block_index)
    return [
        SearchRoute(user, tuple(label_of[b] for b in bs), (bs[0], bs[-1]))
        for user, bs in sorted(blocks_of.items())
    ]


def route_distance(
    r1: SearchRoute,
    r2: SearchRoute,
    step_metric: Callable[[str, str], float] | None = None,
) -> float:
    """Edit distance over step sequences.

    Substitutions cost the compass hop distance between the labels (0-3);
    insertions and deletions cost 2 each. Symmetric in its arguments.
    """
    sub = step_metric if step_metric is not None else compass_hops
    a, b = r1.steps, r2.steps
    prev = [j * INDEL_COST for j in range(len(b) + 1)]
    for i, x in enumerate(a, 1):
        cur = [i * INDEL_COST]
        for j, y in enumerate(b, 1):
            cur.append(
                min(
                    prev[j - 1] + sub(x, y),
                    prev[j] + INDEL_COST,
                    cur[j - 1] + INDEL_COST,
                )
            )
        prev = cur
    return prev[-1]


def _community_of(group_members: list[SearchRoute]) -> tuple[tuple[str, ...], dict[str, int], str]:
    members = tuple(sorted(r.owner for r in group_members))
    counts = Counter()
    for r in group_members:
        counts.update(r.steps)
    label_counts = {label: counts.get(label, 0) for label in NODES}
    dominant = min(label_counts, key=lambda l: (-label_counts[l], l))
    return members, label_counts, dominant


def detect_communities(
    routes: Sequence[SearchRoute], linkage_threshold: float
) -> list[CognitiveCommunity]:
    """Single-linkage grouping: routes chained by distances <= threshold share a community.

    Output is a partition of the routes, numbered by smallest member key;
    the result does not depend on input order. Threshold 0 degenerates to
    grouping identical step sequences.
    """
    if linkage_threshold < 0:
        raise ValueError("linkage_threshold must be >= 0")
    owners = [r.owner for r in routes]
    if len(set(owners)) != len(owners):
        raise ValueError("route owners must be unique")
    ordered = sorted(routes, key=lambda r: r.owner)
    n = len(ordered)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if linkage_threshold == 0:
        by_steps: dict[tuple[str, ...], int] = {}
        for i, r in enumerate(ordered):
            first = by_steps.setdefault(r.steps, i)
            parent[find(i)] = find(first)
    else:
        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j) and route_distance(ordered[i], ordered[j]) <= linkage_threshold:
                    parent[find(i)] = find(j)

    groups: dict[int, list[SearchRoute]] = {}
    for i, r in enumerate(ordered):
        groups.setdefault(find(i), []).append(r)
    communities = []
    for group in sorted(groups.values(), key=lambda g: g[0].owner):
        members, label_counts, dominant = _community_of(group)
        communities.append(
            CognitiveCommunity(
                community_id=len(communities),
                members=members,
                label_counts=label_counts,
                dominant=dominant,
                size=len(members),
            )
        )
    return communities


def build_transition_graph(routes: Sequence[SearchRoute]) -> TransitionGraph:
    """Count consecutive step pairs across all routes."""
    counts: dict[tuple[str, str], int] = {}
    for r in routes:
        for x, y in zip(r.steps, r.steps[1:]):
            counts[(x, y)] = counts.get((x, y), 0) + 1
    return TransitionGraph(dict(sorted(counts.items())))


def transition_edge_weights(
    tg: TransitionGraph, base_weight: float = 1.0
) -> dict[tuple[str, str], float]:
    """Compass edge weights from transition counts (both directions summed).

    Transitions between non-adjacent labels do not correspond to an edge
    and are ignored; base_weight keeps unobserved edges positive.
    """
    if not base_weight > 0:
        raise ValueError("base_weight must be positive")
    g = build_base_graph()
    return {
        (u, v): base_weight + tg.counts.get((u, v), 0) + tg.counts.get((v, u), 0)
        for (u, v) in sorted(g.weights)
    }


def position_community(c: CognitiveCommunity) -> CommunityPosition:
    """Locate a community at its dominant label; report neighbors and hop distances."""
    if not c.members:
        raise ValueError("empty community")
    g = build_base_graph()
    return CommunityPosition(
        label=c.dominant,
        neighbors=neighbors(g, c.dominant),
        distances={label: compass_hops(c.dominant, label) for label in NODES},
    )
