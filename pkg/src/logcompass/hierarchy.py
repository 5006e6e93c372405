"""Self-similar expansion of the compass graph.

Any node can be refined by substituting a complete copy of the compass for
it. A path of labels from the root addresses a node; refining it adds a
child graph under that path. External edges of a refined node reattach to
the child carrying the refined node's own label (recursively, if that
child is refined in turn), which keeps every expansion level the same
shape. Uniform refinement to depth d therefore exposes 6^d leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .compass import NODES, CrownGraph, build_base_graph

Path = tuple[str, ...]


@dataclass(frozen=True)
class HierarchicalGraph:
    base: CrownGraph
    refinements: dict[Path, CrownGraph]


def new_hierarchy(base: CrownGraph | None = None) -> HierarchicalGraph:
    return HierarchicalGraph(base if base is not None else build_base_graph(), {})


def is_refined(h: HierarchicalGraph, path: Path) -> bool:
    return tuple(path) in h.refinements


def _check_path(h: HierarchicalGraph, path: Path) -> Path:
    path = tuple(path)
    if not path:
        raise ValueError("empty path")
    for label in path:
        if label not in NODES:
            raise ValueError(f"unknown node label {label!r}")
    for i in range(1, len(path)):
        if path[:i] not in h.refinements:
            raise ValueError(f"path {path!r} addresses no node: prefix {path[:i]!r} is unrefined")
    return path


def expand_node(
    h: HierarchicalGraph, path: Path, child: CrownGraph | None = None
) -> HierarchicalGraph:
    """Refine the addressed node with a child compass graph."""
    path = _check_path(h, path)
    if path in h.refinements:
        raise ValueError(f"path {path!r} is already refined")
    refinements = dict(h.refinements)
    refinements[path] = child if child is not None else build_base_graph()
    return HierarchicalGraph(h.base, refinements)


def collapse_node(h: HierarchicalGraph, path: Path) -> HierarchicalGraph:
    """Remove the addressed node's child graph; inverse of expand_node."""
    path = _check_path(h, path)
    if path not in h.refinements:
        raise ValueError(f"path {path!r} is not refined")
    nested = [p for p in h.refinements if p != path and p[: len(path)] == path]
    if nested:
        raise ValueError(f"path {path!r} has nested refinements; collapse those first")
    refinements = {p: g for p, g in h.refinements.items() if p != path}
    return HierarchicalGraph(h.base, refinements)


def leaf_paths(h: HierarchicalGraph) -> list[Path]:
    """All unrefined node paths, in depth-first label order."""
    out: list[Path] = []

    def walk(prefix: Path) -> None:
        for label in NODES:
            p = prefix + (label,)
            if p in h.refinements:
                walk(p)
            else:
                out.append(p)

    walk(())
    return out


def leaf_count(h: HierarchicalGraph) -> int:
    return len(leaf_paths(h))


def expand_all_leaves(h: HierarchicalGraph) -> HierarchicalGraph:
    """Refine every current leaf once (one uniform refinement step)."""
    refinements = dict(h.refinements)
    for p in leaf_paths(h):
        refinements[p] = build_base_graph()
    return HierarchicalGraph(h.base, refinements)


def _attachment(h: HierarchicalGraph, path: Path) -> Path:
    # Same-label boundary rule: descend into refinements via the node's own label.
    while path in h.refinements:
        path = path + (path[-1],)
    return path


def leaf_edges(h: HierarchicalGraph) -> dict[tuple[Path, Path], float]:
    """The flattened leaf-level graph implied by the boundary rule."""
    out: dict[tuple[Path, Path], float] = {}
    contexts: list[tuple[Path, CrownGraph]] = [((), h.base)]
    contexts += sorted(h.refinements.items())
    for ctx, g in contexts:
        for (u, v), w in sorted(g.weights.items()):
            pu = _attachment(h, ctx + (u,))
            pv = _attachment(h, ctx + (v,))
            key = (pu, pv) if pu <= pv else (pv, pu)
            out[key] = w
    return out
