"""Compass graph serialization: canonical text, DOT, GraphML.

The canonical form sorts nodes and edges and renders weights with repr, so
exports are byte-stable and parse back without loss.
"""

from __future__ import annotations

from .compass import CrownGraph, build_base_graph
from .errors import ConfigError, InputError

GRAPH_FORMATS = ("canonical", "dot", "graphml")
_CANONICAL_HEADER = "compass-graph v1"


def to_canonical(g: CrownGraph) -> str:
    lines = [_CANONICAL_HEADER, "nodes " + " ".join(g.nodes)]
    for (u, v), w in sorted(g.weights.items()):
        lines.append(f"edge {u} {v} {w!r}")
    return "\n".join(lines) + "\n"


def parse_canonical(text: str) -> CrownGraph:
    """Parse the canonical form back into a graph; strict about structure."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != _CANONICAL_HEADER:
        raise InputError(f"bad canonical graph: expected header {_CANONICAL_HEADER!r}")
    if len(lines) < 2 or not lines[1].startswith("nodes "):
        raise InputError("bad canonical graph: missing nodes line")
    weights: dict[tuple[str, str], float] = {}
    for ln in lines[2:]:
        parts = ln.split()
        if len(parts) != 4 or parts[0] != "edge":
            raise InputError(f"bad canonical graph: unparseable line {ln!r}")
        _, u, v, w_text = parts
        try:
            w = float(w_text)
        except ValueError:
            raise InputError(f"bad canonical graph: weight {w_text!r}") from None
        if (u, v) in weights:
            raise InputError(f"bad canonical graph: duplicate edge {u}-{v}")
        weights[(u, v)] = w
    try:
        g = build_base_graph(weights)
    except ValueError as exc:
        raise InputError(f"bad canonical graph: {exc}") from None
    if lines[1] != "nodes " + " ".join(g.nodes):
        raise InputError("bad canonical graph: unexpected node list")
    if len(weights) != len(g.weights):
        raise InputError("bad canonical graph: incomplete edge list")
    return g


def to_dot(g: CrownGraph) -> str:
    lines = ["graph compass {"]
    for v in g.nodes:
        lines.append(f'  {v} [label="{v}"];')
    for (u, v), w in sorted(g.weights.items()):
        lines.append(f"  {u} -- {v} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(g: CrownGraph) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"',
        '         xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"',
        '         xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <graph id="compass" edgedefault="undirected">',
    ]
    for v in g.nodes:
        lines.append(f'    <node id="{v}"/>')
    for (u, v), w in sorted(g.weights.items()):
        lines.append(
            f'    <edge source="{u}" target="{v}"><data key="weight">{w!r}</data></edge>'
        )
    lines += ["  </graph>", "</graphml>"]
    return "\n".join(lines) + "\n"


def export_graph(g: CrownGraph, fmt: str) -> str:
    """Render the graph in the requested format."""
    if fmt == "canonical":
        return to_canonical(g)
    if fmt == "dot":
        return to_dot(g)
    if fmt == "graphml":
        return to_graphml(g)
    raise ConfigError(f"unknown graph format {fmt!r} (expected one of {GRAPH_FORMATS})")
