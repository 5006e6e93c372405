"""The six admissible session types and the tendency classifier.

A block's behavior is summarized by a triplet: the tendency of its mean
reader count N toward the global minimum or maximum, the same for its mean
item count K, and whether its variety ratio sits near 1 (stable) or has
escaped toward 0 or infinity (unstable). Of the eight MID-free triplets,
two limit cases are excluded; the remaining six are the compass node types
a through f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .blocks import BlockMetrics
from .errors import ConfigError


class Tendency(Enum):
    MIN = "min"
    MID = "mid"
    MAX = "max"


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class Triplet(NamedTuple):
    n_tend: Tendency
    k_tend: Tendency
    stab: Stability


@dataclass(frozen=True)
class NodeType:
    label: str
    triplet: Triplet


# The six admissible types. Node triplets never contain MID.
NODE_A = NodeType("a", Triplet(Tendency.MAX, Tendency.MAX, Stability.UNSTABLE))
NODE_B = NodeType("b", Triplet(Tendency.MIN, Tendency.MAX, Stability.STABLE))
NODE_C = NodeType("c", Triplet(Tendency.MIN, Tendency.MIN, Stability.UNSTABLE))
NODE_D = NodeType("d", Triplet(Tendency.MIN, Tendency.MIN, Stability.STABLE))
NODE_E = NodeType("e", Triplet(Tendency.MAX, Tendency.MIN, Stability.UNSTABLE))
NODE_F = NodeType("f", Triplet(Tendency.MAX, Tendency.MAX, Stability.STABLE))

ADMISSIBLE_NODES: tuple[NodeType, ...] = (NODE_A, NODE_B, NODE_C, NODE_D, NODE_E, NODE_F)
NODE_BY_LABEL: dict[str, NodeType] = {n.label: n for n in ADMISSIBLE_NODES}

# The two excluded limit triplets bounding the admissible set.
BEST_TRIPLET = Triplet(Tendency.MAX, Tendency.MIN, Stability.STABLE)
WORST_TRIPLET = Triplet(Tendency.MIN, Tendency.MAX, Stability.UNSTABLE)


def admissible_nodes() -> tuple[NodeType, ...]:
    """The six node types, in label order."""
    return ADMISSIBLE_NODES


@dataclass(frozen=True)
class ClassifierConfig:
    """Tendency band width z, stability band half-width epsilon, mismatch weights."""

    z: float = 0.25
    epsilon: float = 0.25
    mismatch_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if not 0.0 < self.z < 1.0:
            raise ConfigError(f"z must be in (0, 1), got {self.z}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if len(self.mismatch_weights) != 3:
            raise ConfigError("mismatch_weights needs exactly three entries")
        if any(w < 0 for w in self.mismatch_weights) or not any(self.mismatch_weights):
            raise ConfigError("mismatch_weights must be non-negative and not all zero")


def tendency_of(value: float, lo: float, hi: float, z: float) -> Tendency:
    """Band the value between lo and hi: MAX if value > hi - (hi-lo)*z,
    MIN if value < lo + (hi-lo)*z, MID otherwise.

    The MAX test runs first, so for z >= 0.5 (overlapping bands) MAX wins.
    A degenerate range (lo == hi) yields MID.
    """
    if lo > hi:
        raise ValueError(f"lo {lo} exceeds hi {hi}")
    if not 0.0 < z < 1.0:
        raise ValueError(f"z must be in (0, 1), got {z}")
    band = (hi - lo) * z
    if value > hi - band:
        return Tendency.MAX
    if value < lo + band:
        return Tendency.MIN
    return Tendency.MID


def stability_of(variety: float, epsilon: float) -> Stability:
    """STABLE iff variety lies within epsilon of 1, on either side."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not math.isfinite(variety):
        raise ValueError(f"variety must be finite, got {variety}")
    return Stability.STABLE if abs(variety - 1.0) <= epsilon else Stability.UNSTABLE


def _tendency_cost(a: Tendency, b: Tendency) -> float:
    if a is b:
        return 0.0
    if a is Tendency.MID or b is Tendency.MID:
        return 0.5
    return 1.0


def mismatch_cost(raw: Triplet, target: Triplet, weights: tuple[float, float, float]) -> float:
    """Weighted disagreement between a raw triplet and a node triplet.

    Per coordinate: 0 for an exact match, 1 for a MIN/MAX or
    STABLE/UNSTABLE flip, 1/2 for MID against anything else.
    """
    wn, wk, ws = weights
    return (
        wn * _tendency_cost(raw.n_tend, target.n_tend)
        + wk * _tendency_cost(raw.k_tend, target.k_tend)
        + ws * (0.0 if raw.stab is target.stab else 1.0)
    )


def assign_node(raw: Triplet, cfg: ClassifierConfig | None = None) -> NodeType:
    """Map any raw triplet to the nearest admissible node.

    Ties break by label order, so the mapping is total and deterministic;
    admissible triplets map to themselves.
    """
    cfg = cfg or ClassifierConfig()
    best = ADMISSIBLE_NODES[0]
    best_cost = mismatch_cost(raw, best.triplet, cfg.mismatch_weights)
    for node in ADMISSIBLE_NODES[1:]:
        cost = mismatch_cost(raw, node.triplet, cfg.mismatch_weights)
        if cost < best_cost:
            best, best_cost = node, cost
    return best


@dataclass(frozen=True)
class BlockClassification:
    block_index: int
    raw: Triplet
    node: NodeType
    cost: float


def classify_block(
    metrics: BlockMetrics,
    bounds: tuple[float, float, float, float],
    cfg: ClassifierConfig | None = None,
) -> BlockClassification:
    """Classify one block against global mean bounds (n_lo, n_hi, k_lo, k_hi).

    The block must carry a variety value; the first block of a series does
    not and cannot be classified.
    """
    cfg = cfg or ClassifierConfig()
    if metrics.variety is None:
        raise ValueError("first block has no variety")
    n_lo, n_hi, k_lo, k_hi = bounds
    raw = Triplet(
        tendency_of(metrics.mean_n, n_lo, n_hi, cfg.z),
        tendency_of(metrics.mean_k, k_lo, k_hi, cfg.z),
        stability_of(metrics.variety, cfg.epsilon),
    )
    node = assign_node(raw, cfg)
    return BlockClassification(
        block_index=metrics.block_index,
        raw=raw,
        node=node,
        cost=mismatch_cost(raw, node.triplet, cfg.mismatch_weights),
    )
