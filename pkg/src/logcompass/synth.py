"""Deterministic synthetic access-log generation.

All randomness comes from SplitMix64, a publicly specified generator with
a single 64-bit state word (state advances by the golden-gamma constant
0x9E3779B97F4A7C15; outputs are the finalized state). The algorithm is
pinned so identical profiles and seeds produce byte-identical logs on any
platform; do not change it silently.

Sessions are laid out sequentially in virtual time: events within a
session are 30 s apart and the next session starts more than 1800 s after
the previous one ends, so re-sessionizing the output with the default gap
recovers exactly the generated sessions.
"""

from __future__ import annotations

import json
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path
from typing import IO, Iterator

from .errors import ConfigError
from .events import LogEvent
from .timeutil import format_timestamp_s

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 sequence generator; see the module docstring."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Integer in [0, n) via the multiply-high reduction."""
        return (self.next_u64() * n) >> 64

    def unit(self) -> float:
        """Float in [0, 1)."""
        return self.next_u64() / 18446744073709551616.0


K_DISTRIBUTIONS = ("mostly-one", "heavy-tail", "uniform-range")
_UNIFORM_RE = re.compile(r"^uniform-range\((\d+),(\d+)\)$")

# mostly-one: P(K=1) = 17/20 exactly, else uniform on 2..10.
_MOSTLY_ONE_THRESHOLD = (17 << 64) // 20
_MOSTLY_ONE_MAX_K = 10
# heavy-tail: P(K=k) proportional to k^-1.5 on 1..50.
_HEAVY_TAIL_MAX_K = 50
_HEAVY_TAIL_TOTAL = sum(k ** -1.5 for k in range(1, _HEAVY_TAIL_MAX_K + 1))
_HEAVY_TAIL_CDF: tuple[float, ...] = tuple(
    c / _HEAVY_TAIL_TOTAL
    for c in accumulate(k ** -1.5 for k in range(1, _HEAVY_TAIL_MAX_K + 1))
)

BASE_EPOCH_S = 1_614_556_800  # 2021-03-01T00:00:00Z
EVENT_SPACING_S = 30
SESSION_GAP_BUFFER_S = 1801  # strictly beyond the default 1800 s session gap
START_JITTER_S = 600


def parse_k_distribution(name: str) -> tuple[str, int, int]:
    """Parse a distribution name into (kind, lo, hi); lo/hi are 0 unless uniform."""
    if name in ("mostly-one", "heavy-tail"):
        return name, 0, 0
    m = _UNIFORM_RE.match(name)
    if m:
        return "uniform-range", int(m.group(1)), int(m.group(2))
    raise ConfigError(
        f"unknown k_distribution {name!r} "
        "(expected mostly-one, heavy-tail, or uniform-range(lo,hi))"
    )


@dataclass(frozen=True)
class SynthProfile:
    """Shape of a synthetic corpus; identical profile + seed => identical bytes."""

    n_users: int = 100
    n_items: int = 1000
    sessions_per_block: int = 100
    n_blocks: int = 10
    k_distribution: str = "mostly-one"
    drift_k: float = 1.0
    drift_q: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_users", "n_items", "sessions_per_block", "n_blocks"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not self.drift_k > 0 or not self.drift_q > 0:
            raise ConfigError("drift factors must be positive")
        kind, lo, hi = parse_k_distribution(self.k_distribution)
        if kind == "uniform-range" and not 1 <= lo <= hi:
            raise ConfigError(f"uniform-range needs 1 <= lo <= hi, got ({lo},{hi})")
        base_max = {
            "mostly-one": _MOSTLY_ONE_MAX_K,
            "heavy-tail": _HEAVY_TAIL_MAX_K,
            "uniform-range": hi,
        }[kind]
        if self.drift_k == 1.0:
            need = base_max
        else:
            worst = max(self.drift_k ** b for b in range(self.n_blocks))
            need = math.ceil(base_max * worst) + 1
        if need > self.n_items:
            raise ConfigError(
                f"profile may draw up to {need} distinct items per session "
                f"but n_items is {self.n_items}"
            )


@dataclass(frozen=True)
class PlannedSession:
    user_hash: str
    start_ms: int
    item_ids: tuple[str, ...]


def _draw_k(rng: SplitMix64, kind: str, lo: int, hi: int) -> int:
    if kind == "mostly-one":
        if rng.next_u64() < _MOSTLY_ONE_THRESHOLD:
            return 1
        return 2 + rng.below(_MOSTLY_ONE_MAX_K - 1)
    if kind == "heavy-tail":
        return bisect_right(_HEAVY_TAIL_CDF, rng.unit()) + 1
    return lo + rng.below(hi - lo + 1)


def generate_sessions(profile: SynthProfile) -> Iterator[PlannedSession]:
    """Planned sessions in global start order, one block after another."""
    rng = SplitMix64(profile.seed)
    kind, lo, hi = parse_k_distribution(profile.k_distribution)
    t_s = BASE_EPOCH_S
    for b in range(profile.n_blocks):
        q = max(1, round(profile.sessions_per_block * profile.drift_q ** b))
        scale = profile.drift_k ** b
        for _ in range(q):
            k = _draw_k(rng, kind, lo, hi)
            if scale != 1.0:
                # Stochastic rounding keeps the expected K equal to k * scale.
                x = k * scale
                k = int(x)
                frac = x - k
                if frac > 0.0 and rng.unit() < frac:
                    k += 1
                if k < 1:
                    k = 1
            user = f"u{rng.below(profile.n_users):05d}"
            chosen: list[int] = []
            seen: set[int] = set()
            while len(chosen) < k:
                idx = rng.below(profile.n_items)
                if idx not in seen:
                    seen.add(idx)
                    chosen.append(idx)
            items = tuple(f"i{idx:06d}" for idx in chosen)
            yield PlannedSession(user, t_s * 1000, items)
            last_s = t_s + (k - 1) * EVENT_SPACING_S
            t_s = last_s + SESSION_GAP_BUFFER_S + rng.below(START_JITTER_S)


def generate_events(profile: SynthProfile) -> Iterator[LogEvent]:
    """The event stream realizing the planned sessions."""
    for s in generate_sessions(profile):
        for j, item in enumerate(s.item_ids):
            yield LogEvent(s.start_ms + j * EVENT_SPACING_S * 1000, s.user_hash, item)


def write_log(profile: SynthProfile, dest: str | Path | IO[str]) -> int:
    """Write the corpus as delimited (format a) lines; returns the event count."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            return write_log(profile, fh)
    n = 0
    write = dest.write
    for s in generate_sessions(profile):
        user = s.user_hash
        start = s.start_ms
        write(
            "".join(
                f"{format_timestamp_s(start + j * 30_000)},{user},{item}\n"
                for j, item in enumerate(s.item_ids)
            )
        )
        n += len(s.item_ids)
    return n


_PROFILE_FIELDS = frozenset(SynthProfile.__dataclass_fields__)


def load_profile(path: str | Path) -> SynthProfile:
    """Load a profile from a JSON object file; unknown keys are rejected."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad profile {path}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"bad profile {path}: expected a JSON object")
    unknown = sorted(set(data) - _PROFILE_FIELDS)
    if unknown:
        raise ConfigError(f"bad profile {path}: unknown field {unknown[0]!r}")
    return SynthProfile(**data)
