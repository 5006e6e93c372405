"""End-to-end pipeline and artifact file I/O.

Stage order: ingest (parse, filter, sessionize) -> block metrics ->
classification -> routes -> communities -> graph exports -> report. Each
stage reads only the artifacts of earlier stages, so the CLI can run them
separately on saved intermediates. All outputs are deterministic: fixed
row orders, repr-rendered floats, sorted JSON keys, LF line endings.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

from .blocks import (
    BlockMetrics,
    compute_block_means,
    compute_histogram,
    compute_variety_series,
    metric_bounds,
    partition_blocks,
)
from .compass import build_base_graph
from .errors import ConfigError, InputError
from .events import (
    COUNT_POLICIES,
    DEFAULT_GAP_SECONDS,
    FilterRules,
    LOG_FORMATS,
    LogEvent,
    count_items,
    filter_events,
    parse_events,
    session_groups,
)
from .graphio import GRAPH_FORMATS, export_graph
from .routes import (
    GROUPINGS,
    CognitiveCommunity,
    SearchRoute,
    TransitionGraph,
    build_transition_graph,
    detect_communities,
    extract_routes,
    position_community,
    transition_edge_weights,
)
from .taxonomy import (
    BlockClassification,
    ClassifierConfig,
    NODE_BY_LABEL,
    Stability,
    Tendency,
    Triplet,
    classify_block,
)

ARTIFACT_FILES = {
    "sessions": "sessions.csv",
    "metrics": "block_metrics.csv",
    "metrics_records": "block_metrics.jsonl",
    "classifications": "classifications.csv",
    "routes": "routes.csv",
    "transitions": "transitions.csv",
    "communities": "communities.csv",
    "report": "report.json",
}
GRAPH_FILES = {"canonical": "compass.canonical", "dot": "compass.dot", "graphml": "compass.graphml"}

_NODE_LABELS = tuple(sorted(NODE_BY_LABEL))


@dataclass(frozen=True, slots=True)
class SessionSummary:
    """The per-session record persisted in sessions.csv."""

    session_id: int
    user_hash: str
    start_ms: int
    end_ms: int
    k_items: int


def sessionize_summaries(
    events: Iterable[LogEvent], gap_seconds: float, count_policy: str = "distinct"
) -> list[SessionSummary]:
    """Like events.sessionize but keeps only summaries (same ids and order)."""
    if not gap_seconds > 0:
        raise ConfigError("gap_seconds must be positive")
    count_items([], count_policy)
    gap_ms = round(gap_seconds * 1000)
    drafts = [
        (evs[0].ts_ms, user, evs[-1].ts_ms, count_items(evs, count_policy))
        for user, evs in session_groups(events, gap_ms)
    ]
    drafts.sort(key=lambda d: (d[0], d[1]))
    return [
        SessionSummary(i, user, start, end, k)
        for i, (start, user, end, k) in enumerate(drafts)
    ]


@dataclass
class PipelineConfig:
    inputs: tuple[Path, ...]
    out_dir: Path
    log_format: str = "a"
    filter_rules: FilterRules = field(default_factory=FilterRules)
    gap_seconds: float = DEFAULT_GAP_SECONDS
    count_policy: str = "distinct"
    block_size: int = 10_000
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    grouping: str = "stream"
    linkage_threshold: float = 0.0
    export_formats: tuple[str, ...] = ("canonical", "dot", "graphml")
    weight_edges_from_transitions: bool = False

    def __post_init__(self) -> None:
        if self.log_format not in LOG_FORMATS:
            raise ConfigError(f"unknown log format {self.log_format!r}")
        if self.count_policy not in COUNT_POLICIES:
            raise ConfigError(f"unknown count policy {self.count_policy!r}")
        if self.grouping not in GROUPINGS:
            raise ConfigError(f"unknown grouping {self.grouping!r}")
        if self.block_size < 1:
            raise ConfigError("block_size must be >= 1")
        if not self.gap_seconds > 0:
            raise ConfigError("gap_seconds must be positive")
        if self.linkage_threshold < 0:
            raise ConfigError("linkage threshold must be >= 0")
        unknown = [f for f in self.export_formats if f not in GRAPH_FORMATS]
        if unknown:
            raise ConfigError(f"unknown graph format {unknown[0]!r}")


def parse_log_files(
    paths: Sequence[Path | str], log_format: str, diagnostics: IO[str] | None = None
) -> tuple[list[LogEvent], int, int]:
    """Parse input files in order; returns (events, parsed_count, malformed_count).

    Diagnostics go to the given sink (default stderr), one line per
    malformed record, numbered per file.
    """
    sink = diagnostics if diagnostics is not None else sys.stderr
    events: list[LogEvent] = []
    malformed = 0
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                got, diags = parse_events(fh, log_format)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        events.extend(got)
        malformed += len(diags)
        for d in diags:
            print(d, file=sink)
    return events, len(events) + malformed, malformed


# --- artifact writers / readers -------------------------------------------


def _open_w(path: Path):
    return open(path, "w", encoding="utf-8", newline="")


def write_sessions_csv(summaries: Sequence[SessionSummary], path: Path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["session_id", "user_hash", "start_ms", "end_ms", "k_items"])
        w.writerows(
            (s.session_id, s.user_hash, s.start_ms, s.end_ms, s.k_items)
            for s in summaries
        )


def read_sessions_csv(path: Path) -> list[SessionSummary]:
    out: list[SessionSummary] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["session_id", "user_hash", "start_ms", "end_ms", "k_items"]:
            raise InputError(f"bad sessions file {path}: unexpected header")
        for row in reader:
            try:
                s = SessionSummary(int(row[0]), row[1], int(row[2]), int(row[3]), int(row[4]))
            except (IndexError, ValueError):
                raise InputError(f"bad sessions file {path}: row {row!r}") from None
            if s.k_items < 1:
                raise InputError(f"bad sessions file {path}: k_items < 1 in row {row!r}")
            out.append(s)
    return out


_METRIC_COLS = [
    "block_index", "q", "mean_n", "mean_k",
    "n_min", "n_max", "k_min", "k_max", "alpha", "beta", "variety",
]


def _opt(x: float | None) -> str:
    return "" if x is None else repr(x)


def write_metrics_csv(metrics: Sequence[BlockMetrics], path: Path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_METRIC_COLS)
        for m in metrics:
            w.writerow(
                [
                    m.block_index, m.q, repr(m.mean_n), repr(m.mean_k),
                    m.n_min, m.n_max, m.k_min, m.k_max,
                    _opt(m.alpha), _opt(m.beta), _opt(m.variety),
                ]
            )


def write_metrics_jsonl(metrics: Sequence[BlockMetrics], path: Path) -> None:
    with _open_w(path) as fh:
        for m in metrics:
            fh.write(
                json.dumps(
                    {
                        "block_index": m.block_index, "q": m.q,
                        "mean_n": m.mean_n, "mean_k": m.mean_k,
                        "n_min": m.n_min, "n_max": m.n_max,
                        "k_min": m.k_min, "k_max": m.k_max,
                        "alpha": m.alpha, "beta": m.beta, "variety": m.variety,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_metrics_csv(path: Path) -> list[BlockMetrics]:
    out: list[BlockMetrics] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _METRIC_COLS:
            raise InputError(f"bad metrics file {path}: unexpected header")
        for row in reader:
            try:
                out.append(
                    BlockMetrics(
                        block_index=int(row[0]), q=int(row[1]),
                        mean_n=float(row[2]), mean_k=float(row[3]),
                        n_min=int(row[4]), n_max=int(row[5]),
                        k_min=int(row[6]), k_max=int(row[7]),
                        alpha=float(row[8]) if row[8] else None,
                        beta=float(row[9]) if row[9] else None,
                        variety=float(row[10]) if row[10] else None,
                    )
                )
            except (IndexError, ValueError):
                raise InputError(f"bad metrics file {path}: row {row!r}") from None
    return out


_CLASSIFICATION_COLS = ["block_index", "n_tendency", "k_tendency", "stability", "label", "mismatch_cost"]


def write_classifications_csv(cls: Sequence[BlockClassification], path: Path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_CLASSIFICATION_COLS)
        for c in cls:
            w.writerow(
                [
                    c.block_index,
                    c.raw.n_tend.value, c.raw.k_tend.value, c.raw.stab.value,
                    c.node.label, repr(c.cost),
                ]
            )


def read_classifications_csv(path: Path) -> list[BlockClassification]:
    out: list[BlockClassification] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _CLASSIFICATION_COLS:
            raise InputError(f"bad classifications file {path}: unexpected header")
        for row in reader:
            try:
                raw = Triplet(Tendency(row[1]), Tendency(row[2]), Stability(row[3]))
                out.append(
                    BlockClassification(int(row[0]), raw, NODE_BY_LABEL[row[4]], float(row[5]))
                )
            except (IndexError, ValueError, KeyError):
                raise InputError(f"bad classifications file {path}: row {row!r}") from None
    return out


def write_routes_csv(routes: Sequence[SearchRoute], path: Path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["owner", "steps", "span_start", "span_end"])
        for r in routes:
            w.writerow([r.owner, ",".join(r.steps), r.span[0], r.span[1]])


def read_routes_csv(path: Path) -> list[SearchRoute]:
    out: list[SearchRoute] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["owner", "steps", "span_start", "span_end"]:
            raise InputError(f"bad routes file {path}: unexpected header")
        for row in reader:
            try:
                steps = tuple(row[1].split(","))
                out.append(SearchRoute(row[0], steps, (int(row[2]), int(row[3]))))
            except (IndexError, ValueError):
                raise InputError(f"bad routes file {path}: row {row!r}") from None
            if not steps or any(s not in NODE_BY_LABEL for s in steps):
                raise InputError(f"bad routes file {path}: steps {row[1]!r}")
    return out


def write_transitions_csv(tg: TransitionGraph, path: Path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["from", "to", "count"])
        for (x, y), n in sorted(tg.counts.items()):
            w.writerow([x, y, n])


def read_transitions_csv(path: Path) -> TransitionGraph:
    counts: dict[tuple[str, str], int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["from", "to", "count"]:
            raise InputError(f"bad transitions file {path}: unexpected header")
        for row in reader:
            try:
                counts[(row[0], row[1])] = int(row[2])
            except (IndexError, ValueError):
                raise InputError(f"bad transitions file {path}: row {row!r}") from None
    return TransitionGraph(counts)


def write_communities_csv(
    communities: Sequence[CognitiveCommunity], path: Path
) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["community_id", "size"]
            + [f"count_{label}" for label in _NODE_LABELS]
            + ["position"]
        )
        for c in communities:
            pos = position_community(c)
            w.writerow(
                [c.community_id, c.size]
                + [c.label_counts[label] for label in _NODE_LABELS]
                + [pos.label]
            )


def read_communities_count(path: Path) -> int:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "community_id":
            raise InputError(f"bad communities file {path}: unexpected header")
        return sum(1 for _ in reader)


# --- stages -----------------------------------------------------------------


def metrics_from_summaries(
    summaries: Sequence[SessionSummary], block_size: int
) -> list[BlockMetrics]:
    blocks = partition_blocks(summaries, block_size)
    means = [compute_block_means(compute_histogram(b), b) for b in blocks]
    return compute_variety_series(means)


def classify_series(
    metrics: Sequence[BlockMetrics], cfg: ClassifierConfig
) -> list[BlockClassification]:
    """Classify every block after the first against the series-wide bounds."""
    if len(metrics) < 2:
        return []
    bounds = metric_bounds(metrics)
    return [classify_block(m, bounds, cfg) for m in metrics[1:]]


def block_user_map(
    summaries: Sequence[SessionSummary], block_size: int
) -> dict[int, set[str]]:
    out: dict[int, set[str]] = {}
    for s in summaries:
        out.setdefault(s.session_id // block_size, set()).add(s.user_hash)
    return out


def routes_from_classifications(
    classifications: Sequence[BlockClassification],
    summaries: Sequence[SessionSummary],
    block_size: int,
    grouping: str,
) -> tuple[list[SearchRoute], TransitionGraph]:
    classified = [(c.block_index, c.node.label) for c in classifications]
    if grouping == "user":
        routes = extract_routes(classified, "user", block_user_map(summaries, block_size))
    else:
        routes = extract_routes(classified, "stream")
    return routes, build_transition_graph(routes)


def build_report(
    *,
    parsed: int,
    kept: int,
    malformed: int,
    summaries_total: int,
    metrics: Sequence[BlockMetrics],
    classifications: Sequence[BlockClassification],
    block_size: int,
    route_count: int,
    community_count: int,
) -> dict:
    q_of = {m.block_index: m.q for m in metrics}
    sessions_per_label = dict.fromkeys(_NODE_LABELS, 0)
    for c in classifications:
        sessions_per_label[c.node.label] += q_of[c.block_index]
    classified_sessions = sum(sessions_per_label.values())
    types = {
        label: {
            "sessions": n,
            "share_pct": (100.0 * n / classified_sessions) if classified_sessions else 0.0,
        }
        for label, n in sessions_per_label.items()
    }
    dominant = (
        min(_NODE_LABELS, key=lambda l: (-sessions_per_label[l], l))
        if classified_sessions
        else None
    )
    return {
        "events": {"parsed": parsed, "kept": kept, "malformed": malformed},
        "sessions": {
            "total": summaries_total,
            "classified": classified_sessions,
            "unclassified": summaries_total - classified_sessions,
        },
        "blocks": {
            "total": len(metrics),
            "classified": len(classifications),
            "block_size": block_size,
        },
        "types": types,
        "dominant_type": dominant,
        "route_count": route_count,
        "community_count": community_count,
    }


def run_pipeline(cfg: PipelineConfig, diagnostics: IO[str] | None = None) -> dict:
    """Run every stage, writing artifacts under cfg.out_dir; returns the report.

    On failure all files written by this run are removed. An input that
    yields no sessions aborts before any artifact exists.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    stage = "ingest"

    def target(name: str) -> Path:
        p = out / name
        written.append(p)
        return p

    try:
        events, parsed, malformed = parse_log_files(cfg.inputs, cfg.log_format, diagnostics)
        kept_events = filter_events(events, cfg.filter_rules)
        kept = len(kept_events)
        del events
        summaries = sessionize_summaries(kept_events, cfg.gap_seconds, cfg.count_policy)
        del kept_events
        if not summaries:
            raise InputError("no sessions")
        write_sessions_csv(summaries, target(ARTIFACT_FILES["sessions"]))

        stage = "metrics"
        metrics = metrics_from_summaries(summaries, cfg.block_size)
        write_metrics_csv(metrics, target(ARTIFACT_FILES["metrics"]))
        write_metrics_jsonl(metrics, target(ARTIFACT_FILES["metrics_records"]))

        stage = "classify"
        classifications = classify_series(metrics, cfg.classifier)
        write_classifications_csv(classifications, target(ARTIFACT_FILES["classifications"]))

        stage = "routes"
        routes, transitions = routes_from_classifications(
            classifications, summaries, cfg.block_size, cfg.grouping
        )
        write_routes_csv(routes, target(ARTIFACT_FILES["routes"]))
        write_transitions_csv(transitions, target(ARTIFACT_FILES["transitions"]))

        stage = "communities"
        communities = detect_communities(routes, cfg.linkage_threshold)
        write_communities_csv(communities, target(ARTIFACT_FILES["communities"]))

        stage = "graph"
        graph = build_base_graph(
            transition_edge_weights(transitions) if cfg.weight_edges_from_transitions else None
        )
        for fmt in cfg.export_formats:
            with _open_w(target(GRAPH_FILES[fmt])) as fh:
                fh.write(export_graph(graph, fmt))

        stage = "report"
        report = build_report(
            parsed=parsed,
            kept=kept,
            malformed=malformed,
            summaries_total=len(summaries),
            metrics=metrics,
            classifications=classifications,
            block_size=cfg.block_size,
            route_count=len(routes),
            community_count=len(communities),
        )
        with _open_w(target(ARTIFACT_FILES["report"])) as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return report
    except BaseException as exc:
        for p in written:
            p.unlink(missing_ok=True)
        if isinstance(exc, ConfigError):
            raise ConfigError(f"{stage}: {exc}") from exc
        if isinstance(exc, InputError):
            raise InputError(f"{stage}: {exc}") from exc
        raise


def report_stats(artifacts_dir: Path | str) -> str:
    """Human-readable summary recomputed from saved artifacts."""
    art = Path(artifacts_dir)
    needed = {
        "metrics": ARTIFACT_FILES["metrics"],
        "classifications": ARTIFACT_FILES["classifications"],
        "routes": ARTIFACT_FILES["routes"],
        "communities": ARTIFACT_FILES["communities"],
    }
    for name, filename in needed.items():
        if not (art / filename).exists():
            raise InputError(f"missing: {name}")
    metrics = read_metrics_csv(art / needed["metrics"])
    classifications = read_classifications_csv(art / needed["classifications"])
    route_count = len(read_routes_csv(art / needed["routes"]))
    community_count = read_communities_count(art / needed["communities"])

    q_of = {m.block_index: m.q for m in metrics}
    total_sessions = sum(q_of.values())
    per_label = dict.fromkeys(_NODE_LABELS, 0)
    for c in classifications:
        per_label[c.node.label] += q_of[c.block_index]
    classified = sum(per_label.values())

    lines = [
        f"blocks: {len(metrics)} total, {len(classifications)} classified",
        f"sessions: {total_sessions} total, {classified} classified",
        "type  sessions  share",
    ]
    for label in _NODE_LABELS:
        pct = (100.0 * per_label[label] / classified) if classified else 0.0
        lines.append(f"{label:<5} {per_label[label]:>9} {pct:6.2f}%")
    if classified:
        dominant = min(_NODE_LABELS, key=lambda l: (-per_label[l], l))
        lines.append(f"dominant type: {dominant}")
    lines.append(f"routes: {route_count}")
    lines.append(f"communities: {community_count}")
    return "\n".join(lines)
