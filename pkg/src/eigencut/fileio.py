"""File formats: edge lists, node labels, propagation traces, reports.

All tabular inputs are UTF-8 TSV with ``#`` full-line comments. External
string ids are mapped to dense integer ids in first-appearance order; the
mapping is returned so labels and traces resolve against it.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

import numpy as np

from .errors import InputError
from .experiment import ExperimentReport, ReportRow
from .graph import DirectedGraph, NoNPartition, build_graph
from .propagation import PropagationTrace

__all__ = ["load_edge_list", "load_labels", "load_report", "load_trace",
           "reconcile_trace", "write_edge_list", "write_labels",
           "write_report", "write_trace"]

REPORT_COLUMNS = ("method", "q", "q_frac", "reachability", "baseline_mean",
                  "efficiency", "between_frac", "flags")


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def load_edge_list(path) -> tuple[DirectedGraph, dict]:
    """Read ``follower<TAB>followee`` lines into a graph plus its id map."""
    id_map: dict[str, int] = {}
    pairs = []

    def resolve(token: str) -> int:
        if token not in id_map:
            id_map[token] = len(id_map)
        return id_map[token]

    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise InputError(
                f"{path}:{lineno}: expected 'follower<TAB>followee', got {line!r}")
        pairs.append((resolve(fields[0]), resolve(fields[1])))
    graph = build_graph(pairs, len(id_map))
    return graph, id_map


def write_edge_list(path, g: DirectedGraph, id_map: dict | None = None) -> None:
    names = _inverse_map(id_map, g.node_count)
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in zip(g.src, g.dst):
            fh.write(f"{names[i]}\t{names[j]}\n")


def _inverse_map(id_map: dict | None, n: int) -> list[str]:
    if id_map is None:
        return [str(i) for i in range(n)]
    names = [""] * n
    for token, idx in id_map.items():
        names[idx] = token
    return names


def load_labels(path, id_map: dict, node_count: int) -> NoNPartition:
    """Read ``node<TAB>label`` lines; every graph node must be covered.

    Lines for ids absent from the map are ignored (label dumps routinely
    cover more users than one event's follower graph).
    """
    labels: list[str | None] = [None] * node_count
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise InputError(
                f"{path}:{lineno}: expected 'node<TAB>label', got {line!r}")
        node, label = fields
        if node in id_map:
            labels[id_map[node]] = label
    missing = [i for i, t in enumerate(labels) if t is None]
    if missing:
        raise InputError(
            f"{path}: no label for node ids {missing[:10]}"
            + ("..." if len(missing) > 10 else ""))
    return NoNPartition(labels)


def write_labels(path, p: NoNPartition, id_map: dict | None = None) -> None:
    names = _inverse_map(id_map, len(p))
    with open(path, "w", encoding="utf-8") as fh:
        for i, label in enumerate(p.labels):
            fh.write(f"{names[i]}\t{label}\n")


def _parse_timestamp(token: str, path, lineno: int) -> float:
    try:
        ts = datetime.fromisoformat(token.replace("Z", "+00:00"))
    except ValueError:
        raise InputError(
            f"{path}:{lineno}: {token!r} is not an ISO-8601 timestamp") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)  # naive stamps: fixed offset
    return ts.timestamp()


def load_trace(path, id_map: dict, frame_width: float | None = None) -> PropagationTrace:
    """Read a trace of ``frame|timestamp<TAB>retweeter<TAB>source`` rows.

    Seed posters carry source ``-``. Integer first columns are 1-based frame
    numbers preserved verbatim; ISO-8601 timestamps are binned into frames of
    ``frame_width`` seconds counted from the earliest row.
    """
    rows = []
    timestamped = None
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise InputError(
                f"{path}:{lineno}: expected 3 tab-separated fields, got {line!r}")
        when, retweeter, source = fields
        try:
            t_value: float = float(int(when))
            is_ts = False
        except ValueError:
            t_value = _parse_timestamp(when, path, lineno)
            is_ts = True
        if timestamped is None:
            timestamped = is_ts
        elif timestamped != is_ts:
            raise InputError(
                f"{path}:{lineno}: mixed frame numbers and timestamps")
        if retweeter not in id_map:
            raise InputError(
                f"{path}:{lineno}: unknown user id {retweeter!r}")
        if source != "-" and source not in id_map:
            raise InputError(f"{path}:{lineno}: unknown user id {source!r}")
        rows.append((t_value, id_map[retweeter],
                     None if source == "-" else id_map[source], lineno))
    if timestamped:
        if frame_width is None or frame_width <= 0:
            raise InputError(
                f"{path}: timestamped trace needs a positive frame width")
        t0 = min(r[0] for r in rows)
        rows = [(int((t - t0) // frame_width) + 1, rt, srcn, ln)
                for t, rt, srcn, ln in rows]
    seeds = []
    by_frame: dict[int, list] = {}
    for t_value, rt, srcn, lineno in rows:
        if srcn is None:
            seeds.append(rt)
            continue
        frame = int(t_value)
        if frame < 1:
            raise InputError(
                f"{path}:{lineno}: frame numbers are 1-based, got {frame}")
        by_frame.setdefault(frame, []).append((rt, srcn))
    frame_count = max(by_frame) if by_frame else 0
    frames = [np.asarray(by_frame.get(t, []), dtype=np.int64).reshape(-1, 2)
              for t in range(1, frame_count + 1)]
    return PropagationTrace(tuple(frames), np.asarray(seeds, dtype=np.int64))


def write_trace(path, trace: PropagationTrace, id_map: dict | None = None,
                node_count: int | None = None) -> None:
    n = node_count if node_count is not None else (
        int(max([trace.seeds.max(initial=-1)]
                + [f.max(initial=-1) for f in trace.frames])) + 1)
    names = _inverse_map(id_map, n)
    with open(path, "w", encoding="utf-8") as fh:
        for s in trace.seeds:
            fh.write(f"0\t{names[s]}\t-\n")
        for t, frame in enumerate(trace.frames, start=1):
            for i, j in frame:
                fh.write(f"{t}\t{names[i]}\t{names[j]}\n")


def reconcile_trace(g: DirectedGraph, trace: PropagationTrace,
                    policy: str = "reject") -> tuple[DirectedGraph, PropagationTrace]:
    """Resolve trace links that are not edges of the graph.

    ``reject`` raises naming the first offender, ``drop`` deletes the
    records, ``insert-edge`` returns a new graph containing the missing
    links. The input graph is never modified.
    """
    if policy not in ("reject", "drop", "insert-edge"):
        raise InputError(f"unknown missing-edge policy: {policy!r}")
    missing = []
    kept_frames = []
    for t, frame in enumerate(trace.frames, start=1):
        if frame.size == 0:
            kept_frames.append(frame)
            continue
        ids = g.edge_ids(frame)
        bad = ids < 0
        if bad.any():
            if policy == "reject":
                i, j = frame[int(np.nonzero(bad)[0][0])]
                raise InputError(
                    f"frame {t} activates ({i}, {j}), which is not a follower "
                    f"link of the graph")
            missing.extend(map(tuple, frame[bad]))
            kept_frames.append(frame[~bad] if policy == "drop" else frame)
        else:
            kept_frames.append(frame)
    if policy == "drop":
        return g, PropagationTrace(tuple(kept_frames), trace.seeds)
    if not missing:
        return g, trace
    pairs = np.concatenate([np.stack([g.src, g.dst], axis=1),
                            np.asarray(missing, dtype=np.int64)])
    return build_graph(pairs, g.node_count), trace


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> None:
    """Write a sweep report; csv carries the flat columns to 12 significant
    digits, json is a lossless round-trip including provenance and per-trial
    baselines."""
    report.audit()
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for r in report.rows:
                writer.writerow([
                    r.method, r.q, _fmt(r.q_frac), _fmt(r.reachability),
                    _fmt(r.baseline_mean), _fmt(r.efficiency),
                    _fmt(r.between_frac), ";".join(r.flags)])
    elif fmt == "json":
        payload = {
            "provenance": report.provenance,
            "rows": [{
                "method": r.method,
                "q": r.q,
                "q_frac": r.q_frac,
                "reachability": r.reachability,
                "baseline_mean": r.baseline_mean,
                "baseline_values": list(r.baseline_values),
                "efficiency": r.efficiency,
                "between_frac": r.between_frac,
                "flags": list(r.flags),
            } for r in report.rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise InputError(f"unknown report format: {fmt!r}")


def load_report(path) -> ExperimentReport:
    """Read a report back; json restores everything, csv the flat columns."""
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{":
            payload = json.load(fh)
            rows = tuple(ReportRow(
                method=r["method"], q=int(r["q"]), q_frac=r["q_frac"],
                reachability=r["reachability"],
                baseline_mean=r["baseline_mean"],
                baseline_values=tuple(r["baseline_values"]),
                efficiency=r["efficiency"],
                between_frac=r["between_frac"],
                flags=tuple(r["flags"]),
            ) for r in payload["rows"])
            return ExperimentReport(rows=rows,
                                    provenance=payload.get("provenance", {}))
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != REPORT_COLUMNS:
            raise InputError(f"{path}: unexpected report columns {header}")
        rows = []
        for rec in reader:
            method, q, q_frac, reach, base, eff, bet, flags = rec
            rows.append(ReportRow(
                method=method, q=int(q), q_frac=float(q_frac),
                reachability=float(reach), baseline_mean=float(base),
                baseline_values=(), efficiency=float(eff),
                between_frac=float(bet) if bet else None,
                flags=tuple(t for t in flags.split(";") if t)))
        return ExperimentReport(rows=tuple(rows))
