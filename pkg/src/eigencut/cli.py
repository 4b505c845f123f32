"""Command-line interface.

Subcommands: gen (synthetic graphs), score (ranked links), sweep (removal
sweep report), replay (trace reachability), simulate (cascade runs),
verify-bounds (per-frame increment bound check).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .counterhash import derive_seed
from .errors import InputError
from .experiment import SweepConfig, run_sweep
from .fileio import (load_edge_list, load_labels, load_trace, reconcile_trace,
                     write_edge_list, write_labels, write_report)
from .graph import RemovalSet
from .propagation import assign_trivalency, icm_simulate, replay_trace, \
    verify_increment_bound
from .scoring import ScoreMethod, auto_q, score_links, top_q
from .spectral import SpectralConfig
from .synth import (TwoGroupParams, dataset1_preset, dataset2_preset,
                    generate_two_group, sample_seeds)

_DURATION_UNITS = {"s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}


def _parse_duration(token: str) -> float:
    token = token.strip().lower()
    unit = 1.0
    if token and token[-1] in _DURATION_UNITS:
        unit = _DURATION_UNITS[token[-1]]
        token = token[:-1]
    try:
        value = float(token) * unit
    except ValueError:
        raise InputError(f"cannot parse duration {token!r}") from None
    if value <= 0:
        raise InputError("frame width must be positive")
    return value


def _add_spectral_flags(sub):
    sub.add_argument("--tol", type=float, default=1e-10,
                     help="power-iteration residual tolerance")
    sub.add_argument("--max-iter", type=int, default=10000,
                     help="power-iteration budget")
    sub.add_argument("--seed", type=int, default=0, help="master seed")


def _add_io_flags(sub, labels=True):
    sub.add_argument("--edges", required=True, help="edge list TSV")
    if labels:
        sub.add_argument("--labels", help="node label TSV (NoN methods)")


def _load_inputs(args, need_labels: bool):
    graph, id_map = load_edge_list(args.edges)
    partition = None
    if getattr(args, "labels", None):
        partition = load_labels(args.labels, id_map, graph.node_count)
    elif need_labels:
        raise InputError("this method requires --labels")
    return graph, id_map, partition


def _trace_for(args, graph, id_map):
    width = _parse_duration(args.frame_width) if args.frame_width else None
    trace = load_trace(args.trace, id_map, frame_width=width)
    graph, trace = reconcile_trace(graph, trace,
                                   policy=args.on_missing_edge)
    return graph, trace


def _removal_for(args, graph, partition, id_map):
    """Removal set from --removal-file, or ranked by --method and --q."""
    if getattr(args, "removal_file", None):
        pairs = []
        from .fileio import _data_lines
        for lineno, line in _data_lines(args.removal_file):
            fields = line.split("\t")
            if len(fields) < 2:
                raise InputError(f"{args.removal_file}:{lineno}: expected "
                                 f"'follower<TAB>followee'")
            for tok in fields[:2]:
                if tok not in id_map:
                    raise InputError(
                        f"{args.removal_file}:{lineno}: unknown id {tok!r}")
            pairs.append((id_map[fields[0]], id_map[fields[1]]))
        return RemovalSet.from_pairs(graph, pairs)
    if not getattr(args, "method", None):
        return None
    method = ScoreMethod.parse(args.method)
    cfg = SpectralConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    scores = score_links(method, graph, partition, cfg)
    q = _resolve_q(args, graph.edge_count, scores)
    return top_q(scores, q)


def _resolve_q(args, m: int, scores=None):
    if getattr(args, "auto_q", False):
        return auto_q(scores)
    if getattr(args, "q", None) is not None:
        return args.q
    if getattr(args, "q_frac", None) is not None:
        return max(1, int(round(args.q_frac * m)))
    raise InputError("give --q, --q-frac, or --auto-q")


def _parse_seed_nodes(args, id_map, partition) -> np.ndarray:
    if getattr(args, "seeds_file", None):
        ids = []
        from .fileio import _data_lines
        for lineno, line in _data_lines(args.seeds_file):
            tok = line.strip()
            if tok not in id_map:
                raise InputError(f"{args.seeds_file}:{lineno}: unknown id {tok!r}")
            ids.append(id_map[tok])
        return np.asarray(sorted(set(ids)), dtype=np.int64)
    if getattr(args, "seed_nodes", None):
        ids = []
        for tok in args.seed_nodes.split(","):
            tok = tok.strip()
            if tok not in id_map:
                raise InputError(f"unknown seed user id {tok!r}")
            ids.append(id_map[tok])
        return np.asarray(sorted(set(ids)), dtype=np.int64)
    if getattr(args, "n_ini", None) and partition is not None:
        return sample_seeds(partition, args.n_ini,
                            derive_seed(args.seed, 0x5EED))
    raise InputError("give --seeds, --seeds-file, or --n-ini with --labels")


def _cmd_gen(args) -> int:
    if args.preset:
        params = dataset1_preset(args.seed) if args.preset == "dataset1" \
            else dataset2_preset(args.seed)
    else:
        required = (args.n1, args.n2, args.p11, args.p12, args.p21, args.p22)
        if any(v is None for v in required):
            raise InputError("give --preset or all of --n1 --n2 --p11 --p12 "
                             "--p21 --p22")
        params = TwoGroupParams(n1=args.n1, n2=args.n2, p11=args.p11,
                                p12=args.p12, p21=args.p21, p22=args.p22,
                                n_ini=args.n_ini, seed=args.seed)
    graph, partition = generate_two_group(params)
    write_edge_list(f"{args.out_prefix}.edges.tsv", graph)
    write_labels(f"{args.out_prefix}.labels.tsv", partition)
    bet = int((partition.codes[graph.src] != partition.codes[graph.dst]).sum())
    print(f"wrote {args.out_prefix}.edges.tsv and {args.out_prefix}.labels.tsv: "
          f"n={graph.node_count} m={graph.edge_count} between={bet}")
    return 0


def _cmd_score(args) -> int:
    method = ScoreMethod.parse(args.method)
    graph, id_map, partition = _load_inputs(args, method.needs_partition)
    cfg = SpectralConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    scores = score_links(method, graph, partition, cfg)
    if args.auto_q or args.q is not None or args.q_frac is not None:
        q = _resolve_q(args, graph.edge_count, scores)
    else:
        q = graph.edge_count  # default: full ranking
    ranked = top_q(scores, q)
    names = [""] * graph.node_count
    for tok, idx in id_map.items():
        names[idx] = tok
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if scores.degraded:
            print(f"# degraded: {';'.join(scores.flags)}", file=out)
        for i, j, value in ranked.triples():
            print(f"{names[i]}\t{names[j]}\t{format(value, '.12g')}", file=out)
    finally:
        if args.output:
            out.close()
    return 0


def _cmd_sweep(args) -> int:
    graph, id_map, partition = _load_inputs(args, False)
    methods = [ScoreMethod.parse(tok) for tok in args.methods.split(",")]
    if any(m.needs_partition for m in methods) and partition is None:
        raise InputError("NoN methods require --labels")
    q_values = q_fractions = None
    if args.q:
        q_values = [int(t) for t in args.q.split(",")]
    if args.q_frac:
        q_fractions = [float(t) for t in args.q_frac.split(",")]
    cfg = SweepConfig(methods=tuple(methods), q_values=q_values,
                      q_fractions=q_fractions,
                      mode="replay" if args.trace else "icm",
                      trials=args.trials, baseline_trials=args.baseline_trials,
                      seed=args.seed, deterministic=args.deterministic,
                      tol=args.tol, max_iter=args.max_iter)
    trace = seeds = triv = None
    if args.trace:
        graph, trace = _trace_for(args, graph, id_map)
    else:
        seeds = _parse_seed_nodes(args, id_map, partition)
        triv = assign_trivalency(graph, args.trivalency_seed)
    report = run_sweep(graph, partition, cfg, trace=trace, seeds=seeds,
                       trivalency=triv)
    write_report(report, args.output, fmt=args.format)
    print(f"wrote {args.output} ({len(report.rows)} rows)")
    return 0


def _cmd_replay(args) -> int:
    graph, id_map, partition = _load_inputs(args, False)
    graph, trace = _trace_for(args, graph, id_map)
    removal = _removal_for(args, graph, partition, id_map)
    r = replay_trace(graph, trace, removal)
    q = len(removal) if removal is not None else 0
    print(f"reachability\t{format(r, '.12g')}\t(q={q})")
    return 0


def _cmd_simulate(args) -> int:
    graph, id_map, partition = _load_inputs(args, False)
    seeds = _parse_seed_nodes(args, id_map, partition)
    triv = assign_trivalency(graph, args.trivalency_seed)
    removal = _removal_for(args, graph, partition, id_map)
    result = icm_simulate(graph, seeds, triv, removal, runs=args.trials,
                          seed=args.seed)
    q = len(removal) if removal is not None else 0
    print(f"mean_activated\t{format(result.mean_activated, '.12g')}"
          f"\t(runs={args.trials}, q={q})")
    if args.per_run:
        print("per_run\t" + ",".join(str(int(v)) for v in result.per_run))
    return 0


def _cmd_verify_bounds(args) -> int:
    graph, id_map, _ = _load_inputs(args, False)
    graph, trace = _trace_for(args, graph, id_map)
    report = verify_increment_bound(graph, trace, s=args.s)
    print(f"lambda_max\t{format(report.lam_max, '.12g')}")
    print(f"constant_C\t{format(report.constant, '.12g')}")
    print(f"s\t{report.s}")
    print(f"bound\t{format(report.bound, '.12g')}")
    print("frame\tincrement\tc_value\tstatus")
    for f in report.frames:
        status = "skipped" if f.skipped else (
            "VIOLATED" if f.violated else "ok")
        c_txt = "-" if f.skipped else format(f.c_value, ".6g")
        print(f"{f.frame}\t{f.increment}\t{c_txt}\t{status}")
    print(f"verdict\t{'ok' if report.ok else 'VIOLATED'}"
          f"\t(skipped={report.skipped_frames})")
    return 0 if report.ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigencut",
        description="Spectral follower-link scores for event-propagation "
                    "containment")
    parser.add_argument("--version", action="version",
                        version=f"eigencut {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a synthetic two-group graph")
    gen.add_argument("--preset", choices=["dataset1", "dataset2"])
    gen.add_argument("--n1", type=int)
    gen.add_argument("--n2", type=int)
    gen.add_argument("--p11", type=float)
    gen.add_argument("--p12", type=float)
    gen.add_argument("--p21", type=float)
    gen.add_argument("--p22", type=float)
    gen.add_argument("--n-ini", type=int, default=5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-prefix", required=True)
    gen.set_defaults(func=_cmd_gen)

    score = subs.add_parser("score", help="rank follower links by a method")
    _add_io_flags(score)
    score.add_argument("--method", required=True)
    score.add_argument("--q", type=int)
    score.add_argument("--q-frac", type=float)
    score.add_argument("--auto-q", action="store_true",
                       help="pick q maximizing mean top-q score")
    _add_spectral_flags(score)
    score.add_argument("--output")
    score.set_defaults(func=_cmd_score)

    sweep = subs.add_parser("sweep", help="removal sweep with baselines")
    _add_io_flags(sweep)
    sweep.add_argument("--methods", required=True,
                       help="comma-separated method names")
    sweep.add_argument("--q", help="comma-separated removal counts")
    sweep.add_argument("--q-frac", help="comma-separated fractions of m")
    sweep.add_argument("--trace", help="replay mode: trace TSV")
    sweep.add_argument("--frame-width",
                       help="bin width for timestamped traces (e.g. 1h)")
    sweep.add_argument("--on-missing-edge", default="reject",
                       choices=["reject", "insert-edge", "drop"])
    sweep.add_argument("--seeds", dest="seed_nodes",
                       help="icm mode: comma-separated seed user ids")
    sweep.add_argument("--seeds-file", help="icm mode: file of seed ids")
    sweep.add_argument("--n-ini", type=int,
                       help="icm mode: sample this many group-1 seeds")
    sweep.add_argument("--trivalency-seed", type=int, default=0)
    sweep.add_argument("--trials", type=int, default=30,
                       help="icm runs per evaluation")
    sweep.add_argument("--baseline-trials", type=int, default=10)
    sweep.add_argument("--deterministic", action="store_true",
                       help="fixed-order execution (always on here; recorded "
                            "in provenance)")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_spectral_flags(sweep)
    sweep.add_argument("--output", required=True)
    sweep.set_defaults(func=_cmd_sweep)

    replay = subs.add_parser("replay", help="trace reachability after removal")
    _add_io_flags(replay)
    replay.add_argument("--trace", required=True)
    replay.add_argument("--frame-width")
    replay.add_argument("--on-missing-edge", default="reject",
                        choices=["reject", "insert-edge", "drop"])
    replay.add_argument("--removal-file", help="TSV of links to delete")
    replay.add_argument("--method")
    replay.add_argument("--q", type=int)
    replay.add_argument("--q-frac", type=float)
    replay.add_argument("--auto-q", action="store_true")
    _add_spectral_flags(replay)
    replay.set_defaults(func=_cmd_replay)

    sim = subs.add_parser("simulate", help="independent-cascade simulation")
    _add_io_flags(sim)
    sim.add_argument("--seeds", dest="seed_nodes")
    sim.add_argument("--seeds-file")
    sim.add_argument("--n-ini", type=int)
    sim.add_argument("--trivalency-seed", type=int, default=0)
    sim.add_argument("--trials", type=int, default=30)
    sim.add_argument("--removal-file")
    sim.add_argument("--method")
    sim.add_argument("--q", type=int)
    sim.add_argument("--q-frac", type=float)
    sim.add_argument("--auto-q", action="store_true")
    sim.add_argument("--per-run", action="store_true",
                     help="also print per-run activated counts")
    _add_spectral_flags(sim)
    sim.set_defaults(func=_cmd_simulate)

    vb = subs.add_parser("verify-bounds",
                         help="check per-frame increment bounds on a trace")
    _add_io_flags(vb, labels=False)
    vb.add_argument("--trace", required=True)
    vb.add_argument("--frame-width")
    vb.add_argument("--on-missing-edge", default="reject",
                    choices=["reject", "insert-edge", "drop"])
    vb.add_argument("--s", type=int, help="sparsity budget (default: observed)")
    vb.set_defaults(func=_cmd_verify_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
