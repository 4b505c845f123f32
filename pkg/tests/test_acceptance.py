"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL lines
and measured margins. The two synthetic-replication criteria run 1000
generated graphs each and take a few minutes; everything else is seconds.
"""

import time

import numpy as np
import pytest

from eigencut import (PropagationTrace, RemovalSet, SweepConfig,
                      assign_trivalency, build_graph, dataset1_preset,
                      dataset2_preset, dense_spectrum_oracle, icm_simulate,
                      leading_left_eigenpair, paired_bootstrap_ci,
                      remove_edges, run_sweep, score_links, top_q,
                      two_group_replication, verify_increment_bound)
from eigencut.cli import main as cli_main
from eigencut.graph import DirectedGraph

from conftest import random_directed, random_mutual
from test_propagation import exhaustive_icm_expectation


VERDICT_LINES = []


def verdict(number, passed, detail):
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} — {detail}"
    print(line)
    VERDICT_LINES.append(line)
    assert passed, line


def angle(u, v):
    c = abs(float(u @ v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.arccos(min(1.0, c)))


def test_criterion_1_spectral_oracle_equivalence():
    """Power iteration matches the dense oracle on 100 random digraphs."""
    rng = np.random.default_rng(101)
    worst_rel = worst_angle = 0.0
    t0 = time.perf_counter()
    for k in range(100):
        n = int(rng.integers(30, 65))
        density = float(rng.uniform(0.05, 0.3))
        g = random_directed(n, density, seed=10_000 + k)
        power = leading_left_eigenpair(g, tol=1e-12)
        assert power.converged
        spec = dense_spectrum_oracle(g)
        rel = abs(power.value - spec.leading_value) / max(spec.leading_value, 1e-30)
        worst_rel = max(worst_rel, rel)
        worst_angle = max(worst_angle, angle(power.vector, spec.leading_left))
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 1e-8 and worst_angle <= 1e-6 and elapsed < 10.0
    verdict(1, ok, f"100 graphs: max |dlam|/lam {worst_rel:.2e} (<=1e-8), "
                   f"max angle {worst_angle:.2e} (<=1e-6), "
                   f"runtime {elapsed:.2f}s (<10s)")


def test_criterion_2_removal_lower_bound():
    """lam(A) - sum y_i y_j <= lam(A~) + 1e-6 on 100 (graph, removal) pairs.

    Instances are mutual-follow graphs with pair removals (the regime where
    the bound is a theorem; directed instances violate it, see
    test_spectral.py and the decisions ledger).
    """
    rng = np.random.default_rng(202)
    checked = violations = 0
    worst_slack = -np.inf
    while checked < 100:
        n = int(rng.integers(24, 65))
        g = random_mutual(n, float(rng.uniform(0.06, 0.2)),
                          seed=int(rng.integers(1 << 30)))
        upper = np.nonzero(g.src < g.dst)[0]
        if len(upper) < 2:
            continue
        pairs_to_take = int(rng.integers(1, min(10, len(upper)) + 1))
        chosen = rng.choice(upper, pairs_to_take, replace=False)
        pairs = [(int(g.src[e]), int(g.dst[e])) for e in chosen]
        pairs += [(j, i) for (i, j) in pairs]
        removal = RemovalSet.from_pairs(g, pairs)
        assert len(removal) <= 20
        checked += 1
        y = leading_left_eigenpair(g, tol=1e-12).vector
        lam_a = dense_spectrum_oracle(g).leading_value
        lam_at = dense_spectrum_oracle(remove_edges(g, removal)).leading_value
        drop = float(sum(y[i] * y[j] for (i, j, _) in removal.triples()))
        slack = (lam_a - drop) - lam_at
        worst_slack = max(worst_slack, slack)
        if slack > 1e-6:
            violations += 1
    verdict(2, violations == 0,
            f"100 pairs: {violations} violations, worst lhs-rhs "
            f"{worst_slack:.2e} (tolerance 1e-6)")


def test_criterion_3_increment_bound_on_symmetric_traces():
    """50 synthetic traces with symmetric per-frame activation matrices."""
    rng = np.random.default_rng(303)
    violated = skipped = 0
    for k in range(50):
        n = int(rng.integers(20, 61))
        g = random_mutual(n, float(rng.uniform(0.08, 0.2)), seed=20_000 + k)
        upper = np.nonzero(g.src < g.dst)[0]
        if len(upper) == 0:
            continue
        frames = []
        for _ in range(int(rng.integers(2, 6))):
            take = rng.random(len(upper)) < rng.uniform(0.2, 0.8)
            ids = upper[take]
            pairs = np.concatenate([
                np.stack([g.src[ids], g.dst[ids]], axis=1),
                np.stack([g.dst[ids], g.src[ids]], axis=1)]) if ids.size \
                else np.zeros((0, 2), dtype=np.int64)
            frames.append(pairs)
        seeds = rng.choice(n, int(rng.integers(1, 4)), replace=False)
        report = verify_increment_bound(g, PropagationTrace(tuple(frames), seeds))
        violated += report.violated_frames
        skipped += report.skipped_frames
    verdict(3, violated == 0,
            f"50 traces: {violated} violated frames, {skipped} skipped "
            f"(defective) frames reported")


def test_criterion_4_icm_exactness():
    """200k-run Monte Carlo vs exhaustive outcome-world expectation."""
    rng = np.random.default_rng(404)
    worst_rel = 0.0
    t0 = time.perf_counter()
    built = 0
    attempt = 0
    while built < 30:
        attempt += 1
        n = int(rng.integers(6, 11))
        g = random_directed(n, float(rng.uniform(0.1, 0.25)),
                            seed=30_000 + attempt)
        if not 1 <= g.edge_count <= 12:
            continue
        triv = assign_trivalency(g, seed=attempt)
        if len(set(triv.probabilities.tolist())) < 2 and g.edge_count > 2:
            continue  # want mixed probabilities
        built += 1
        seeds = rng.choice(n, int(rng.integers(1, 3)), replace=False)
        mc = icm_simulate(g, seeds, triv, runs=200_000, seed=1000 + built)
        exact = exhaustive_icm_expectation(g, seeds, triv.probabilities)
        worst_rel = max(worst_rel, abs(mc.mean_activated - exact) / exact)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 0.005 and elapsed < 60.0
    verdict(4, ok, f"30 graphs x 200k runs: max relative error "
                   f"{worst_rel:.2e} (<=5e-3), runtime {elapsed:.1f}s (<60s)")


def _replication(number, preset, suffix):
    pairs = [(f"NoN-LES-{suffix}", "LES"),
             (f"NoN-NetMelt-{suffix}", "NetMelt"),
             (f"NoN-InDeg-{suffix}", "InDeg")]
    methods = sorted({m for pair in pairs for m in pair})
    eff = two_group_replication(preset, methods, n_graphs=1000, q_frac=0.2,
                                icm_runs=256, baseline_trials=10, seed=0)
    details = []
    all_ok = True
    for non, plain in pairs:
        diffs = eff[non] - eff[plain]
        lo, hi = paired_bootstrap_ci(diffs, n_boot=2000, seed=7)
        ok = diffs.mean() > 0 and lo > 0
        all_ok &= ok
        details.append(f"{non} vs {plain}: mean diff {diffs.mean():+.4f}, "
                       f"95% CI ({lo:+.4f}, {hi:+.4f}) "
                       f"{'ok' if ok else 'NOT SEPARATED'}")
    verdict(number, all_ok, "1000 graphs, q=20% of m; " + "; ".join(details))


def test_criterion_5_dataset1_replication():
    """Between-network variants beat their plain counterparts on Dataset 1."""
    _replication(5, dataset1_preset(), "Bet")


def test_criterion_6_dataset2_replication():
    """Within-network variants beat their plain counterparts on Dataset 2."""
    _replication(6, dataset2_preset(), "Wit")


def test_criterion_7_baseline_protocol():
    """Default baseline uses exactly 10 trials; q=0 baseline mean is 1."""
    cfg = SweepConfig(methods=("LES",), q_values=(0, 1))
    ten = cfg.baseline_trials == 10
    g = build_graph([(1, 0), (2, 1)], 3)
    trace = PropagationTrace((np.array([[1, 0]]), np.array([[2, 1]])), [0])
    report = run_sweep(g, None, cfg, trace=trace)
    q0 = [r for r in report.rows if r.q == 0][0]
    exact_one = (q0.baseline_mean == 1.0
                 and len(q0.baseline_values) == 10
                 and all(v == 1.0 for v in q0.baseline_values))
    verdict(7, ten and exact_one,
            f"default trials {cfg.baseline_trials} (=10), q=0 baseline mean "
            f"{q0.baseline_mean!r} over {len(q0.baseline_values)} trials")


def test_criterion_8_efficiency_identity():
    """Stored efficiency recomputes from stored reachabilities to 1e-12."""
    g = random_directed(40, 0.12, seed=808)
    triv = assign_trivalency(g, 2)
    cfg = SweepConfig(methods=("LES", "InDeg", "NetMelt"),
                      q_fractions=(0.05, 0.2, 0.5), mode="icm", trials=12,
                      seed=11)
    report = run_sweep(g, None, cfg, seeds=[0, 1], trivalency=triv)
    worst = 0.0
    for row in report.rows:
        recomputed = (0.0 if row.baseline_mean == 0 else
                      (row.baseline_mean - row.reachability) / row.baseline_mean)
        worst = max(worst, abs(recomputed - row.efficiency))
    verdict(8, worst <= 1e-12,
            f"{len(report.rows)} rows: max |stored - recomputed| {worst:.2e}")


def _timed_les_select(g, q):
    t0 = time.perf_counter()
    scores = score_links("LES", g)
    top_q(scores, q)
    return time.perf_counter() - t0


def _random_graph_fixed_n(m_target, n, seed):
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, int(m_target * 1.1))
    dst = rng.integers(0, n, int(m_target * 1.1))
    ok = src != dst
    keys = np.unique(src[ok] * n + dst[ok])
    rng.shuffle(keys)
    keys = np.sort(keys[:m_target])
    return DirectedGraph(n, keys // n, keys % n)


def test_criterion_9_complexity_smoke():
    """Doubling m at fixed q raises LES score+select time by <= 2.6x."""
    n = 50_000
    q = 100
    medians = []
    for m in (100_000, 200_000, 400_000):
        times = []
        for rep in range(5):
            g = _random_graph_fixed_n(m, n, seed=900 + rep)
            assert g.edge_count == m
            times.append(_timed_les_select(g, q))
        medians.append(sorted(times)[2])
    r1 = medians[1] / medians[0]
    r2 = medians[2] / medians[1]
    verdict(9, r1 <= 2.6 and r2 <= 2.6,
            f"median seconds {[f'{t:.3f}' for t in medians]} for m=1e5,2e5,4e5; "
            f"doubling ratios {r1:.2f}x, {r2:.2f}x (<=2.6x)")


def test_criterion_10_sweep_determinism(tmp_path, capsys):
    """Two identical --deterministic sweep invocations, byte-identical."""
    prefix = str(tmp_path / "d1")
    assert cli_main(["gen", "--preset", "dataset1", "--seed", "4",
                     "--out-prefix", prefix]) == 0
    outputs = []
    for name in ("a", "b"):
        for fmt in ("csv", "json"):
            out = tmp_path / f"{name}.{fmt}"
            code = cli_main([
                "sweep", "--edges", f"{prefix}.edges.tsv",
                "--labels", f"{prefix}.labels.tsv",
                "--methods", "LES,InDeg,NetMelt,NoN-LES-Bet,NoN-InDeg-Bet",
                "--q-frac", "0.05,0.1,0.2", "--n-ini", "5",
                "--trivalency-seed", "3", "--trials", "16",
                "--baseline-trials", "10", "--seed", "12", "--deterministic",
                "--format", fmt, "--output", str(out)])
            assert code == 0
            outputs.append(out.read_bytes())
    capsys.readouterr()
    same = outputs[0] == outputs[2] and outputs[1] == outputs[3]
    verdict(10, same,
            f"csv bytes equal: {outputs[0] == outputs[2]}, "
            f"json bytes equal: {outputs[1] == outputs[3]}")
