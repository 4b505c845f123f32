"""Event propagation engines.

Two complementary machines share the follower-link convention (an edge (i, j)
carries an event from followee j to follower i):

* exact frame-by-frame replay of recorded activation traces under the
  thresholded state recursion, used to measure reachability after removals;
* an independent-cascade simulator with trivalency activation probabilities,
  whose per-link coin flips are counter-hashed from (master seed, run, edge)
  so distinct removal sets are coupled through common random numbers.

The module also verifies the spectral upper bound on per-frame activation
increments using the dense oracle's eigendecomposition machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .counterhash import uniform
from .denseeig import dense_spectrum_oracle
from .errors import InputError
from .graph import DirectedGraph, RemovalSet

__all__ = [
    "BoundReport",
    "FrameBound",
    "IcmResult",
    "PropagationTrace",
    "TrivalencyAssignment",
    "assign_trivalency",
    "icm_simulate",
    "icm_trace",
    "non_threshold_step",
    "replay_trace",
    "threshold_step",
    "verify_increment_bound",
]

TRIVALENCY_LEVELS = (1.0, 0.1, 0.01)
_TRIV_SALT = 0x7261  # address space for trivalency class draws
_ICM_BLOCK_CELLS = 20_000_000  # max runs*edges uniforms materialized at once


@dataclass(frozen=True)
class PropagationTrace:
    """Frame-indexed activated-link records plus the initial seed posters.

    ``frames[t]`` holds the (retweeter, source) pairs activated during frame
    t+1; ``seeds`` are the users active at frame 0.
    """

    frames: tuple
    seeds: np.ndarray

    def __post_init__(self):
        frames = tuple(np.ascontiguousarray(f, dtype=np.int64).reshape(-1, 2)
                       for f in self.frames)
        object.__setattr__(self, "frames", frames)
        seeds = np.unique(np.asarray(self.seeds, dtype=np.int64))
        object.__setattr__(self, "seeds", seeds)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def participants(self) -> np.ndarray:
        """Seeds plus every retweeter appearing in some frame."""
        parts = [self.seeds]
        for f in self.frames:
            parts.append(f[:, 0])
        return np.unique(np.concatenate(parts)) if parts else self.seeds


def _as_state(r, n: int | None = None) -> np.ndarray:
    state = np.asarray(r)
    if state.dtype != np.int64:
        state = state.astype(np.int64)
    if n is not None and state.shape != (n,):
        raise InputError(f"state vector must have length {n}")
    return np.clip(state, 0, 1)


def threshold_step(active_links, r) -> tuple[np.ndarray, np.ndarray]:
    """One synchronous update of the thresholded state recursion.

    ``increment`` is the clipped product of the frame's activation matrix
    with the state (1 where some listed link (i, j) has an active source j),
    computed from the frame-start state; ``r_next`` adds it into the state.
    Both returned vectors are binary.
    """
    r = _as_state(r)
    links = np.ascontiguousarray(active_links, dtype=np.int64).reshape(-1, 2)
    counts = np.bincount(links[:, 0], weights=r[links[:, 1]].astype(np.float64),
                         minlength=r.shape[0])
    increment = (counts > 0).astype(np.int64)
    r_next = np.minimum(r + increment, 1)
    return r_next, increment


def non_threshold_step(between_links, within_links, r):
    """Thresholded update with the frame links split by network membership.

    Returns ``(r_next, inc_between, inc_within)``; the merged update equals
    :func:`threshold_step` on the concatenated link list.
    """
    r = _as_state(r)
    _, inc_bet = threshold_step(between_links, r)
    _, inc_wit = threshold_step(within_links, r)
    r_next = np.minimum(r + inc_bet + inc_wit, 1)
    return r_next, inc_bet, inc_wit


def _validate_trace(g: DirectedGraph, trace: PropagationTrace) -> list[np.ndarray]:
    """Map every frame's links to canonical edge ids, or name the bad link."""
    if trace.seeds.size and (trace.seeds.min() < 0
                             or trace.seeds.max() >= g.node_count):
        raise InputError("trace seed id outside the graph's node range")
    frame_edges = []
    for t, links in enumerate(trace.frames):
        if links.size == 0:
            frame_edges.append(np.zeros(0, dtype=np.int64))
            continue
        ids = g.edge_ids(links)
        if (ids < 0).any():
            k = int(np.nonzero(ids < 0)[0][0])
            i, j = links[k]
            raise InputError(
                f"frame {t + 1} activates ({i}, {j}), which is not a follower "
                f"link of the graph")
        frame_edges.append(ids)
    return frame_edges


def _replay_active(g: DirectedGraph, trace: PropagationTrace,
                   frame_edges: list[np.ndarray],
                   removed: np.ndarray | None,
                   keep_states: bool = False):
    n = g.node_count
    r = np.zeros(n, dtype=np.int64)
    r[trace.seeds] = 1
    states = [r.copy()] if keep_states else None
    for ids in frame_edges:
        if removed is not None and ids.size:
            ids = ids[~removed[ids]]
        links = np.stack([g.src[ids], g.dst[ids]], axis=1) if ids.size else \
            np.zeros((0, 2), dtype=np.int64)
        r, _ = threshold_step(links, r)
        if keep_states:
            states.append(r.copy())
    return (r, states) if keep_states else r


def replay_trace(g: DirectedGraph, trace: PropagationTrace,
                 removal: RemovalSet | None = None) -> float:
    """Fraction of the trace's activated users still reached after removals.

    A recorded activation (i, j) fires only if j is active at the frame
    start and the link survives the removal set; seeds always count as
    active. Normalization is by the activated count of the unremoved replay.
    """
    frame_edges = _validate_trace(g, trace)
    baseline = _replay_active(g, trace, frame_edges, None)
    n0 = int(baseline.sum())
    if n0 == 0:
        return 1.0
    if removal is None or len(removal) == 0:
        return 1.0
    if removal.graph is not g:
        raise InputError("removal set belongs to a different graph")
    survived = _replay_active(g, trace, frame_edges, removal.member_mask())
    return float(survived.sum() / n0)


@dataclass(frozen=True)
class TrivalencyAssignment:
    """Per-link activation probabilities drawn uniformly from {1, 0.1, 0.01}."""

    probabilities: np.ndarray
    seed: int

    def __post_init__(self):
        p = np.ascontiguousarray(self.probabilities, dtype=np.float64)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)


def assign_trivalency(g: DirectedGraph, seed: int = 0) -> TrivalencyAssignment:
    """Seeded trivalency draw, one probability per canonical edge."""
    m = g.edge_count
    cls = (uniform(seed, np.arange(m), _TRIV_SALT) * 3).astype(np.int64)
    probs = np.asarray(TRIVALENCY_LEVELS)[np.minimum(cls, 2)]
    return TrivalencyAssignment(probs, int(seed))


@dataclass(frozen=True)
class IcmResult:
    mean_activated: float
    per_run: np.ndarray


def _icm_active_matrix(g: DirectedGraph, seed_sets: np.ndarray,
                       probs: np.ndarray, keep: np.ndarray,
                       master_seed: int,
                       run_indices: np.ndarray | None = None) -> np.ndarray:
    """Activation matrix (runs x n) for a block of coupled cascade runs.

    Coin flips are addressed by (master_seed, global run index, canonical
    edge id); the keep mask only selects which flips can fire, so runs agree
    edge-for-edge across different removal sets, and batching cannot change
    any run's outcome.
    """
    runs = seed_sets.shape[0]
    n = g.node_count
    if run_indices is None:
        run_indices = np.arange(runs, dtype=np.uint64)
    active = np.zeros((runs, n), dtype=bool)
    rows = np.repeat(np.arange(runs), seed_sets.shape[1])
    active[rows, seed_sets.ravel()] = True
    kept_edges = np.nonzero(keep)[0]
    mk = kept_edges.size
    if mk == 0:
        return active
    ks = g.src[kept_edges]
    kd = g.dst[kept_edges]
    run_ids = np.repeat(run_indices.astype(np.uint64), mk)
    edge_ids = np.tile(kept_edges.astype(np.uint64), runs)
    u = uniform(master_seed, run_ids, edge_ids).reshape(runs, mk)
    success = u < probs[kept_edges][None, :]
    frontier = active.copy()
    while True:
        fire = frontier[:, kd] & success
        if not fire.any():
            break
        newly = np.zeros((runs, n), dtype=bool)
        rr, ee = np.nonzero(fire)
        newly[rr, ks[ee]] = True
        newly &= ~active
        if not newly.any():
            break
        active |= newly
        frontier = newly
    return active


def _run_blocks(runs: int, m: int):
    block = max(1, _ICM_BLOCK_CELLS // max(m, 1))
    start = 0
    while start < runs:
        stop = min(start + block, runs)
        yield start, stop
        start = stop


def icm_simulate(g: DirectedGraph, seeds, triv: TrivalencyAssignment,
                 removal: RemovalSet | None = None, runs: int = 1,
                 seed: int = 0) -> IcmResult:
    """Average activated-user count over independent cascade runs.

    Every newly activated user j gives each surviving follower link (i, j)
    one activation attempt with its trivalency probability; a link attempts
    at most once per run. Reproducible and removal-coupled through the
    counter-hash; run r is bitwise independent of how runs are batched.
    """
    if runs < 1:
        raise InputError("runs must be at least 1")
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if seeds.size == 0:
        raise InputError("seed set must be nonempty")
    if seeds.min() < 0 or seeds.max() >= g.node_count:
        raise InputError("seed id outside the graph's node range")
    if triv.probabilities.shape != (g.edge_count,):
        raise InputError("trivalency assignment does not match the graph")
    keep = np.ones(g.edge_count, dtype=bool)
    if removal is not None:
        if removal.graph is not g:
            raise InputError("removal set belongs to a different graph")
        keep[removal.edge_ids] = False
    per_run = np.zeros(runs, dtype=np.int64)
    for start, stop in _run_blocks(runs, g.edge_count):
        seed_sets = np.tile(seeds, (stop - start, 1))
        block_active = _icm_active_matrix(
            g, seed_sets, triv.probabilities, keep, master_seed=seed,
            run_indices=np.arange(start, stop, dtype=np.uint64))
        per_run[start:stop] = block_active.sum(axis=1)
    return IcmResult(float(per_run.mean()), per_run)


def icm_trace(g: DirectedGraph, seeds, triv: TrivalencyAssignment,
              seed: int = 0, run: int = 0) -> PropagationTrace:
    """Record one cascade run as a replayable frame trace.

    Frame t+1 lists the links whose source was newly active at frame t and
    whose coin flip succeeded on a not-yet-active follower; replaying the
    trace reactivates exactly the run's activated set.
    """
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if seeds.size == 0:
        raise InputError("seed set must be nonempty")
    if seeds.min() < 0 or seeds.max() >= g.node_count:
        raise InputError("seed id outside the graph's node range")
    if triv.probabilities.shape != (g.edge_count,):
        raise InputError("trivalency assignment does not match the graph")
    n = g.node_count
    m = g.edge_count
    u = uniform(seed, np.full(m, run, dtype=np.uint64), np.arange(m, dtype=np.uint64))
    success = u < triv.probabilities
    active = np.zeros(n, dtype=bool)
    active[seeds] = True
    frontier = active.copy()
    frames = []
    while True:
        fire = frontier[g.dst] & success
        if not fire.any():
            break
        cand = np.nonzero(fire & ~active[g.src])[0]
        if cand.size == 0:
            break
        frames.append(np.stack([g.src[cand], g.dst[cand]], axis=1))
        newly = np.zeros(n, dtype=bool)
        newly[g.src[cand]] = True
        active |= newly
        frontier = newly
    return PropagationTrace(tuple(frames), seeds)


@dataclass(frozen=True)
class FrameBound:
    """Per-frame record from the increment-bound verification."""

    frame: int
    increment: int
    c_value: float
    skipped: bool
    violated: bool


@dataclass(frozen=True)
class BoundReport:
    """Increment-bound check over a trace's frames."""

    frames: tuple
    constant: float
    s: int
    lam_max: float
    bound: float
    skipped_frames: int = field(init=False)
    violated_frames: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "skipped_frames",
                           sum(1 for f in self.frames if f.skipped))
        object.__setattr__(self, "violated_frames",
                           sum(1 for f in self.frames if f.violated))

    @property
    def ok(self) -> bool:
        return self.violated_frames == 0


def verify_increment_bound(g: DirectedGraph, trace: PropagationTrace,
                           s: int | None = None) -> BoundReport:
    """Check each frame's activation increment against C * sqrt(s) * lam_max.

    The constant C is the largest per-frame value ||1^T V||_2 *
    ||V^-1||_op * rank(S) over frames whose activation matrix is
    diagonalizable; non-diagonalizable frames are reported skipped, never
    failed. ``s`` defaults to the sparsity of the final replayed state.
    """
    n = g.node_count
    if n > 512:
        raise InputError(f"bound verifier needs the dense oracle; n={n} > 512")
    frame_edges = _validate_trace(g, trace)
    _, states = _replay_active(g, trace, frame_edges, None, keep_states=True)
    s_used = int(states[-1].sum()) if s is None else int(s)
    if s is not None and s < int(states[-1].sum()):
        raise InputError("s must be at least the replayed final sparsity")
    lam_max = dense_spectrum_oracle(g).leading_value
    ones = np.ones(n)
    per_frame = []
    c_values = []
    for t, ids in enumerate(frame_edges):
        a_t = np.zeros((n, n))
        if ids.size:
            a_t[g.src[ids], g.dst[ids]] = 1.0
        spec = dense_spectrum_oracle(a_t)
        inc = int((a_t @ states[t] > 0).sum())
        if not spec.diagonalizable:
            per_frame.append((t, inc, float("nan"), True))
            continue
        c_t = float(np.linalg.norm(ones @ spec.vectors) * spec.inverse_norm
                    * spec.rank_of_spectrum())
        c_values.append(c_t)
        per_frame.append((t, inc, c_t, False))
    constant = max(c_values) if c_values else 0.0
    bound = constant * np.sqrt(s_used) * lam_max
    frames = tuple(
        FrameBound(frame=t + 1, increment=inc, c_value=c_t, skipped=skipped,
                   violated=(not skipped) and inc > bound + 1e-9)
        for t, inc, c_t, skipped in per_frame)
    return BoundReport(frames=frames, constant=float(constant), s=s_used,
                       lam_max=float(lam_max), bound=float(bound))
