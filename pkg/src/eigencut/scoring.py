"""Follower-link score functions and removal-set selection.

All non-betweenness methods share the product form ``score(i, j) =
x[i] * x_tilde[j]`` for some pair of nonnegative node vectors; the methods
differ only in where the vectors come from (left/right eigenvectors or
in-degrees, of the full adjacency or of its between-/within-network views).
Scores are always evaluated on every edge of the full graph, even when the
vectors come from a sub-view.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InputError
from .graph import (DirectedGraph, EdgeView, NoNPartition, RemovalSet,
                    classify_edges)
from .spectral import (EigenResult, SpectralConfig, leading_left_eigenpair,
                       leading_right_eigenpair)

__all__ = ["LinkScores", "ScoreMethod", "auto_q", "edge_betweenness",
           "random_removal", "score_links", "top_q"]


class ScoreMethod(Enum):
    """The nine follower-link score functions (plus edge betweenness)."""

    LES = "LES"
    IN_DEG = "InDeg"
    NET_MELT = "NetMelt"
    EDGE_BETWEENNESS = "EdgeBetweenness"
    NON_LES_BET = "NoN-LES-Bet"
    NON_LES_WIT = "NoN-LES-Wit"
    NON_IN_DEG_BET = "NoN-InDeg-Bet"
    NON_IN_DEG_WIT = "NoN-InDeg-Wit"
    NON_NET_MELT_BET = "NoN-NetMelt-Bet"
    NON_NET_MELT_WIT = "NoN-NetMelt-Wit"

    @property
    def needs_partition(self) -> bool:
        return self.value.startswith("NoN-")

    @property
    def is_between(self) -> bool:
        return self.value.endswith("-Bet")

    @classmethod
    def parse(cls, token: str) -> "ScoreMethod":
        want = token.strip().lower()
        for method in cls:
            if method.value.lower() == want or method.name.lower() == want:
                return method
        raise InputError(f"unknown score method: {token!r} "
                         f"(choose from {', '.join(m.value for m in cls)})")


@dataclass(frozen=True)
class LinkScores:
    """Per-edge scores aligned to the graph's canonical edge order.

    ``x`` and ``x_tilde`` expose the constituent vectors for product-form
    methods (None for betweenness). ``flags`` carries quality markers
    inherited from flagged eigen results.
    """

    graph: DirectedGraph
    method: ScoreMethod
    values: np.ndarray
    x: np.ndarray | None = None
    x_tilde: np.ndarray | None = None
    flags: tuple = ()

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != (self.graph.edge_count,):
            raise InputError("scores must align with the canonical edge order")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def degraded(self) -> bool:
        return len(self.flags) > 0


def _eigen_flags(name: str, res: EigenResult) -> tuple:
    return (f"{name}:{res.flag}",) if res.flag else ()


def score_links(method: ScoreMethod | str, g: DirectedGraph,
                p: NoNPartition | None = None,
                spectral_cfg: SpectralConfig | None = None) -> LinkScores:
    """Score every follower link of the graph under the chosen method."""
    if isinstance(method, str):
        method = ScoreMethod.parse(method)
    cfg = spectral_cfg or SpectralConfig()
    if method is ScoreMethod.EDGE_BETWEENNESS:
        return edge_betweenness(g)
    if method.needs_partition:
        if p is None:
            raise InputError(f"{method.value} requires a NoN partition")
        between, within = classify_edges(g, p)
        view: EdgeView = between if method.is_between else within
    else:
        view = g.full_view()
    flags: tuple = ()
    if method in (ScoreMethod.LES, ScoreMethod.NON_LES_BET,
                  ScoreMethod.NON_LES_WIT):
        left = leading_left_eigenpair(view, cfg.tol, cfg.max_iter, cfg.seed)
        flags += _eigen_flags("left", left)
        x = x_tilde = left.vector
    elif method in (ScoreMethod.IN_DEG, ScoreMethod.NON_IN_DEG_BET,
                    ScoreMethod.NON_IN_DEG_WIT):
        x = x_tilde = view.in_degrees().astype(np.float64)
    else:  # NetMelt family
        left = leading_left_eigenpair(view, cfg.tol, cfg.max_iter, cfg.seed)
        right = leading_right_eigenpair(view, cfg.tol, cfg.max_iter, cfg.seed)
        flags += _eigen_flags("left", left) + _eigen_flags("right", right)
        x, x_tilde = left.vector, right.vector
    values = x[g.src] * x_tilde[g.dst]
    return LinkScores(g, method, values, x=x, x_tilde=x_tilde, flags=flags)


def _reverse_adjacency(g: DirectedGraph):
    """Followed-by adjacency (A^T) as per-node neighbor/edge-id lists."""
    nbrs = []
    eids = []
    for u in range(g.node_count):
        ids = g.in_edge_ids(u)
        nbrs.append(g.src[ids].tolist())
        eids.append(ids.tolist())
    return nbrs, eids


def edge_betweenness(g: DirectedGraph) -> LinkScores:
    """Shortest-path edge betweenness on the followed-by network A^T.

    BFS-based dependency accumulation from every source (unit edge lengths);
    a follower link (i, j) is scored by the betweenness of the followed-by
    arc j -> i. Disconnected pairs contribute nothing.
    """
    n = g.node_count
    scores = np.zeros(g.edge_count)
    nbrs, eids = _reverse_adjacency(g)
    for source in range(n):
        if not nbrs[source]:
            continue
        dist = [-1] * n
        sigma = [0.0] * n
        preds: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        dist[source] = 0
        sigma[source] = 1.0
        queue = [source]
        order = []
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            order.append(v)
            dv = dist[v]
            sv = sigma[v]
            for w, eid in zip(nbrs[v], eids[v]):
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sv
                    preds[w].append((v, eid))
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v, eid in preds[w]:
                contribution = sigma[v] * coeff
                scores[eid] += contribution
                delta[v] += contribution
    return LinkScores(g, ScoreMethod.EDGE_BETWEENNESS, scores)


def ranking_order(scores: LinkScores) -> np.ndarray:
    """Edge ids sorted by score descending, ties by (follower, followee)."""
    g = scores.graph
    return np.lexsort((g.dst, g.src, -scores.values))


def top_q(scores: LinkScores, q: int) -> RemovalSet:
    """The q highest-scored links; deterministic lexicographic tie-break."""
    m = scores.graph.edge_count
    if q < 0 or q > m:
        raise InputError(f"q={q} outside [0, m={m}]")
    order = ranking_order(scores)[:q]
    return RemovalSet(scores.graph, order, scores.values[order])


def auto_q(scores: LinkScores) -> int:
    """Removal-set size maximizing (sum of top-q scores) / q.

    The ratio is the mean of the top q scores, which never increases with q,
    so the maximizer is the largest q whose scores all tie with the top
    score (the whole leading tie class).
    """
    m = scores.graph.edge_count
    if m == 0:
        return 0
    ranked = scores.values[ranking_order(scores)]
    ratios = np.cumsum(ranked) / np.arange(1, m + 1)
    best = ratios.max()
    return int(np.nonzero(ratios >= best * (1 - 1e-15))[0][-1] + 1)


def random_removal(g: DirectedGraph, q: int, seed: int) -> RemovalSet:
    """Uniform sample of q distinct links, reproducible from the seed."""
    m = g.edge_count
    if q < 0 or q > m:
        raise InputError(f"q={q} outside [0, m={m}]")
    rng = np.random.default_rng(seed)
    ids = rng.choice(m, size=q, replace=False) if q else np.zeros(0, np.int64)
    return RemovalSet(g, ids.astype(np.int64))
