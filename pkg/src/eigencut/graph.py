"""Directed follower graphs, network-of-networks edge classification, and
masked edge views.

Conventions
-----------
An edge ``(i, j)`` means *user i follows user j*; events travel against the
follow direction, from ``j`` to its followers. Edges are stored once in a
canonical order sorted by ``(i, j)``, and every derived structure (views,
scores, removal sets) is aligned to that order, so results are independent of
input ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "BuildReport",
    "DirectedGraph",
    "EdgeView",
    "NoNPartition",
    "RemovalSet",
    "build_graph",
    "classify_edges",
    "in_degrees",
    "out_degrees",
    "remove_edges",
]


@dataclass(frozen=True)
class BuildReport:
    """What build_graph dropped on the way to a simple directed graph."""

    input_pairs: int
    kept: int
    dropped_self_loops: int
    dropped_duplicates: int


class DirectedGraph:
    """Immutable simple directed graph over dense integer node ids.

    Parameters
    ----------
    node_count : int
        Number of nodes; ids are ``0 .. node_count-1``.
    src, dst : ndarray
        Canonical edge arrays (follower, followee), sorted by ``(src, dst)``,
        deduplicated, self-loop free. Use :func:`build_graph` to construct
        from raw pairs.
    """

    __slots__ = ("node_count", "src", "dst", "build_report",
                 "_fwd_indptr", "_rev_indptr", "_rev_edge_ids", "_edge_keys")

    def __init__(self, node_count: int, src: np.ndarray, dst: np.ndarray,
                 build_report: BuildReport | None = None):
        self.node_count = int(node_count)
        self.src = np.ascontiguousarray(src, dtype=np.int64)
        self.dst = np.ascontiguousarray(dst, dtype=np.int64)
        self.build_report = build_report
        n = self.node_count
        # src is sorted, so forward CSR is a searchsorted; reverse needs a permutation
        self._fwd_indptr = np.searchsorted(self.src, np.arange(n + 1))
        rev_order = np.lexsort((self.src, self.dst))
        self._rev_edge_ids = rev_order.astype(np.int64)
        self._rev_indptr = np.searchsorted(self.dst[rev_order], np.arange(n + 1))
        self._edge_keys = self.src * n + self.dst
        self.src.setflags(write=False)
        self.dst.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return self.src.shape[0]

    def edge_id(self, i: int, j: int) -> int:
        """Canonical index of edge (i, j), or -1 if absent."""
        key = i * self.node_count + j
        pos = np.searchsorted(self._edge_keys, key)
        if pos < self.edge_count and self._edge_keys[pos] == key:
            return int(pos)
        return -1

    def edge_ids(self, pairs) -> np.ndarray:
        """Canonical indices for an array of (i, j) pairs; -1 where absent."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        keys = pairs[:, 0] * self.node_count + pairs[:, 1]
        pos = np.searchsorted(self._edge_keys, keys)
        pos = np.minimum(pos, max(self.edge_count - 1, 0))
        if self.edge_count == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        ok = self._edge_keys[pos] == keys
        return np.where(ok, pos, -1).astype(np.int64)

    def followees(self, i: int) -> np.ndarray:
        """Nodes that user i follows (forward traversal)."""
        lo, hi = self._fwd_indptr[i], self._fwd_indptr[i + 1]
        return self.dst[lo:hi]

    def followers(self, j: int) -> np.ndarray:
        """Nodes that follow user j (reverse traversal)."""
        lo, hi = self._rev_indptr[j], self._rev_indptr[j + 1]
        return self.src[self._rev_edge_ids[lo:hi]]

    def in_edge_ids(self, j: int) -> np.ndarray:
        """Canonical edge ids of j's follower links, grouped by followee."""
        lo, hi = self._rev_indptr[j], self._rev_indptr[j + 1]
        return self._rev_edge_ids[lo:hi]

    def full_view(self) -> "EdgeView":
        return EdgeView(self, np.ones(self.edge_count, dtype=bool))

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.node_count}, m={self.edge_count})"


def build_graph(edge_pairs, node_count: int) -> DirectedGraph:
    """Build a DirectedGraph from raw (follower, followee) pairs.

    Duplicates and self-loops are dropped silently (counted in the attached
    :class:`BuildReport`); out-of-range ids raise :class:`InputError` naming
    the offending pair.
    """
    pairs = np.asarray(list(edge_pairs) if not isinstance(edge_pairs, np.ndarray)
                       else edge_pairs, dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InputError("edge pairs must be (follower, followee) 2-tuples")
    n = int(node_count)
    if n < 0:
        raise InputError("node_count must be nonnegative")
    bad = (pairs < 0) | (pairs >= n)
    if bad.any():
        row = int(np.nonzero(bad.any(axis=1))[0][0])
        i, j = pairs[row]
        raise InputError(
            f"edge pair #{row} ({i}, {j}) has node id outside [0, {n})")
    total = pairs.shape[0]
    loops = pairs[:, 0] == pairs[:, 1]
    n_loops = int(loops.sum())
    pairs = pairs[~loops]
    keys = pairs[:, 0] * n + pairs[:, 1]
    uniq = np.unique(keys)
    n_dup = pairs.shape[0] - uniq.shape[0]
    report = BuildReport(input_pairs=total, kept=uniq.shape[0],
                         dropped_self_loops=n_loops, dropped_duplicates=n_dup)
    return DirectedGraph(n, uniq // n if n else uniq, uniq % n if n else uniq,
                         build_report=report)


class NoNPartition:
    """Assignment of every node to one sub-network label.

    Accepts a mapping ``{node_id: label}`` or a sequence of labels indexed by
    node id. Labels are opaque tokens (typically language strings).
    """

    __slots__ = ("labels", "codes", "networks")

    def __init__(self, labels):
        if isinstance(labels, dict):
            ids = sorted(labels)
            if ids != list(range(len(ids))):
                missing = sorted(set(range(len(ids))) - set(ids))[:5]
                raise InputError(f"partition labels must cover dense ids; "
                                 f"ids present: {len(ids)}, first gaps: {missing}")
            seq = [labels[i] for i in ids]
        else:
            seq = list(labels)
        self.labels = tuple(str(t) for t in seq)
        vocab = sorted(set(self.labels))
        index = {t: k for k, t in enumerate(vocab)}
        self.codes = np.fromiter((index[t] for t in self.labels),
                                 dtype=np.int64, count=len(self.labels))
        self.codes.setflags(write=False)
        self.networks = tuple(vocab)

    @property
    def network_count(self) -> int:
        return len(self.networks)

    def members(self, label: str) -> np.ndarray:
        """Node ids carrying the given label."""
        if label not in self.networks:
            raise InputError(f"unknown network label: {label!r}")
        return np.nonzero(self.codes == self.networks.index(label))[0]

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"NoNPartition(nodes={len(self.labels)}, networks={self.network_count})"


@dataclass(frozen=True)
class EdgeView:
    """Subset of a graph's edges as a bitmask over the canonical edge order.

    Masking instead of rebuilding keeps matrix-vector products and removal
    sweeps O(m) with no copies of the adjacency structure.
    """

    graph: DirectedGraph
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.ascontiguousarray(self.mask, dtype=bool)
        if m.shape != (self.graph.edge_count,):
            raise InputError("edge mask length must equal graph edge count")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def edge_count(self) -> int:
        return int(self.mask.sum())

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(src, dst) restricted to this view, canonical order."""
        return self.graph.src[self.mask], self.graph.dst[self.mask]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """A @ x over the view's edges: out[i] = sum over (i,j) of x[j]."""
        s, d = self.edge_arrays()
        return np.bincount(s, weights=np.asarray(x, dtype=np.float64)[d],
                           minlength=self.node_count)

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """A.T @ x over the view's edges: out[j] = sum over (i,j) of x[i]."""
        s, d = self.edge_arrays()
        return np.bincount(d, weights=np.asarray(x, dtype=np.float64)[s],
                           minlength=self.node_count)

    def in_degrees(self) -> np.ndarray:
        s, d = self.edge_arrays()
        return np.bincount(d, minlength=self.node_count)

    def out_degrees(self) -> np.ndarray:
        s, d = self.edge_arrays()
        return np.bincount(s, minlength=self.node_count)

    def contains_edge(self, i: int, j: int) -> bool:
        e = self.graph.edge_id(i, j)
        return e >= 0 and bool(self.mask[e])

    def to_dense(self) -> np.ndarray:
        """Materialize the masked adjacency as a dense float array."""
        a = np.zeros((self.node_count, self.node_count))
        s, d = self.edge_arrays()
        a[s, d] = 1.0
        return a

    def is_acyclic(self) -> bool:
        """Kahn peel in vectorized rounds; an acyclic view has zero spectral
        radius. Cyclic views exit as soon as a peel round removes nothing."""
        n = self.node_count
        s, d = self.edge_arrays()
        indeg = np.bincount(d, minlength=n)
        alive = np.ones(s.shape[0], dtype=bool)
        peeled = np.zeros(n, dtype=bool)
        frontier = indeg == 0
        remaining = n
        while frontier.any():
            remaining -= int(frontier.sum())
            peeled |= frontier
            cut = alive & frontier[s]
            if cut.any():
                indeg = indeg - np.bincount(d[cut], minlength=n)
                alive &= ~cut
            frontier = (indeg == 0) & ~peeled
        return remaining == 0


class RemovalSet:
    """Ordered set of scored directed links selected for deletion."""

    __slots__ = ("graph", "edge_ids", "scores")

    def __init__(self, graph: DirectedGraph, edge_ids: np.ndarray,
                 scores: np.ndarray | None = None):
        ids = np.ascontiguousarray(edge_ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= graph.edge_count):
            raise InputError("removal edge id outside the graph's edge range")
        if len(np.unique(ids)) != len(ids):
            raise InputError("removal set contains repeated edges")
        self.graph = graph
        self.edge_ids = ids
        self.scores = (np.zeros(len(ids)) if scores is None
                       else np.ascontiguousarray(scores, dtype=np.float64))
        self.edge_ids.setflags(write=False)
        self.scores.setflags(write=False)

    @classmethod
    def from_pairs(cls, graph: DirectedGraph, pairs,
                   scores=None) -> "RemovalSet":
        ids = graph.edge_ids(pairs)
        if (ids < 0).any():
            k = int(np.nonzero(ids < 0)[0][0])
            i, j = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)[k]
            raise InputError(f"({i}, {j}) is not an edge of the graph")
        return cls(graph, ids, scores)

    def __len__(self) -> int:
        return len(self.edge_ids)

    def triples(self) -> list[tuple[int, int, float]]:
        """(follower, followee, score) in selection order."""
        s, d = self.graph.src, self.graph.dst
        return [(int(s[e]), int(d[e]), float(v))
                for e, v in zip(self.edge_ids, self.scores)]

    def prefix(self, q: int) -> "RemovalSet":
        """First q entries; sweeps remove growing prefixes of one ranking."""
        if q < 0 or q > len(self):
            raise InputError(f"prefix length {q} outside [0, {len(self)}]")
        return RemovalSet(self.graph, self.edge_ids[:q], self.scores[:q])

    def member_mask(self) -> np.ndarray:
        mask = np.zeros(self.graph.edge_count, dtype=bool)
        mask[self.edge_ids] = True
        return mask

    def __repr__(self) -> str:
        return f"RemovalSet(q={len(self)})"


def classify_edges(g: DirectedGraph, p: NoNPartition) -> tuple[EdgeView, EdgeView]:
    """Split edges into (between, within) views under a NoN partition."""
    if len(p) != g.node_count:
        present = len(p)
        raise InputError(
            f"partition labels {present} nodes but graph has {g.node_count}; "
            f"missing ids start at {min(present, g.node_count)}")
    same = p.codes[g.src] == p.codes[g.dst]
    return EdgeView(g, ~same), EdgeView(g, same)


def remove_edges(target: DirectedGraph | EdgeView, r: RemovalSet) -> EdgeView:
    """View of the target with the removal set's edges deleted.

    The underlying graph is never mutated. Removing an edge that is not
    present in the target raises :class:`InputError` identifying it.
    """
    view = target.full_view() if isinstance(target, DirectedGraph) else target
    if r.graph is not view.graph:
        raise InputError("removal set belongs to a different graph")
    missing = ~view.mask[r.edge_ids]
    if missing.any():
        e = int(r.edge_ids[np.nonzero(missing)[0][0]])
        i, j = view.graph.src[e], view.graph.dst[e]
        raise InputError(f"edge ({i}, {j}) is not present in the view")
    mask = view.mask.copy()
    mask[r.edge_ids] = False
    return EdgeView(view.graph, mask)


def in_degrees(view: EdgeView | DirectedGraph) -> np.ndarray:
    """Follower counts per node over the view's edges."""
    if isinstance(view, DirectedGraph):
        view = view.full_view()
    return view.in_degrees()


def out_degrees(view: EdgeView | DirectedGraph) -> np.ndarray:
    """Followee counts per node over the view's edges."""
    if isinstance(view, DirectedGraph):
        view = view.full_view()
    return view.out_degrees()
