"""Seeded two-group random follower graphs for the synthetic experiments.

Each ordered node pair (i, j), i != j, independently becomes a follow edge
with probability indexed by (follower group, followee group). Trials are
counter-hashed per pair, so the generated edge list is a pure function of
(parameters, seed) regardless of iteration or thread order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counterhash import uniform
from .errors import InputError
from .graph import DirectedGraph, NoNPartition

__all__ = ["TwoGroupParams", "dataset1_preset", "dataset2_preset",
           "generate_two_group", "sample_seeds"]

GROUP_LABELS = ("g1", "g2")
_PAIR_SALT_BASE = 0x5347  # address space for pair trials per edge


@dataclass(frozen=True)
class TwoGroupParams:
    """Generation parameters; p_xy is P(group-x member follows group-y member)."""

    n1: int
    n2: int
    p11: float
    p12: float
    p21: float
    p22: float
    n_ini: int
    seed: int = 0

    def __post_init__(self):
        for name in ("p11", "p12", "p21", "p22"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InputError(f"{name}={p} outside [0, 1]")
        if self.n1 < 0 or self.n2 < 0:
            raise InputError("group sizes must be nonnegative")
        if self.n_ini > self.n1:
            raise InputError("n_ini cannot exceed the size of group 1")


def dataset1_preset(seed: int = 0) -> TwoGroupParams:
    """Two-group setup where between-network links gate all group-2 spread."""
    return TwoGroupParams(n1=100, n2=100, p11=0.01, p12=0.0, p21=0.005,
                          p22=0.01, n_ini=5, seed=seed)


def dataset2_preset(seed: int = 0) -> TwoGroupParams:
    """Two-group setup where propagation stays inside group 1."""
    return TwoGroupParams(n1=100, n2=100, p11=0.01, p12=0.01, p21=0.0,
                          p22=0.005, n_ini=5, seed=seed)


def generate_two_group(params: TwoGroupParams) -> tuple[DirectedGraph, NoNPartition]:
    """One seeded draw of the two-group model, with its group partition."""
    n = params.n1 + params.n2
    group = (np.arange(n) >= params.n1).astype(np.int64)
    prob = np.array([[params.p11, params.p12],
                     [params.p21, params.p22]])
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pair_prob = prob[group[ii], group[jj]]
    draws = uniform(params.seed, ii.ravel() * np.int64(n) + jj.ravel(),
                    _PAIR_SALT_BASE).reshape(n, n)
    adj = (draws < pair_prob) & (ii != jj)
    src, dst = np.nonzero(adj)
    graph = DirectedGraph(n, src.astype(np.int64), dst.astype(np.int64))
    labels = [GROUP_LABELS[g] for g in group]
    return graph, NoNPartition(labels)


def sample_seeds(partition: NoNPartition, n_ini: int, seed: int) -> np.ndarray:
    """Uniform draw of n_ini distinct group-1 nodes."""
    pool = partition.members(GROUP_LABELS[0])
    if n_ini > pool.size:
        raise InputError(f"n_ini={n_ini} exceeds group-1 size {pool.size}")
    if n_ini < 0:
        raise InputError("n_ini must be nonnegative")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(pool, size=n_ini, replace=False))
