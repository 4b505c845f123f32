"""Dense full-spectrum oracle for small matrices.

Complex Schur decomposition by Householder Hessenberg reduction plus
Wilkinson-shifted QR with deflation, then eigenvectors by triangular
back-substitution. Used by tests and the propagation-bound verifier to get
quantities power iteration cannot provide: the full eigenvalue list, the
eigenvector matrix V of A = V S V^-1, and a conditioning-based
diagonalizability verdict. Inner loops are numba-compiled; the guard caps
matrices at 512 nodes since the work is cubic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InputError
from .graph import DirectedGraph, EdgeView

__all__ = ["DenseSpectrum", "dense_spectrum_oracle", "operator_norm"]

MAX_ORACLE_NODES = 512
DIAGONALIZABLE_COND_LIMIT = 1e10
RANK_MODULUS_FLOOR = 1e-10
_EPS = 2.220446049250313e-16


@njit(cache=True)
def _hessenberg(a):
    """In-place-style Householder reduction; returns (H, Q) with A = Q H Q^H."""
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        nx = 0.0
        for i in range(k + 1, n):
            nx += abs(h[i, k]) ** 2
        nx = np.sqrt(nx)
        if nx == 0.0:
            continue
        v = np.empty(n - k - 1, dtype=np.complex128)
        for i in range(n - k - 1):
            v[i] = h[k + 1 + i, k]
        x0 = v[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0j
        v[0] += phase * nx
        nv = 0.0
        for i in range(v.shape[0]):
            nv += abs(v[i]) ** 2
        nv = np.sqrt(nv)
        if nv == 0.0:
            continue
        for i in range(v.shape[0]):
            v[i] /= nv
        for j in range(k, n):
            acc = 0.0 + 0j
            for i in range(v.shape[0]):
                acc += np.conj(v[i]) * h[k + 1 + i, j]
            acc *= 2.0
            for i in range(v.shape[0]):
                h[k + 1 + i, j] -= acc * v[i]
        for i in range(n):
            acc = 0.0 + 0j
            for j in range(v.shape[0]):
                acc += h[i, k + 1 + j] * v[j]
            acc *= 2.0
            for j in range(v.shape[0]):
                h[i, k + 1 + j] -= acc * np.conj(v[j])
        for i in range(n):
            acc = 0.0 + 0j
            for j in range(v.shape[0]):
                acc += q[i, k + 1 + j] * v[j]
            acc *= 2.0
            for j in range(v.shape[0]):
                q[i, k + 1 + j] -= acc * np.conj(v[j])
        for i in range(k + 2, n):
            h[i, k] = 0.0
    return h, q


@njit(cache=True)
def _wilkinson_shift(t, hi):
    """Trailing 2x2 eigenvalue closest to the corner entry."""
    a = t[hi - 2, hi - 2]
    b = t[hi - 2, hi - 1]
    c = t[hi - 1, hi - 2]
    d = t[hi - 1, hi - 1]
    tr = a + d
    disc = np.sqrt(tr * tr - 4.0 * (a * d - b * c))
    r1 = (tr + disc) / 2.0
    r2 = (tr - disc) / 2.0
    if abs(r1 - d) <= abs(r2 - d):
        return r1
    return r2


@njit(cache=True)
def _qr_iterate(t, z, max_stagnation):
    """Shifted QR with deflation on Hessenberg t, accumulating z in place.

    Returns 0 on success, 1 if some eigenvalue refused to deflate within
    max_stagnation sweeps (never observed on real inputs; guarded anyway).
    """
    n = t.shape[0]
    hi = n
    stagnation = 0
    while hi > 1:
        for k in range(hi - 1, 0, -1):
            if abs(t[k, k - 1]) <= _EPS * (abs(t[k - 1, k - 1]) + abs(t[k, k])):
                t[k, k - 1] = 0.0
        if t[hi - 1, hi - 2] == 0.0:
            hi -= 1
            stagnation = 0
            continue
        lo = hi - 1
        while lo > 0 and t[lo, lo - 1] != 0.0:
            lo -= 1
        stagnation += 1
        if stagnation > max_stagnation:
            return 1
        if stagnation % 14 == 0:
            # exceptional shift to kick rare symmetric cycling
            mu = t[hi - 1, hi - 1] + 0.9 * abs(t[hi - 1, hi - 2])
        else:
            mu = _wilkinson_shift(t, hi)
        for k in range(lo, hi):
            t[k, k] -= mu
        cs = np.empty(hi - lo - 1)
        sn = np.empty(hi - lo - 1, dtype=np.complex128)
        for k in range(lo, hi - 1):
            x = t[k, k]
            y = t[k + 1, k]
            r = np.hypot(abs(x), abs(y))
            if r == 0.0:
                c = 1.0
                s = 0.0 + 0j
            else:
                c = abs(x) / r
                ph = x / abs(x) if x != 0 else 1.0 + 0j
                s = ph * np.conj(y) / r
            cs[k - lo] = c
            sn[k - lo] = s
            cc = c + 0j
            for j in range(k, n):
                t1 = t[k, j]
                t2 = t[k + 1, j]
                t[k, j] = cc * t1 + s * t2
                t[k + 1, j] = -np.conj(s) * t1 + cc * t2
        for k in range(lo, hi - 1):
            c = cs[k - lo] + 0j
            s = sn[k - lo]
            top = k + 2 if k + 2 < hi else hi
            for i in range(top):
                t1 = t[i, k]
                t2 = t[i, k + 1]
                t[i, k] = c * t1 + np.conj(s) * t2
                t[i, k + 1] = -s * t1 + c * t2
            for i in range(n):
                z1 = z[i, k]
                z2 = z[i, k + 1]
                z[i, k] = c * z1 + np.conj(s) * z2
                z[i, k + 1] = -s * z1 + c * z2
        for k in range(lo, hi):
            t[k, k] += mu
    return 0


@njit(cache=True)
def _eigvecs_upper(t):
    """Unit-norm eigenvectors of upper-triangular t (upper-triangular matrix)."""
    n = t.shape[0]
    vt = np.zeros((n, n), dtype=np.complex128)
    tnorm = 1.0
    for i in range(n):
        for j in range(i, n):
            if abs(t[i, j]) > tnorm:
                tnorm = abs(t[i, j])
    for i in range(n):
        vt[i, i] = 1.0
        lam = t[i, i]
        for k in range(i - 1, -1, -1):
            acc = t[k, i] + 0j
            for j in range(k + 1, i):
                acc += t[k, j] * vt[j, i]
            denom = lam - t[k, k]
            if abs(denom) < _EPS * tnorm:
                # clustered eigenvalue; perturb as inverse iteration would
                denom = _EPS * tnorm + 0j
            vt[k, i] = acc / denom
        nv = 0.0
        for k in range(i + 1):
            nv += abs(vt[k, i]) ** 2
        nv = np.sqrt(nv)
        for k in range(i + 1):
            vt[k, i] /= nv
    return vt


@njit(cache=True)
def _upper_tri_inverse(u):
    """Back-substitution inverse of an upper-triangular matrix."""
    n = u.shape[0]
    x = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        d = u[i, i]
        if abs(d) < _EPS:
            d = _EPS + 0j
        x[i, i] = 1.0 / d
        for j in range(i + 1, n):
            acc = 0.0 + 0j
            for k in range(i + 1, j + 1):
                acc += u[i, k] * x[k, j]
            x[i, j] = -acc / d
    return x


def _left_eigvec_upper(t: np.ndarray, i: int) -> np.ndarray:
    """Left eigenvector of upper-triangular t for the eigenvalue at (i, i).

    Forward substitution touching only the trailing block, so the result is
    as accurate as the eigenvalue is separated, independent of how badly
    conditioned the full eigenvector basis is.
    """
    n = t.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    w[i] = 1.0
    lam = t[i, i]
    tnorm = max(float(np.max(np.abs(t))) if n else 0.0, 1.0)
    for j in range(i + 1, n):
        denom = lam - t[j, j]
        if abs(denom) < _EPS * tnorm:
            denom = _EPS * tnorm
        w[j] = (w[i:j] @ t[i:j, j]) / denom
    return w / np.linalg.norm(w)


def _schur(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return a.copy(), np.eye(0, dtype=np.complex128)
    t, z = _hessenberg(a)
    status = _qr_iterate(t, z, 120)
    if status != 0:
        raise RuntimeError("shifted QR iteration failed to converge")
    return t, z


def operator_norm(apply_fn, apply_adjoint_fn, n: int, iters: int = 200,
                  tol: float = 1e-12) -> float:
    """Largest singular value by power iteration on the Gram operator."""
    if n == 0:
        return 0.0
    x = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    sigma = 0.0
    for _ in range(iters):
        w = apply_fn(x)
        y = apply_adjoint_fn(w)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new_sigma = float(np.sqrt(ny))
        x = y / ny
        if abs(new_sigma - sigma) <= tol * max(new_sigma, 1.0):
            return new_sigma
        sigma = new_sigma
    return sigma


@dataclass(frozen=True)
class DenseSpectrum:
    """Full spectrum of a small dense adjacency.

    ``vectors`` holds right eigenvectors as columns (A = V S V^-1 when
    diagonalizable); ``inverse_vectors`` is V^-1, whose rows are left
    eigenvectors. ``diagonalizable`` is False when the eigenvector-matrix
    condition estimate exceeds 1e10, in which case V-derived quantities are
    unreliable and flagged callers skip them.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    inverse_vectors: np.ndarray
    leading_index: int
    leading_value: float
    leading_right: np.ndarray
    leading_left: np.ndarray
    vectors_norm: float
    inverse_norm: float
    vector_condition: float
    diagonalizable: bool

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    def rank_of_spectrum(self) -> int:
        """Count of eigenvalue moduli above 1e-10 of the largest."""
        mods = self.moduli
        peak = mods.max() if mods.size else 0.0
        if peak == 0.0:
            return 0
        return int((mods > RANK_MODULUS_FLOOR * peak).sum())


def _nonneg_real_unit(v: np.ndarray) -> np.ndarray:
    """Rotate a (near-)real eigenvector to the nonnegative real axis."""
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k]) if v[k] != 0 else 1.0
    w = np.real(v / phase)
    if w.sum() < 0:
        w = -w
    w = np.where(np.abs(w) < 1e-14, 0.0, w)
    nrm = np.linalg.norm(w)
    return np.abs(w) / nrm if nrm else np.abs(w)


def dense_spectrum_oracle(view: EdgeView | DirectedGraph | np.ndarray) -> DenseSpectrum:
    """Full-spectrum eigendecomposition of a view's adjacency (n <= 512)."""
    if isinstance(view, DirectedGraph):
        a = view.full_view().to_dense()
    elif isinstance(view, EdgeView):
        a = view.to_dense()
    else:
        a = np.asarray(view, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("oracle input must be a square matrix or a view")
    n = a.shape[0]
    if n > MAX_ORACLE_NODES:
        raise InputError(
            f"dense oracle refuses n={n} > {MAX_ORACLE_NODES} nodes; "
            f"use power iteration for large views")
    t, z = _schur(a)
    lam = np.diag(t).copy()
    vt = _eigvecs_upper(t)
    v = z @ vt
    vinv = _upper_tri_inverse(vt) @ z.conj().T
    norm_v = operator_norm(lambda x: v @ x, lambda x: v.conj().T @ x, n)
    norm_vinv = operator_norm(lambda x: vinv @ x, lambda x: vinv.conj().T @ x, n)
    cond = norm_v * norm_vinv if n else 0.0
    if n == 0:
        return DenseSpectrum(lam, v, vinv, -1, 0.0, np.zeros(0), np.zeros(0),
                             0.0, 0.0, 0.0, True)
    # Perron root: among max-modulus eigenvalues the one with the largest
    # real part (ties broken to the most-real candidate); nonneg matrices
    # always carry their spectral radius as a real eigenvalue
    mods = np.abs(lam)
    peak = mods.max()
    if peak == 0.0:
        lead = 0
    else:
        near = np.nonzero(mods >= peak * (1.0 - 1e-9))[0]
        order = np.lexsort((np.abs(lam[near].imag), -lam[near].real))
        lead = int(near[order[0]])
    leading_value = float(max(lam[lead].real, 0.0))
    # leading left eigenvector directly from the Schur factor: the V^-1 row
    # degrades with the conditioning of the whole basis, this does not
    left = z.conj() @ _left_eigvec_upper(t, lead)
    return DenseSpectrum(
        eigenvalues=lam,
        vectors=v,
        inverse_vectors=vinv,
        leading_index=lead,
        leading_value=leading_value,
        leading_right=_nonneg_real_unit(v[:, lead]),
        leading_left=_nonneg_real_unit(left),
        vectors_norm=float(norm_v),
        inverse_norm=float(norm_vinv),
        vector_condition=float(cond),
        diagonalizable=bool(cond < DIAGONALIZABLE_COND_LIMIT),
    )
