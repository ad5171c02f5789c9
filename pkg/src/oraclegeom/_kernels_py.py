"""Pure numpy fallback for the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``;
``oraclegeom.kernels`` picks one at import time.
"""
from __future__ import annotations

import math

import numpy as np

TINY = 1e-12
REL = 1e-6  # tolerance grows only for coordinates beyond 1/REL


def _lp1(A, b, R, M, tol):
    lo, hi = -M, M
    for i in range(len(b)):
        a = A[i][0]
        if a > TINY:
            hi = min(hi, b[i] / a)
        elif a < -TINY:
            lo = max(lo, b[i] / a)
        elif b[i] < -tol:
            return 1, None, i
        if lo > hi + tol * max(1.0, REL * abs(lo), REL * abs(hi)):
            return 1, None, i
    if lo > hi:
        return 0, [0.5 * (lo + hi)], -1
    for row in R:
        if row[0] > TINY:
            return 0, [lo], -1
        if row[0] < -TINY:
            return 0, [hi], -1
    return 0, [lo], -1


def _box_corner(R, k, M):
    x = [None] * k
    for row in R:
        for v in range(k):
            if x[v] is None and abs(row[v]) > TINY:
                x[v] = -M if row[v] > 0 else M
    return [-M if v is None else v for v in x]


def _seidel(A, b, R, M, tol):
    # A: list of rows (length k), b: list, R: list of objective rows
    k = len(R[0])
    if k == 1:
        return _lp1(A, b, R, M, tol)
    x = _box_corner(R, k, M)
    for i in range(len(b)):
        a = A[i]
        val = 0.0
        na = 0.0
        for l in range(k):
            val += a[l] * x[l]
            na += a[l] * a[l]
        na = math.sqrt(na)
        scale = max(1.0, REL * max(abs(v) for v in x))
        if val <= b[i] + tol * na * scale:
            continue
        j = max(range(k), key=lambda l: abs(a[l]))
        if abs(a[j]) <= TINY:
            return 1, None, i
        inv = 1.0 / a[j]
        alpha = [-a[l] * inv for l in range(k) if l != j]
        beta = b[i] * inv
        A2 = []
        b2 = []
        for p in range(i):
            g = A[p]
            c = g[j]
            row = []
            t = 0
            for l in range(k):
                if l == j:
                    continue
                row.append(g[l] + c * alpha[t])
                t += 1
            A2.append(row)
            b2.append(b[p] - c * beta)
        A2.append(alpha)
        b2.append(M - beta)
        A2.append([-v for v in alpha])
        b2.append(M + beta)
        R2 = []
        for r in R:
            row = []
            t = 0
            for l in range(k):
                if l == j:
                    continue
                row.append(r[l] + r[j] * alpha[t])
                t += 1
            R2.append(row)
        st, y, _ = _seidel(A2, b2, R2, M, tol)
        if st:
            return 1, None, i
        xj = beta + sum(alpha[t] * y[t] for t in range(k - 1))
        x = list(y[:j]) + [xj] + list(y[j:])
    return 0, x, -1


def seidel_lp(A, b, R, M, tol):
    """Lexicographic LP over {A x <= b} inside the box [-M, M]^k.

    Constraints are processed in the given row order.  Returns
    ``(status, x, culprit)``: status 0 optimal / 1 infeasible, culprit is the
    row whose insertion exposed infeasibility (-1 when optimal).
    """
    A = np.asarray(A, dtype=np.float64)
    st, x, culprit = _seidel(A.tolist(), np.asarray(b, dtype=np.float64).tolist(),
                             np.asarray(R, dtype=np.float64).tolist(), float(M), float(tol))
    if st:
        return 1, None, int(culprit)
    return 0, np.asarray(x, dtype=np.float64), -1


def tukey_depth(P, c, tol):
    """Halfspace depth of ``c`` in the rows of ``P`` (d = 1, 2, 3).

    Exact for point sets in general position with respect to ``c``: the depth
    is attained in a cell of the arrangement of great spheres orthogonal to
    ``p - c``; every cell touches a vertex, so it is enough to look at the
    directions orthogonal to d-1 of the points and push those points out.
    """
    P = np.asarray(P, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n, d = P.shape
    D = P - c
    norms = np.linalg.norm(D, axis=1)
    at_c = norms <= tol
    base = int(at_c.sum())
    D = D[~at_c]
    m = len(D)
    if m == 0:
        return n
    if d == 1:
        return base + int(min((D[:, 0] > 0).sum(), (D[:, 0] < 0).sum()))
    if d == 2:
        U = np.stack([-D[:, 1], D[:, 0]], axis=1)
        U /= np.linalg.norm(U, axis=1)[:, None]
        S = U @ D.T
        pos = (S > tol).sum(axis=1)
        neg = (S < -tol).sum(axis=1)
        return base + int(min(pos.min(), neg.min()))
    U0 = D / norms[~at_c][:, None]
    S0 = U0 @ D.T
    best = int(min((S0 > tol).sum(axis=1).min(), (S0 < -tol).sum(axis=1).min()))
    I, J = np.triu_indices(m, 1)
    chunk = max(1, 2_000_000 // max(m, 1))
    for s in range(0, len(I), chunk):
        U = np.cross(D[I[s:s + chunk]], D[J[s:s + chunk]])
        nu = np.linalg.norm(U, axis=1)
        keep = nu > tol
        if not keep.any():
            continue
        U = U[keep] / nu[keep][:, None]
        S = U @ D.T
        pos = (S > tol).sum(axis=1)
        neg = (S < -tol).sum(axis=1)
        best = min(best, int(pos.min()), int(neg.min()))
    return base + best


def disk_masks(P, centers, r2, tol):
    """Packed containment masks: bit j of row i set iff |P_j - c_i|^2 <= r2_i."""
    P = np.asarray(P, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    r2 = np.asarray(r2, dtype=np.float64)
    m = len(P)
    words = (m + 63) // 64
    out = np.zeros((len(centers), words), dtype=np.uint64)
    if m == 0 or len(centers) == 0:
        return out
    weights = np.left_shift(np.uint64(1), np.arange(64, dtype=np.uint64))
    chunk = max(1, 4_000_000 // m)
    for s in range(0, len(centers), chunk):
        C = centers[s:s + chunk]
        d2 = ((C[:, None, :] - P[None, :, :]) ** 2).sum(axis=2)
        inside = d2 <= (r2[s:s + chunk, None] + tol)
        for w in range(words):
            block = inside[:, 64 * w:64 * (w + 1)]
            out[s:s + chunk, w] = (block * weights[:block.shape[1]]).sum(axis=1, dtype=np.uint64)
    return out
