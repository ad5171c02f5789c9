# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels (Seidel LP, halfspace depth, disk masks).

Semantics match ``_kernels_py`` exactly; see that module for the contracts.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc
from libc.stdint cimport uint64_t

cnp.import_array()

cdef double TINY = 1e-12
cdef double REL = 1e-6


cdef int _lp1(int m, double* A, double* b, int nr, double* R, double M,
              double tol, double* x, int* culprit) noexcept nogil:
    cdef double lo = -M, hi = M, a, scale
    cdef int i, r
    for i in range(m):
        a = A[i]
        if a > TINY:
            if b[i] / a < hi:
                hi = b[i] / a
        elif a < -TINY:
            if b[i] / a > lo:
                lo = b[i] / a
        elif b[i] < -tol:
            culprit[0] = i
            return 1
        scale = 1.0
        if REL * fabs(lo) > scale:
            scale = REL * fabs(lo)
        if REL * fabs(hi) > scale:
            scale = REL * fabs(hi)
        if lo > hi + tol * scale:
            culprit[0] = i
            return 1
    culprit[0] = -1
    if lo > hi:
        x[0] = 0.5 * (lo + hi)
        return 0
    for r in range(nr):
        if R[r] > TINY:
            x[0] = lo
            return 0
        if R[r] < -TINY:
            x[0] = hi
            return 0
    x[0] = lo
    return 0


cdef int _seidel(int m, int k, double* A, double* b, int nr, double* R,
                 double M, double tol, double* x, int* culprit) noexcept nogil:
    cdef int i, l, p, r, t, j, st, dummy
    cdef double val, na, scale, inv, beta, c, best
    cdef double* a
    cdef double* g
    cdef double* A2
    cdef double* b2
    cdef double* R2
    cdef double* y
    cdef double* alpha
    cdef int k2 = k - 1, m2
    if k == 1:
        return _lp1(m, A, b, nr, R, M, tol, x, culprit)
    for l in range(k):
        x[l] = 2.0 * M  # sentinel for "unset"
    for r in range(nr):
        for l in range(k):
            if x[l] == 2.0 * M and fabs(R[r * k + l]) > TINY:
                x[l] = -M if R[r * k + l] > 0 else M
    for l in range(k):
        if x[l] == 2.0 * M:
            x[l] = -M
    for i in range(m):
        a = A + i * k
        val = 0.0
        na = 0.0
        scale = 1.0
        for l in range(k):
            val += a[l] * x[l]
            na += a[l] * a[l]
            if REL * fabs(x[l]) > scale:
                scale = REL * fabs(x[l])
        na = sqrt(na)
        if val <= b[i] + tol * na * scale:
            continue
        j = 0
        best = fabs(a[0])
        for l in range(1, k):
            if fabs(a[l]) > best:
                best = fabs(a[l])
                j = l
        if best <= TINY:
            culprit[0] = i
            return 1
        inv = 1.0 / a[j]
        beta = b[i] * inv
        m2 = i + 2
        A2 = <double*> malloc(m2 * k2 * sizeof(double))
        b2 = <double*> malloc(m2 * sizeof(double))
        R2 = <double*> malloc(nr * k2 * sizeof(double))
        y = <double*> malloc(k2 * sizeof(double))
        alpha = <double*> malloc(k2 * sizeof(double))
        t = 0
        for l in range(k):
            if l != j:
                alpha[t] = -a[l] * inv
                t += 1
        for p in range(i):
            g = A + p * k
            c = g[j]
            t = 0
            for l in range(k):
                if l != j:
                    A2[p * k2 + t] = g[l] + c * alpha[t]
                    t += 1
            b2[p] = b[p] - c * beta
        for t in range(k2):
            A2[i * k2 + t] = alpha[t]
            A2[(i + 1) * k2 + t] = -alpha[t]
        b2[i] = M - beta
        b2[i + 1] = M + beta
        for r in range(nr):
            t = 0
            for l in range(k):
                if l != j:
                    R2[r * k2 + t] = R[r * k + l] + R[r * k + j] * alpha[t]
                    t += 1
        st = _seidel(m2, k2, A2, b2, nr, R2, M, tol, y, &dummy)
        if st == 0:
            val = beta
            for t in range(k2):
                val += alpha[t] * y[t]
            t = 0
            for l in range(k):
                if l == j:
                    x[l] = val
                else:
                    x[l] = y[t]
                    t += 1
        free(A2)
        free(b2)
        free(R2)
        free(y)
        free(alpha)
        if st:
            culprit[0] = i
            return 1
    culprit[0] = -1
    return 0


def seidel_lp(A, b, R, double M, double tol):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Ac = np.ascontiguousarray(A, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] bc = np.ascontiguousarray(b, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Rc = np.ascontiguousarray(R, dtype=np.float64)
    cdef int m = Ac.shape[0]
    cdef int k = Rc.shape[1]
    cdef int nr = Rc.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] x = np.zeros(k, dtype=np.float64)
    cdef int culprit = -1
    cdef int st
    if m == 0:
        Ac = np.zeros((1, k), dtype=np.float64)
        bc = np.ones(1, dtype=np.float64)
        m = 1
    with nogil:
        st = _seidel(m, k, &Ac[0, 0], &bc[0], nr, &Rc[0, 0], M, tol, &x[0], &culprit)
    if st:
        return 1, None, culprit
    return 0, x, -1


def tukey_depth(P, c, double tol):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Pc = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = Pc.shape[0], d = Pc.shape[1]
    cdef cnp.ndarray[double, ndim=2, mode="c"] D = np.empty((n, d), dtype=np.float64)
    cdef int i, j, q, l, m = 0, base = 0, pos, neg, best
    cdef double nrm, s, u0, u1, u2
    for i in range(n):
        nrm = 0.0
        for l in range(d):
            s = Pc[i, l] - cc[l]
            D[m, l] = s
            nrm += s * s
        if sqrt(nrm) <= tol:
            base += 1
        else:
            m += 1
    if m == 0:
        return n
    best = m
    with nogil:
        if d == 1:
            pos = 0
            neg = 0
            for i in range(m):
                if D[i, 0] > 0:
                    pos += 1
                else:
                    neg += 1
            best = pos if pos < neg else neg
        elif d == 2:
            for i in range(m):
                u0 = -D[i, 1]
                u1 = D[i, 0]
                nrm = sqrt(u0 * u0 + u1 * u1)
                u0 /= nrm
                u1 /= nrm
                pos = 0
                neg = 0
                for q in range(m):
                    s = u0 * D[q, 0] + u1 * D[q, 1]
                    if s > tol:
                        pos += 1
                    elif s < -tol:
                        neg += 1
                if pos < best:
                    best = pos
                if neg < best:
                    best = neg
        else:
            for i in range(m):
                nrm = sqrt(D[i, 0] * D[i, 0] + D[i, 1] * D[i, 1] + D[i, 2] * D[i, 2])
                u0 = D[i, 0] / nrm
                u1 = D[i, 1] / nrm
                u2 = D[i, 2] / nrm
                pos = 0
                neg = 0
                for q in range(m):
                    s = u0 * D[q, 0] + u1 * D[q, 1] + u2 * D[q, 2]
                    if s > tol:
                        pos += 1
                    elif s < -tol:
                        neg += 1
                if pos < best:
                    best = pos
                if neg < best:
                    best = neg
            for i in range(m):
                for j in range(i + 1, m):
                    u0 = D[i, 1] * D[j, 2] - D[i, 2] * D[j, 1]
                    u1 = D[i, 2] * D[j, 0] - D[i, 0] * D[j, 2]
                    u2 = D[i, 0] * D[j, 1] - D[i, 1] * D[j, 0]
                    nrm = sqrt(u0 * u0 + u1 * u1 + u2 * u2)
                    if nrm <= tol:
                        continue
                    u0 /= nrm
                    u1 /= nrm
                    u2 /= nrm
                    pos = 0
                    neg = 0
                    for q in range(m):
                        s = u0 * D[q, 0] + u1 * D[q, 1] + u2 * D[q, 2]
                        if s > tol:
                            pos += 1
                        elif s < -tol:
                            neg += 1
                    if pos < best:
                        best = pos
                    if neg < best:
                        best = neg
    return base + best


def disk_masks(P, centers, r2, double tol):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Pc = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Cc = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] rc = np.ascontiguousarray(r2, dtype=np.float64)
    cdef int m = Pc.shape[0], K = Cc.shape[0]
    cdef int words = (m + 63) // 64
    out = np.zeros((K, words), dtype=np.uint64)
    if m == 0 or K == 0:
        return out
    cdef uint64_t[:, ::1] ov = out
    cdef int i, j
    cdef double dx, dy, lim
    with nogil:
        for i in range(K):
            lim = rc[i] + tol
            for j in range(m):
                dx = Pc[j, 0] - Cc[i, 0]
                dy = Pc[j, 1] - Cc[i, 1]
                if dx * dx + dy * dy <= lim:
                    ov[i, j >> 6] |= (<uint64_t> 1) << (j & 63)
    return out
