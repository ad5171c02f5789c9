"""Independent brute-force references and planted data shared by the unit and acceptance tests."""
import itertools

import numpy as np
from scipy.optimize import linprog

from oraclegeom.geom import CommittedHalfspace, Hyperplane


def random_lp(rng, m=None, d=None):
    """Random LP: ``m`` halfspaces in dimension ``d`` and an objective direction."""
    d = int(rng.integers(1, 5)) if d is None else d
    m = int(rng.integers(1, 13)) if m is None else m
    A = rng.normal(size=(m, d))
    anchor = rng.normal(size=d) * 2
    b = A @ anchor + rng.normal(size=m)
    sides = rng.choice([-1, 1], size=m)
    hs = [CommittedHalfspace(Hyperplane(a, o), int(s)) for a, o, s in zip(A, b, sides)]
    return hs, rng.normal(size=d), d


def brute_lp(hs, c, d, M):
    """Minimum of ``c.x`` over the halfspaces and the box ``[-M, M]^d`` by vertex enumeration.

    Returns ``None`` when the region is empty.
    """
    rows = [h.side * h.plane.normal for h in hs] + list(np.eye(d)) + list(-np.eye(d))
    rhs = [h.side * h.plane.offset for h in hs] + [-M] * (2 * d)
    A, b = np.array(rows), np.array(rhs)
    combos = np.array(list(itertools.combinations(range(len(A)), d)))
    S = A[combos]
    det = np.linalg.det(S)
    ok = np.abs(det) > 1e-12
    if not ok.any():
        return None
    X = np.linalg.solve(S[ok], b[combos[ok]][..., None])[..., 0]
    slack = X @ A.T - b
    scale = 1e-9 * np.maximum(1.0, np.abs(X).max(axis=1))
    feas = np.all(slack >= -scale[:, None], axis=1)
    if not feas.any():
        return None
    return float((X[feas] @ c).min())


def disk_family_brute(S):
    """Every subset of the sample cut out by some closed disk, via one small LP per subset."""
    m = len(S)
    out = set()
    for mask in range(2 ** m):
        sub = [i for i in range(m) if mask >> i & 1]
        if not sub:
            out.add(())
            continue
        A, b = [], []
        for i in range(m):
            n = np.array([S[i, 0], S[i, 1], 1.0])
            o = S[i] @ S[i]
            if i in sub:
                A.append(np.append(-n, 1.0))
                b.append(-o)
            else:
                A.append(np.append(n, 1.0))
                b.append(o)
        r = linprog([0, 0, 0, -1], A_ub=A, b_ub=b, bounds=[(-1e3, 1e3)] * 3 + [(None, 1)])
        if r.status == 0 and -r.fun > 1e-9:
            out.add(tuple(sub))
    return out


def planted_disk(n, seed, margin=0.01):
    """Points uniform in [-1, 1]^2: red (0) inside a hidden disk, blue (1) outside, none within ``margin`` of its rim."""
    rng = np.random.default_rng(seed)
    c, r = rng.uniform(-0.3, 0.3, 2), rng.uniform(0.3, 0.6)
    P = np.zeros((0, 2))
    while len(P) < n:
        Q = rng.uniform(-1, 1, size=(2 * n, 2))
        Q = Q[np.abs(np.linalg.norm(Q - c, axis=1) - r) > margin]
        P = np.vstack([P, Q])[:n]
    return P, np.where(np.linalg.norm(P - c, axis=1) < r, 0, 1)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[num] = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[num])
    return ok
