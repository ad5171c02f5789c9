import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oraclegeom import _kernels_py, kernels
from oraclegeom.lp import objective_rows

compiled = pytest.importorskip("oraclegeom._kernels")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_seidel_backends_agree(seed, d):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 40))
    A = rng.normal(size=(m, d))
    b = rng.normal(size=m)
    R = objective_rows(d)
    a = _kernels_py.seidel_lp(A, b, R, 1e6, 1e-9)
    c = compiled.seidel_lp(A, b, R, 1e6, 1e-9)
    assert a[0] == c[0] and a[2] == c[2]
    if a[0] == 1:
        assert 0 <= a[2] < m
    if a[0] == 0:
        assert np.allclose(a[1], c[1], atol=1e-7)


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_tukey_backends_agree(seed, d):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(int(rng.integers(1, 60)), d))
    c = rng.normal(size=d) * 0.5
    assert _kernels_py.tukey_depth(P, c, 1e-9) == compiled.tukey_depth(P, c, 1e-9)


def test_tukey_depth_examples():
    a = np.linspace(0, 2 * np.pi, 5, endpoint=False)
    P = np.column_stack([np.cos(a), np.sin(a)])
    for k in (_kernels_py, compiled):
        assert k.tukey_depth(P, np.zeros(2), 1e-9) == 2
        assert k.tukey_depth(P, np.array([5.0, 5.0]), 1e-9) == 0


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_disk_masks_backends_agree(seed):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(int(rng.integers(1, 100)), 2))
    C = rng.normal(size=(20, 2))
    r2 = rng.uniform(0, 2, 20)
    a = _kernels_py.disk_masks(P, C, r2, 1e-9)
    b = compiled.disk_masks(P, C, r2, 1e-9)
    assert np.array_equal(np.asarray(a), np.asarray(b))
