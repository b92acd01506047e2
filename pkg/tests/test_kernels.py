import numpy as np
import pytest

from umbilic import kernels
from umbilic.kernels import _numba as nk
from umbilic.surfaces import GraphSurface, WarpedGraphSurface
from umbilic.verify import shape_operator_chart
from umbilic.warp import WarpSpec

from conftest import built


def test_backend_env(monkeypatch):
    monkeypatch.setenv("UMBILIC_BACKEND", "numpy")
    assert kernels.active_backend() == "numpy"
    monkeypatch.setenv("UMBILIC_BACKEND", "numba")
    assert kernels.active_backend() == "numba"
    monkeypatch.delenv("UMBILIC_BACKEND")
    assert kernels.active_backend() == "numba"
    monkeypatch.setenv("UMBILIC_BACKEND", "fortran")
    with pytest.raises(ValueError):
        kernels.active_backend()
    assert set(kernels.available_backends()) == {"numpy", "numba"}


def test_thread_cap(monkeypatch):
    import numba

    monkeypatch.setenv("UMBILIC_THREADS", "1")
    kernels._apply_threads()
    assert numba.get_num_threads() == 1


def test_chart_kernels_agree():
    fam, prof, h = built("sphere_h", 3, 0.5)
    W = WarpedGraphSurface(GraphSurface(fam, prof), WarpSpec("exp-neg"), 1.0, 2.0)
    u = W.graph.param_grid(30)
    a = shape_operator_chart(W, u, backend="numpy")
    b = shape_operator_chart(W, u, backend="numba")
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)
    assert np.allclose(a.normal, b.normal, atol=1e-12)
    assert np.allclose(a.cond, b.cond, rtol=1e-8)


def test_null_vector_matches_svd(rng):
    for m in (3, 4, 5):
        A = rng.normal(size=(m - 1, m))
        v = nk._null_vector(A)
        assert np.allclose(A @ v, 0.0, atol=1e-12)
        w = np.linalg.svd(A)[2][-1]
        v = v / np.linalg.norm(v)
        assert min(np.linalg.norm(v - w), np.linalg.norm(v + w)) < 1e-12


def test_jacobi_and_solve(rng):
    for k in (2, 3, 4):
        B = rng.normal(size=(k, k))
        A = B + B.T
        assert np.allclose(nk._jacobi_eigvalsh(A), np.linalg.eigvalsh(A), atol=1e-12)
        G = B @ B.T + k * np.eye(k)
        rhs = rng.normal(size=(k, 2))
        assert np.allclose(nk._solve(G, rhs), np.linalg.solve(G, rhs), atol=1e-12)


def test_reduce_flags_indefinite_metric():
    eig, S, cond = nk._reduce_one(np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert np.isinf(cond) and np.all(np.isnan(eig))
