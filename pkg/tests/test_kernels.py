import numpy as np
import pytest

from aop import _kernels
from aop.matrix import random_orthogonal_pairs

pytestmark = pytest.mark.skipif(
    "numba" not in _kernels.available_backends(), reason="numba backend unavailable"
)


@pytest.mark.parametrize("field", ["R", "C"])
def test_pair_defects_backends_agree(rng, field):
    A = rng.standard_normal((6, 4))
    if field == "C":
        A = A + 1j * rng.standard_normal((6, 4))
    X, Y = random_orthogonal_pairs(500, 4, field, rng)
    TX, TY = X @ A.T, Y @ A.T
    a = _kernels.pair_defects(TX, TY, 1e-13, backend="numpy")
    b = _kernels.pair_defects(TX, TY, 1e-13, backend="numba")
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_pair_defects_zero_image():
    TX = np.array([[0.0, 0.0], [1.0, 1.0]])
    TY = np.array([[1.0, 0.0], [1.0, 1.0]])
    for be in _kernels.available_backends():
        np.testing.assert_allclose(_kernels.pair_defects(TX, TY, 1e-13, backend=be), [0.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("field", ["R", "C"])
def test_partner_defects_backends_agree(rng, field):
    A = rng.standard_normal((5, 4))
    X = rng.standard_normal((50, 4))
    if field == "C":
        A = A + 1j * rng.standard_normal((5, 4))
        X = X + 1j * rng.standard_normal((50, 4))
    X /= np.linalg.norm(X, axis=1)[:, None]
    va, Ya = _kernels.partner_defects(A, X, 1e-13, 1e-12, backend="numpy")
    vb, Yb = _kernels.partner_defects(A, X, 1e-13, 1e-12, backend="numba")
    np.testing.assert_allclose(va, vb, atol=1e-12)
    # partners are unit and orthogonal to x in both backends
    for Y in (Ya, Yb):
        np.testing.assert_allclose(np.linalg.norm(Y, axis=1), 1.0, atol=1e-12)
        assert np.max(np.abs(np.sum(Y * X.conj(), axis=1))) < 1e-12


def test_grid_kernel_backends_agree():
    T = np.array([[1.0, 0.3], [-0.2, 2.0]])
    lam = np.linspace(0, 3, 61)
    th = np.linspace(0, 2 * np.pi, 90, endpoint=False)
    a, ia = _kernels.grid_dist_2x2(T, lam, th, backend="numpy")
    b, ib = _kernels.grid_dist_2x2(T, lam, th, backend="numba")
    assert a == pytest.approx(b, abs=1e-14)
    assert ia[2] == ib[2]


def test_backend_flag():
    assert _kernels.BACKEND in _kernels.available_backends()


def test_env_flag_selects_numpy():
    import os
    import subprocess
    import sys

    env = dict(os.environ, AOP_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import aop; print(aop.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
