import math

import numpy as np
import pytest

from aop.errors import NoIsometryExists, NotAop, NotSquare, OutOfRange, OutOfScope, ZeroOperator
from aop.matrix import min_modulus, operator_norm, random_isometry
from aop.metrics import delta_improved, delta_turnsek, eps_hat
from aop.nearness import (
    dist_to_scalar_isometries,
    dist_to_scalar_unitaries,
    distance_via_eps_hat,
    essential_min_modulus,
    isometry_lower_bound,
    normalized_isometry_gap,
    scaled_isometry_gap,
    stability_certificate,
)
from aop.oracle import brute_force_dist_2x2

from conftest import random_matrix


def _random_probes(A, n, rng):
    """Batch of ``|A - lam V|`` for random scalars and Haar isometries."""
    rows, cols = A.shape
    cplx = np.iscomplexobj(A)
    G = rng.standard_normal((n, rows, cols))
    if cplx:
        G = G + 1j * rng.standard_normal((n, rows, cols))
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R, axis1=1, axis2=2)
    Q = Q * (d / np.abs(d))[:, None, :]
    t = operator_norm(A)
    lam = rng.uniform(0, 2 * t, n)
    if cplx:
        lam = lam * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    return np.linalg.svd(A[None] - lam[:, None, None] * Q, compute_uv=False)[:, 0]


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_example_diagonal_family(n):
    T = np.diag([float(n * n), float(n * n + n)])
    r = dist_to_scalar_isometries(T)
    assert r.distance == pytest.approx(n / 2, abs=1e-12)
    assert r.lambda_star == pytest.approx(n * n + n / 2, abs=1e-12)
    np.testing.assert_allclose(r.nearest, (n * n + n / 2) * np.eye(2), atol=1e-12)


def test_diag12_nearest():
    r = dist_to_scalar_isometries(np.diag([1.0, 2.0]))
    assert (r.distance, r.lambda_star) == (0.5, 1.5)
    np.testing.assert_allclose(r.nearest, 1.5 * np.eye(2), atol=1e-15)
    assert r.bound_ratio == pytest.approx(1 / 3, abs=1e-15)


@pytest.mark.parametrize("field", ["R", "C"])
def test_isometry_has_distance_zero(rng, field):
    V = random_isometry(5, 3, field, rng)
    r = dist_to_scalar_isometries(V)
    assert r.distance <= 1e-14 and r.achieved <= 1e-13


def test_singular_distance_half_norm():
    T = np.array([[1.0, 0.0], [0.0, 0.0]])
    r = dist_to_scalar_isometries(T)
    assert r.distance == 0.5
    assert r.achieved == pytest.approx(0.5, abs=1e-15)


def test_unitaries_square_case():
    assert dist_to_scalar_unitaries(np.diag([1.0, 2.0])).distance == 0.5
    T = np.array([[1.0, 0.0], [0.0, 0.0]])
    r = dist_to_scalar_unitaries(T)
    V = r.isometry_factor
    np.testing.assert_allclose(V @ V.T, np.eye(2), atol=1e-14)
    # independent grid search over 2x2 real scalar multiples of orthogonal matrices
    assert brute_force_dist_2x2(T) == pytest.approx(0.5, abs=1e-6)
    assert r.distance == 0.5
    with pytest.raises(NotSquare):
        dist_to_scalar_unitaries(np.ones((3, 2)))


@pytest.mark.parametrize("field", ["R", "C"])
def test_unitary_has_distance_zero(rng, field):
    U = random_isometry(4, 4, field, rng)
    assert dist_to_scalar_unitaries(U).distance <= 1e-14


def test_wide_rejected():
    for fn in (dist_to_scalar_isometries, stability_certificate, normalized_isometry_gap):
        with pytest.raises(NoIsometryExists):
            fn(np.ones((2, 3)))
    with pytest.raises(NoIsometryExists):
        scaled_isometry_gap(np.ones((2, 3)), 1.0)


def test_essential_min_modulus_out_of_scope():
    with pytest.raises(OutOfScope):
        essential_min_modulus(np.eye(3))


def test_nearness_invariants_on_suite(suite):
    rng = np.random.default_rng(77)
    for label, A in suite:
        rows, cols = A.shape
        if cols > rows:
            continue
        r = dist_to_scalar_isometries(A)
        t, m = operator_norm(A), min_modulus(A)
        assert abs(r.achieved - r.distance) <= 1e-10 * t, label
        S = r.nearest
        np.testing.assert_allclose(S.conj().T @ S, abs(r.lambda_star) ** 2 * np.eye(cols),
                                   atol=1e-10 * t * t)
        assert abs(distance_via_eps_hat(A) - (t - m) / 2) <= 1e-12 * t, label
        assert r.bound_ratio <= delta_improved(eps_hat(A)) + 1e-10 if m > 1e-12 * t else True
        probes = _random_probes(A, 200, rng)
        assert probes.min() >= isometry_lower_bound(A) - 1e-10, label
        if rows == cols:
            assert dist_to_scalar_unitaries(A).distance == r.distance


def test_stability_certificate_diag():
    c = stability_certificate(np.diag([1.0, 2.0]))
    assert c.gap == pytest.approx(0.5, abs=1e-15)
    assert c.rhs_improved == pytest.approx(0.5, abs=1e-15)
    assert c.rhs_turnsek == pytest.approx(0.75, abs=1e-15)
    assert c.holds_improved


def test_stability_certificate_isometry(rng):
    c = stability_certificate(random_isometry(4, 4, "R", rng))
    assert c.gap <= 1e-14 and c.rhs_improved <= 1e-14


def test_stability_certificate_not_aop():
    with pytest.raises(NotAop):
        stability_certificate(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(NotAop):
        stability_certificate(np.zeros((2, 2)))


def test_stability_certificate_random_full_rank(rng):
    for _ in range(20):
        A = random_matrix(rng, 5, 5)
        c = stability_certificate(A)
        scale = min(operator_norm(A), operator_norm(c.nearest))
        assert c.holds_improved
        assert abs(c.gap - c.rhs_improved) <= 1e-10
        assert c.gap < delta_turnsek(c.eps_hat) * scale


def test_normalized_gap():
    assert normalized_isometry_gap(np.diag([1.0, 2.0])) == pytest.approx(0.5, abs=1e-15)
    assert normalized_isometry_gap(np.eye(3)) <= 1e-15
    with pytest.raises(ZeroOperator):
        normalized_isometry_gap(np.zeros((2, 2)))
    # rank deficient: bound 1 - m/t = 1 is attained
    assert normalized_isometry_gap(np.array([[1.0, 0.0], [0.0, 0.0]])) == pytest.approx(1.0)


def test_normalized_gap_tends_to_zero():
    gaps = [normalized_isometry_gap(np.diag([1.0, 1.0 + 1.0 / k])) for k in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


@pytest.mark.parametrize("field", ["R", "C"])
def test_gap_bounds_random(rng, field):
    for _ in range(20):
        A = random_matrix(rng, 6, 4, field)
        t, m = operator_norm(A), min_modulus(A)
        g = normalized_isometry_gap(A)
        assert g == pytest.approx(1 - m / t, abs=1e-12)
        for lam in np.linspace(m, t, 5):
            v = scaled_isometry_gap(A, lam)
            assert v <= (t - m) / lam + 1e-10 <= t / m - 1 + 2e-10


def test_scaled_gap_examples():
    T = np.diag([1.0, 2.0])
    assert scaled_isometry_gap(T, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert scaled_isometry_gap(T, 1.5) == pytest.approx(1 / 3, abs=1e-15)
    assert scaled_isometry_gap(np.eye(2), 1.0) <= 1e-15
    with pytest.raises(OutOfRange):
        scaled_isometry_gap(T, 2.5)
    with pytest.raises(OutOfRange):
        scaled_isometry_gap(np.array([[1.0, 0.0], [0.0, 0.0]]), 0.5)
