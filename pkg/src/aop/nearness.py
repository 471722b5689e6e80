"""Distance from an operator to the scalar multiples of isometries.

For ``cols <= rows`` the distance is ``(t - m)/2`` and it is attained by
``S = ((t + m)/2) V`` where ``V`` is the isometric polar factor of ``T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoIsometryExists, NotAop, NotSquare, OutOfRange, OutOfScope, ZeroOperator
from .matrix import MatrixLike, as_operator, default_rank_tol, min_modulus, operator_norm, polar
from .metrics import delta_improved, delta_turnsek, eps_hat


@dataclass(frozen=True, eq=False)
class NearnessResult:
    distance: float
    lambda_star: float
    isometry_factor: np.ndarray
    nearest: np.ndarray
    bound_ratio: float
    achieved: float  # |T - S| evaluated by SVD of the difference


@dataclass(frozen=True)
class StabilityCertificate:
    nearest: np.ndarray
    gap: float
    rhs_improved: float
    rhs_turnsek: float
    holds_improved: bool
    eps_hat: float


def _norm_and_min_mod(a: np.ndarray) -> tuple[float, float]:
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0]), float(s[-1])


def dist_to_scalar_isometries(T: MatrixLike, rank_tol: float | None = None) -> NearnessResult:
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols > rows:
        raise NoIsometryExists(
            f"{rows}x{cols}: no isometry maps a larger domain into a smaller codomain"
        )
    t, m = _norm_and_min_mod(a)
    V = polar(a, rank_tol=rank_tol).isometry_factor
    lam = (t + m) / 2
    S = lam * V
    dist = (t - m) / 2
    achieved = operator_norm(a - S)
    denom = min(t, lam)
    return NearnessResult(
        distance=dist,
        lambda_star=lam,
        isometry_factor=V,
        nearest=S,
        bound_ratio=dist / denom if denom > 0 else 0.0,
        achieved=achieved,
    )


def distance_via_eps_hat(T: MatrixLike) -> float:
    """The same distance written as ``(1 - sqrt((1-eps)/(1+eps)))/2 * |T|``."""
    e = eps_hat(T)
    if e.norm == 0:
        return 0.0
    if e.complement <= 0:
        return e.norm / 2
    return (1.0 - math.sqrt(e.complement / (1.0 + e.value))) / 2 * e.norm


def dist_to_scalar_unitaries(T: MatrixLike, rank_tol: float | None = None) -> NearnessResult:
    """Square case: kernel and cokernel dimensions agree, so the isometric
    factor is a unitary and the distance matches :func:`dist_to_scalar_isometries`."""
    a = as_operator(T).entries
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"expected a square matrix, got {a.shape[0]}x{a.shape[1]}")
    return dist_to_scalar_isometries(a, rank_tol=rank_tol)


def essential_min_modulus(T: MatrixLike) -> float:
    """Not defined for matrices.

    The essential spectrum of ``|T|`` is empty in finite dimensions, so the
    unequal-kernel cases of the distance-to-unitaries formula have no matrix
    instances.  Always raises :class:`OutOfScope`.
    """
    raise OutOfScope(
        "the essential minimum modulus is an infinite-dimensional notion; "
        "for square matrices use dist_to_scalar_unitaries"
    )


def stability_certificate(T: MatrixLike, rank_tol: float | None = None) -> StabilityCertificate:
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols > rows:
        raise NoIsometryExists(f"{rows}x{cols}: nearness needs cols <= rows")
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    e = eps_hat(a)
    if e.norm == 0:
        raise NotAop("the zero operator is handled by convention, not certified")
    if e.min_mod <= rank_tol * e.norm or e.value >= 1.0:
        raise NotAop("operator is not bounded below (eps_hat = 1)")
    near = dist_to_scalar_isometries(a, rank_tol=rank_tol)
    scale = min(e.norm, abs(near.lambda_star))
    gap = near.achieved
    rhs_i = delta_improved(e) * scale
    return StabilityCertificate(
        nearest=near.nearest,
        gap=gap,
        rhs_improved=rhs_i,
        rhs_turnsek=delta_turnsek(e) * scale,
        holds_improved=bool(gap <= rhs_i + 1e-10),
        eps_hat=e.value,
    )


def normalized_isometry_gap(T: MatrixLike) -> float:
    """Spectral norm of ``T/|T| - V`` with ``V`` the polar isometry."""
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols > rows:
        raise NoIsometryExists(f"{rows}x{cols}: nearness needs cols <= rows")
    t = operator_norm(a)
    if t == 0:
        raise ZeroOperator("cannot normalize the zero operator")
    V = polar(a).isometry_factor
    return operator_norm(a / t - V)


def scaled_isometry_gap(T: MatrixLike, lam: float) -> float:
    """Spectral norm of ``T/lam - V`` for ``lam`` between ``m(T)`` and ``|T|``."""
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols > rows:
        raise NoIsometryExists(f"{rows}x{cols}: nearness needs cols <= rows")
    t, m = _norm_and_min_mod(a)
    slack = 1e-12 * t
    if not m > 0:
        raise OutOfRange("scaled gap needs m(T) > 0")
    if not (m - slack <= lam <= t + slack):
        raise OutOfRange(f"lambda must lie in [m, t] = [{m}, {t}], got {lam}")
    V = polar(a).isometry_factor
    return operator_norm(a / lam - V)


def isometry_lower_bound(T: MatrixLike) -> float:
    """``(|T| - m(T))/2``: no ``lam V`` gets closer than this to ``T``."""
    a = as_operator(T).entries
    return (operator_norm(a) - min_modulus(a)) / 2
