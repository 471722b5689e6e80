"""Approximate orthogonality preservation: defect, eps-hat, witnesses, bounds.

``eps_hat(T)`` is the smallest ``eps`` such that ``T`` maps every orthogonal
pair to an ``eps``-orthogonal pair, i.e. ``|<Tx, Ty>| <= eps |Tx| |Ty|``.  For a
nonzero operator it equals ``(t^2 - m^2) / (t^2 + m^2)`` with ``t = |T|`` and
``m`` the minimum modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DegenerateKernelChoice,
    DimensionTooSmall,
    NotOrthogonal,
    OutOfRange,
    ZeroOperator,
    ZeroVector,
)
from .matrix import (
    TAU_ORTH,
    MatrixLike,
    as_operator,
    default_rank_tol,
    kernel_basis,
)

# images shorter than this fraction of |T|_F |x| count as zero
ZERO_IMAGE_RTOL = 1e-13


@dataclass(frozen=True)
class OrthogonalPair:
    x: np.ndarray
    y: np.ndarray
    defect: float

    def __post_init__(self):
        for v in (self.x, self.y):
            if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                raise ValueError("pair vectors must be unit vectors")
        if abs(np.vdot(self.y, self.x)) > 1e-10:
            raise NotOrthogonal("pair vectors must be orthogonal")

    def __eq__(self, other):
        if not isinstance(other, OrthogonalPair):
            return NotImplemented
        return (
            self.defect == other.defect
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
        )


@dataclass(frozen=True)
class EpsHatValue:
    """Value of eps-hat together with the norm and minimum modulus behind it.

    ``complement`` holds ``1 - value`` computed without cancellation, which
    keeps the inversion back to the minimum modulus accurate for
    ill-conditioned operators.
    """

    value: float
    norm: float
    min_mod: float
    complement: float

    def __float__(self):
        return self.value

    @property
    def ratio(self) -> float:
        """``m / t``, or 1 for the zero operator."""
        return self.min_mod / self.norm if self.norm > 0 else 1.0


EpsLike = Union[float, EpsHatValue]


def _zero_tol(a: np.ndarray) -> float:
    return ZERO_IMAGE_RTOL * max(float(np.linalg.norm(a)), np.finfo(float).tiny)


def defect(T: MatrixLike, x, y, tol: float = TAU_ORTH) -> float:
    """Cosine-like image defect ``|<Tx, Ty>| / (|Tx| |Ty|)`` of an orthogonal pair.

    Returns 0 when either image vanishes, since the pair is then ``eps``-orthogonal
    for every ``eps``.
    """
    a = as_operator(T).entries
    x = np.asarray(x)
    y = np.asarray(y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVector("defect needs nonzero x and y")
    if abs(np.vdot(y, x)) > tol * nx * ny:
        raise NotOrthogonal(f"|<x,y>| = {abs(np.vdot(y, x)):.3g} exceeds tolerance")
    tx, ty = a @ x, a @ y
    ntx, nty = np.linalg.norm(tx), np.linalg.norm(ty)
    zt = _zero_tol(a)
    if ntx <= zt * nx or nty <= zt * ny:
        return 0.0
    return float(min(abs(np.vdot(ty, tx)) / (ntx * nty), 1.0))


def eps_hat_from_norms(norm: float, min_mod: float) -> EpsHatValue:
    if norm < 0 or min_mod < 0 or min_mod > norm * (1 + 1e-12):
        raise OutOfRange(f"need 0 <= m <= t, got t={norm}, m={min_mod}")
    if norm == 0:
        return EpsHatValue(0.0, 0.0, 0.0, 1.0)
    r = min(min_mod / norm, 1.0)
    r2 = r * r
    return EpsHatValue((1 - r2) / (1 + r2), float(norm), float(min_mod), 2 * r2 / (1 + r2))


def eps_hat(T: MatrixLike) -> EpsHatValue:
    """Exact smallest AOP constant; ``eps_hat(0) = 0`` by convention."""
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols < 2:
        raise DimensionTooSmall("eps_hat needs a domain of dimension >= 2")
    s = np.linalg.svd(a, compute_uv=False)
    m = 0.0 if cols > rows else float(s[-1])
    return eps_hat_from_norms(float(s[0]), m)


def witness_pair(T: MatrixLike, rank_tol: float | None = None) -> OrthogonalPair:
    """Orthogonal unit pair whose defect equals ``eps_hat(T)``.

    Injective ``T``: with right singular vectors ``v1`` (top) and ``vk`` (bottom),
    ``h = v1/s1`` and ``k = vk/sk`` have orthogonal unit images, and
    ``h +- (sk/s1) k`` is proportional to ``v1 +- vk``.

    Nontrivial kernel: with ``e`` a unit kernel vector and ``f = (e + v1)/sqrt(2)``,
    the vectors ``<e,f> f`` and ``e - <e,f> f`` are orthogonal and have opposite
    images, so the defect is exactly 1.
    """
    a = as_operator(T).entries
    rows, cols = a.shape
    if cols < 2:
        raise DimensionTooSmall("witness pairs need a domain of dimension >= 2")
    if not np.any(a):
        raise ZeroOperator("the zero operator has no witness pair")
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    v1 = vh[0].conj()
    ker = kernel_basis(a, rank_tol)
    if ker.shape[1] > 0:
        e = ker[:, -1]
        f = (e + v1) / math.sqrt(2)
        c = np.vdot(f, e)
        if abs(c) < 1e-8 or abs(abs(c) - 1) < 1e-8:
            raise DegenerateKernelChoice("kernel vector aligned with the top singular vector")
        x = c * f
        y = e - x
    else:
        vk = vh[cols - 1].conj()
        x = v1 + vk
        y = v1 - vk
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    return OrthogonalPair(x, y, defect(a, x, y))


def _as_eps(eps: EpsLike) -> tuple[float, float]:
    """Split ``eps`` into ``(eps, 1 - eps)``, exact complement when available."""
    if isinstance(eps, EpsHatValue):
        return eps.value, eps.complement
    eps = float(eps)
    return eps, 1.0 - eps


def _ratio(eps: EpsLike) -> float:
    value, comp = _as_eps(eps)
    # an EpsHatValue may round to 1.0 while its stored complement is still positive
    if not (0.0 <= value <= 1.0) or not comp > 0.0:
        raise OutOfRange(f"eps must lie in [0, 1), got {value!r}")
    return math.sqrt(comp / (1.0 + value))


def min_modulus_from_eps(eps: EpsLike, norm: float) -> float:
    """Recover the minimum modulus from eps-hat and the operator norm."""
    if not norm > 0:
        raise OutOfRange(f"norm must be positive, got {norm!r}")
    return _ratio(eps) * norm


def delta_turnsek(eps: EpsLike) -> float:
    """Earlier stability constant ``1 - sqrt((1-eps)/(1+eps))``."""
    return 1.0 - _ratio(eps)


def delta_improved(eps: EpsLike) -> float:
    """Sharp stability constant ``(1-s)/(1+s)`` with ``s = sqrt((1-eps)/(1+eps))``."""
    s = _ratio(eps)
    return (1.0 - s) / (1.0 + s)


def composition_bound(norm_S: float, m_S: float, norm_T: float, m_T: float) -> float:
    """Upper bound on ``eps_hat(S @ T)`` from the norms and minimum moduli."""
    for name, v in (("norm_S", norm_S), ("m_S", m_S), ("norm_T", norm_T), ("m_T", m_T)):
        if not v >= 0:
            raise OutOfRange(f"{name} must be >= 0, got {v!r}")
    if norm_S == 0 or norm_T == 0:
        raise OutOfRange("norms must be positive")
    top = (norm_S * norm_T) ** 2
    bottom = (m_S * m_T) ** 2
    return (top - bottom) / (top + bottom)
