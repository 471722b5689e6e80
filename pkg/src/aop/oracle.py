"""Brute-force estimates that never look at singular values of ``T``.

The eps-hat estimate is a supremum search over orthogonal unit pairs: Monte
Carlo sampling in seeded chunks followed by a derivative-free hill climb in
``x`` with the best partner ``y`` solved exactly at each step.  The distance
estimate for real 2x2 matrices is a zooming grid over ``lam * U`` with ``U`` a
rotation or reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionTooSmall, NotReal2x2
from .matrix import MatrixLike, as_operator, random_orthogonal_pairs
from .metrics import ZERO_IMAGE_RTOL, OrthogonalPair, defect

CHUNK = 2048
_PARTNER_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    best_pair: OrthogonalPair
    samples: int
    refine_iters: int
    seed: int


def _zero_tol(a):
    return ZERO_IMAGE_RTOL * max(float(np.linalg.norm(a)), np.finfo(float).tiny)


def _field(a):
    return "C" if np.iscomplexobj(a) else "R"


def sample_best_pair(a: np.ndarray, n_samples: int, seed: int, backend=None):
    """Best of ``n_samples`` random orthogonal pairs.

    Chunk ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``, so the
    result does not depend on how chunks are scheduled; ties go to the lowest
    global sample index.
    """
    d = a.shape[1]
    field = _field(a)
    zt = _zero_tol(a)
    n_chunks = -(-n_samples // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    best_val, best_x, best_y = -1.0, None, None
    for i, child in enumerate(children):
        n = min(CHUNK, n_samples - i * CHUNK)
        X, Y = random_orthogonal_pairs(n, d, field, np.random.default_rng(child))
        vals = _kernels.pair_defects(X @ a.T, Y @ a.T, zt, backend=backend)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_x, best_y = float(vals[j]), X[j], Y[j]
    return best_x, best_y


def _directions(x: np.ndarray, complex_field: bool) -> np.ndarray:
    """Unit tangent directions at ``x``: canonical axes (and ``i`` times them)
    projected onto the orthocomplement of ``x``."""
    d = x.size
    E = np.eye(d, dtype=x.dtype)
    if complex_field:
        E = np.vstack([E, 1j * E])
    # complex projection also removes the pure phase direction i*x
    D = E - np.outer(E @ x.conj(), x)
    n = np.linalg.norm(D, axis=1)
    keep = n > 1e-6
    return D[keep] / n[keep, None]


def refine_pair(
    T: MatrixLike,
    pair: OrthogonalPair | tuple,
    iters: int = 200,
    step0: float = 0.1,
    step_floor: float = 1e-8,
    backend=None,
    trace: list | None = None,
) -> OrthogonalPair:
    """Hill climb on the sphere in ``x``; the partner ``y`` is exact at every step.

    Each iteration tries ``x' = cos(h) x +- sin(h) u`` for every tangent
    direction ``u`` (plus the previous move, if any) and moves to the best
    candidate if it improves, doubling ``h`` up to ``step0``; otherwise it
    halves ``h``, never below ``step_floor``.  The defect never decreases.
    """
    a = as_operator(T).entries
    if isinstance(pair, OrthogonalPair):
        x0, y0 = pair.x, pair.y
    else:
        x0, y0 = pair
    dtype = np.result_type(a.dtype, np.asarray(x0).dtype)
    x = np.asarray(x0, dtype=dtype) / np.linalg.norm(x0)
    y = np.asarray(y0, dtype=dtype)
    y = y - np.vdot(x, y) * x
    y = y / np.linalg.norm(y)
    complex_field = np.iscomplexobj(x)
    zt = _zero_tol(a)

    start = defect(a, x, y)
    vals, Ys = _kernels.partner_defects(a, x[None], zt, _PARTNER_RANK_RTOL, backend=backend)
    f = start
    if vals[0] > f:
        f, y = float(vals[0]), Ys[0]
    if trace is not None:
        trace.append(f)

    h = step0
    heading = None
    for _ in range(iters):
        D = _directions(x, complex_field)
        cand = [math.cos(h) * x + math.sin(h) * D, math.cos(h) * x - math.sin(h) * D]
        if heading is not None:
            # pattern moves: keep going the way the last accepted step went
            m = heading - np.vdot(x, heading) * x
            nm = np.linalg.norm(m)
            if nm > 1e-12:
                m = m / nm
                ang = np.minimum(h * np.array([1.0, 2.0, 4.0, 8.0]), np.pi / 4)
                cand.append(np.cos(ang)[:, None] * x + np.sin(ang)[:, None] * m)
        cand = np.vstack(cand)
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        vals, Ys = _kernels.partner_defects(a, cand, zt, _PARTNER_RANK_RTOL, backend=backend)
        j = int(np.argmax(vals))
        if vals[j] > f:
            step = cand[j] - x
            heading = step if heading is None else step + 0.8 * heading
            f, x, y = float(vals[j]), cand[j], Ys[j]
            h = min(2 * h, step0)
        else:
            h = max(h / 2, step_floor)
        if trace is not None:
            trace.append(f)
    # re-orthonormalize before certifying the final pair
    y = y - np.vdot(x, y) * x
    y = y / np.linalg.norm(y)
    final = defect(a, x, y)
    if final < start:
        x, y, final = np.asarray(x0) / np.linalg.norm(x0), y0, start
    return OrthogonalPair(x, y, final)


def estimate_eps_hat(
    T: MatrixLike,
    n_samples: int = 10_000,
    refine_iters: int = 200,
    seed: int = 0,
    backend=None,
) -> OracleEstimate:
    """Lower estimate of eps-hat as a supremum over sampled and refined pairs."""
    a = as_operator(T).entries
    if a.shape[1] < 2:
        raise DimensionTooSmall("orthogonal pairs need a domain of dimension >= 2")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    x, y = sample_best_pair(a, n_samples, seed, backend=backend)
    if refine_iters > 0:
        pair = refine_pair(a, (x, y), refine_iters, backend=backend)
    else:
        pair = OrthogonalPair(x, y, defect(a, x, y))
    return OracleEstimate(pair.defect, pair, n_samples, refine_iters, seed)


def default_grids(T: MatrixLike, n_lambda: int = 1001, n_theta: int = 1001):
    """Grids covering every optimum: ``lam`` in ``[0, |T|_F]`` (negative
    multiples are rotations by pi) and ``theta`` in ``[0, 2 pi)``."""
    a = np.asarray(as_operator(T).entries)
    lam_max = float(np.linalg.norm(a))  # Frobenius norm bounds the optimal lam
    return (
        np.linspace(0.0, lam_max, n_lambda),
        np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False),
    )


def grid_resolution_bound(lambda_grid, angle_grid) -> float:
    """Lipschitz bound on how far the grid minimum can sit above the true one
    (objective is 1-Lipschitz in ``lam`` and ``|lam|``-Lipschitz in ``theta``)."""
    lam = np.asarray(lambda_grid)
    th = np.sort(np.asarray(angle_grid))
    dl = float(np.max(np.diff(lam))) if lam.size > 1 else 0.0
    gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
    dth = float(np.max(gaps)) if th.size > 1 else 2 * np.pi
    return dl / 2 + float(np.max(np.abs(lam))) * dth / 2


def brute_force_dist_2x2(
    T: MatrixLike,
    lambda_grid=None,
    angle_grid=None,
    zoom_levels: int = 2,
    backend=None,
) -> float:
    """Minimum of ``|T - lam U|`` over a grid of real scalars and 2x2 orthogonal ``U``.

    After the full grid, ``zoom_levels`` further grids of the same size are laid
    over the neighbouring cells of the running best point.  Every evaluated point
    is a genuine member of the set, so the result never undercuts the true
    distance.
    """
    a = as_operator(T).entries
    if a.shape != (2, 2) or np.iscomplexobj(a):
        raise NotReal2x2(f"expected a real 2x2 matrix, got {a.shape} {a.dtype}")
    if lambda_grid is None or angle_grid is None:
        lg, ag = default_grids(a)
        lambda_grid = lg if lambda_grid is None else lambda_grid
        angle_grid = ag if angle_grid is None else angle_grid
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    angle_grid = np.asarray(angle_grid, dtype=float)
    best, (lam, th, _) = _kernels.grid_dist_2x2(a, lambda_grid, angle_grid, backend=backend)
    dl = float(np.max(np.diff(lambda_grid))) if lambda_grid.size > 1 else 0.0
    dth = float(np.max(np.diff(np.sort(angle_grid)))) if angle_grid.size > 1 else 0.0
    for _ in range(zoom_levels):
        lg = np.linspace(lam - dl, lam + dl, lambda_grid.size)
        ag = np.linspace(th - dth, th + dth, angle_grid.size)
        val, (lam2, th2, _) = _kernels.grid_dist_2x2(a, lg, ag, backend=backend)
        if val < best:
            best, lam, th = val, lam2, th2
        dl = 2 * dl / max(lambda_grid.size - 1, 1)
        dth = 2 * dth / max(angle_grid.size - 1, 1)
    return best
