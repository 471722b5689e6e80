"""Hot inner loops of the brute-force oracle, in two interchangeable backends.

Each kernel exists as a numba ``@njit`` loop and as a vectorized pure-numpy
version.  The numba path is used when numba imports and the environment
variable ``AOP_DISABLE_NUMBA`` is unset (or ``0``); set it to ``1`` to force
the numpy path.  Both backends consume the same inputs and agree to rounding.

Kernels
-------
pair_defects(TX, TY)
    Row-wise ``|<Tx, Ty>| / (|Tx| |Ty|)`` with the zero-image convention.
partner_defects(T, X, zero_tol, rank_tol)
    For every candidate unit vector ``x`` (rows of ``X``), the largest defect
    over unit ``y`` orthogonal to ``x`` together with the maximizing ``y``.
grid_dist_2x2(T, lambdas, thetas)
    Minimum spectral norm of ``T - lam * U`` over real 2x2 rotations and
    reflections ``U(theta)``, with the argmin.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("AOP_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"


# --- numpy backend -----------------------------------------------------------

def _pair_defects_np(TX, TY, zero_tol):
    nx = np.linalg.norm(TX, axis=1)
    ny = np.linalg.norm(TY, axis=1)
    inner = np.abs(np.sum(TX * TY.conj(), axis=1))
    ok = (nx > zero_tol) & (ny > zero_tol)
    out = np.zeros(TX.shape[0])
    out[ok] = inner[ok] / (nx[ok] * ny[ok])
    return np.minimum(out, 1.0)


def _householder_complements_np(X):
    """Stack of ``d x (d-1)`` orthonormal bases of each row's orthocomplement."""
    n, d = X.shape
    x0 = X[:, 0]
    ax0 = np.abs(x0)
    phase = np.where(ax0 > 0, x0 / np.where(ax0 > 0, ax0, 1.0), 1.0)
    W = X.copy()
    W[:, 0] += phase
    wn2 = np.sum(np.abs(W) ** 2, axis=1)
    H = np.eye(d, dtype=X.dtype)[None] - 2.0 * W[:, :, None] * W.conj()[:, None, :] / wn2[:, None, None]
    return H[:, :, 1:]


def _partner_defects_np(T, X, zero_tol, rank_tol):
    n, d = X.shape
    Q = _householder_complements_np(X)
    B = np.einsum("ij,njk->nik", T, Q)
    A = X @ T.T
    na = np.linalg.norm(A, axis=1)
    U, s, Vh = np.linalg.svd(B, full_matrices=False)
    keep = s > (rank_tol * s[:, :1])
    keep &= s[:, :1] > 0
    coeff = np.einsum("nij,ni->nj", U.conj(), A) * keep
    proj = np.linalg.norm(coeff, axis=1)
    safe_s = np.where(keep, s, 1.0)
    c = np.einsum("nji,nj->ni", Vh.conj(), coeff / safe_s)
    Y = np.einsum("nij,nj->ni", Q, c)
    ny = np.linalg.norm(Y, axis=1)
    good = (na > zero_tol) & (ny > 0)
    defects = np.where(good, proj / np.where(good, na, 1.0), 0.0)
    # fall back to any orthogonal direction when no partner improves on 0
    Y = np.where(good[:, None], Y / np.where(ny > 0, ny, 1.0)[:, None], Q[:, :, 0])
    return np.minimum(defects, 1.0), Y


def _spectral_norm_2x2(a, b, c, d):
    fro2 = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
    return np.sqrt((fro2 + disc) / 2.0)


def _grid_dist_2x2_np(T, lambdas, thetas):
    t11, t12, t21, t22 = T[0, 0], T[0, 1], T[1, 0], T[1, 1]
    cth = np.cos(thetas)[None, :]
    sth = np.sin(thetas)[None, :]
    lam = lambdas[:, None]
    best, arg = np.inf, (0.0, 0.0, 0)
    # kind 0: rotation [[c, -s], [s, c]]; kind 1: reflection [[c, s], [s, -c]]
    for kind, sign in ((0, 1.0), (1, -1.0)):
        vals = _spectral_norm_2x2(
            t11 - lam * cth,
            t12 + sign * lam * sth,
            t21 - lam * sth,
            t22 - sign * lam * cth,
        )
        k = int(np.argmin(vals))
        if vals.flat[k] < best:
            i, j = divmod(k, vals.shape[1])
            best, arg = float(vals.flat[k]), (float(lambdas[i]), float(thetas[j]), kind)
    return best, arg


# --- numba backend -----------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _pair_defects_nb(TX, TY, zero_tol):
        n, d = TX.shape
        out = np.zeros(n)
        for r in range(n):
            nx2 = 0.0
            ny2 = 0.0
            acc = TX[r, 0] * 0.0
            for k in range(d):
                a = TX[r, k]
                b = TY[r, k]
                nx2 += a.real * a.real + a.imag * a.imag
                ny2 += b.real * b.real + b.imag * b.imag
                acc += a * np.conj(b)
            nx = np.sqrt(nx2)
            ny = np.sqrt(ny2)
            if nx > zero_tol and ny > zero_tol:
                v = abs(acc) / (nx * ny)
                out[r] = v if v < 1.0 else 1.0
        return out

    @numba.njit(cache=True)
    def _partner_one_nb(T, x, zero_tol, rank_tol):
        d = x.size
        ax0 = abs(x[0])
        phase = x[0] / ax0 if ax0 > 0 else x[0] * 0.0 + 1.0
        w = x.copy()
        w[0] += phase
        wn2 = 0.0
        for k in range(d):
            wn2 += abs(w[k]) ** 2
        Q = np.empty((d, d - 1), dtype=x.dtype)
        for i in range(d):
            for j in range(1, d):
                e = 1.0 if i == j else 0.0
                Q[i, j - 1] = e - 2.0 * w[i] * np.conj(w[j]) / wn2
        B = T @ Q
        a = T @ x
        na = np.sqrt(np.sum(np.abs(a) ** 2))
        y0 = Q[:, 0].copy()
        if na <= zero_tol:
            return 0.0, y0
        U, s, Vh = np.linalg.svd(B, full_matrices=False)
        if s[0] <= 0:
            return 0.0, y0
        k = s.size
        c = np.zeros(d - 1, dtype=x.dtype)
        proj2 = 0.0
        for j in range(k):
            if s[j] > rank_tol * s[0]:
                cj = np.vdot(U[:, j], a)
                proj2 += abs(cj) ** 2
                c += np.conj(Vh[j, :]) * (cj / s[j])
        y = Q @ c
        ny = np.sqrt(np.sum(np.abs(y) ** 2))
        if ny <= 0:
            return 0.0, y0
        v = np.sqrt(proj2) / na
        return (v if v < 1.0 else 1.0), y / ny

    @numba.njit(cache=True)
    def _partner_defects_nb(T, X, zero_tol, rank_tol):
        n, d = X.shape
        out = np.zeros(n)
        Y = np.empty_like(X)
        for r in range(n):
            v, y = _partner_one_nb(T, X[r].copy(), zero_tol, rank_tol)
            out[r] = v
            Y[r] = y
        return out, Y

    @numba.njit(cache=True)
    def _grid_dist_2x2_nb(T, lambdas, thetas):
        t11 = T[0, 0]
        t12 = T[0, 1]
        t21 = T[1, 0]
        t22 = T[1, 1]
        best = np.inf
        bl = 0.0
        bt = 0.0
        bk = 0
        for j in range(thetas.size):
            c = np.cos(thetas[j])
            s = np.sin(thetas[j])
            for kind in range(2):
                sign = 1.0 if kind == 0 else -1.0
                for i in range(lambdas.size):
                    lam = lambdas[i]
                    a = t11 - lam * c
                    b = t12 + sign * lam * s
                    cc = t21 - lam * s
                    dd = t22 - sign * lam * c
                    fro2 = a * a + b * b + cc * cc + dd * dd
                    det = a * dd - b * cc
                    disc = fro2 * fro2 - 4.0 * det * det
                    disc = np.sqrt(disc) if disc > 0.0 else 0.0
                    v = np.sqrt((fro2 + disc) / 2.0)
                    if v < best:
                        best = v
                        bl = lam
                        bt = thetas[j]
                        bk = kind
        return best, bl, bt, bk


# --- dispatch ----------------------------------------------------------------

def pair_defects(TX, TY, zero_tol, backend=None):
    if (backend or BACKEND) == "numba":
        return _pair_defects_nb(np.ascontiguousarray(TX), np.ascontiguousarray(TY), zero_tol)
    return _pair_defects_np(TX, TY, zero_tol)


def partner_defects(T, X, zero_tol, rank_tol, backend=None):
    dtype = np.result_type(T.dtype, X.dtype)
    T = np.ascontiguousarray(T, dtype=dtype)
    X = np.ascontiguousarray(X, dtype=dtype)
    if (backend or BACKEND) == "numba":
        return _partner_defects_nb(T, X, zero_tol, rank_tol)
    return _partner_defects_np(T, X, zero_tol, rank_tol)


def grid_dist_2x2(T, lambdas, thetas, backend=None):
    T = np.ascontiguousarray(T, dtype=np.float64)
    lambdas = np.ascontiguousarray(lambdas, dtype=np.float64)
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    if (backend or BACKEND) == "numba":
        best, lam, th, kind = _grid_dist_2x2_nb(T, lambdas, thetas)
        return float(best), (float(lam), float(th), int(kind))
    return _grid_dist_2x2_np(T, lambdas, thetas)


def available_backends():
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)
