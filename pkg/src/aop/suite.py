"""Seeded random operator families used by the test suite and benchmarks."""

from __future__ import annotations

import numpy as np

from .matrix import random_isometry


def random_with_spectrum(rows, cols, sigma, field, rng):
    """``U diag(sigma) V*`` with Haar-random frames; ``len(sigma) = min(rows, cols)``."""
    k = min(rows, cols)
    U = random_isometry(rows, k, field, rng)
    V = random_isometry(cols, k, field, rng)
    return (U * np.asarray(sigma, dtype=float)) @ V.conj().T


def random_suite(n=200, seed=20240601, n_singular=24, max_dim=8, max_cond=1e3):
    """List of ``(label, matrix)`` covering dims 2..max_dim, both fields.

    Regular members have log-uniform condition number in ``[1, max_cond]`` and
    ``cols <= rows``.  The first ``n_singular`` members are singular: a square
    or tall matrix with trailing singular values set to zero, or a wide matrix.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        field = "C" if i % 2 else "R"
        if i < n_singular:
            if i % 3 == 2:
                cols = int(rng.integers(3, max_dim + 1))
                rows = int(rng.integers(1, cols))
                A = random_with_spectrum(rows, cols, rng.uniform(0.5, 3.0, rows), field, rng)
                out.append((f"wide-{i}", A))
                continue
            cols = int(rng.integers(2, max_dim + 1))
            rows = int(rng.integers(cols, max_dim + 1))
            sigma = np.sort(rng.uniform(0.5, 3.0, cols))[::-1]
            n_zero = int(rng.integers(1, cols))
            sigma[cols - n_zero:] = 0.0
            out.append((f"singular-{i}", random_with_spectrum(rows, cols, sigma, field, rng)))
            continue
        cols = int(rng.integers(2, max_dim + 1))
        rows = int(rng.integers(cols, max_dim + 1))
        cond = 10 ** rng.uniform(0, np.log10(max_cond))
        inner = np.sort(rng.uniform(0, 1, max(cols - 2, 0)))[::-1]
        sigma = np.concatenate([[1.0], cond ** (-inner), [1.0 / cond]])[:cols]
        sigma[-1] = 1.0 / cond
        scale = 10 ** rng.uniform(-1, 1)
        out.append((f"regular-{i}", random_with_spectrum(rows, cols, scale * sigma, field, rng)))
    return out
