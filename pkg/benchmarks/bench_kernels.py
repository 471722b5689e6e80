"""Time the oracle kernels under the numba and pure-numpy backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--dim 6]

Each kernel is called once per backend before timing so numba compilation
is excluded; the reported figure is the best of ``--repeat`` runs.  The last
rows time a whole ``estimate_eps_hat`` call, which is what the CLI and the
acceptance suite spend their time in.
"""

import argparse
import timeit

import numpy as np

from aop import _kernels
from aop.matrix import random_orthogonal_pairs
from aop.oracle import estimate_eps_hat


def _cases(dim, rng):
    A = rng.standard_normal((dim + 2, dim)) + 1j * rng.standard_normal((dim + 2, dim))
    X, Y = random_orthogonal_pairs(2048, dim, "C", rng)
    TX, TY = X @ A.T, Y @ A.T
    U = rng.standard_normal((4 * dim, dim)) + 1j * rng.standard_normal((4 * dim, dim))
    U /= np.linalg.norm(U, axis=1)[:, None]
    T2 = np.array([[1.0, 0.3], [-0.2, 2.0]])
    lam = np.linspace(0.0, 3.0, 400)
    th = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
    return {
        "pair_defects (2048 pairs)": lambda be: _kernels.pair_defects(TX, TY, 1e-13, backend=be),
        f"partner_defects ({4 * dim} candidates)":
            lambda be: _kernels.partner_defects(A, U, 1e-13, 1e-12, backend=be),
        "grid_dist_2x2 (400x400)": lambda be: _kernels.grid_dist_2x2(T2, lam, th, backend=be),
        "estimate_eps_hat (1e4 samples, 200 steps)":
            lambda be: estimate_eps_hat(A, 10_000, 200, seed=0, backend=be),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--dim", type=int, default=6)
    args = p.parse_args(argv)

    backends = _kernels.available_backends()
    rng = np.random.default_rng(0)
    cases = _cases(args.dim, rng)
    print(f"default backend: {_kernels.BACKEND}; comparing {', '.join(backends)}")
    print(f"{'kernel':<44}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, fn in cases.items():
        times = {}
        for be in backends:
            fn(be)  # warm-up, includes JIT compilation
            times[be] = min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat))
        row = f"{name:<44}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{times['numpy'] / times['numba']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
