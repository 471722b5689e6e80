"""Command-line interface.

Usage::

    aop analyze matrix.txt [--format json]
    aop verify matrix.txt --samples 10000 --refine 200 --seed 7 --tol 1e-3
    aop nearest matrix.txt [--out S.txt]
    aop repro example-3.1 --n-max 10 [--out table]

Exit codes: 0 ok, 1 internal inconsistency, 2 unreadable matrix file,
3 shape not supported (nearest on a wide matrix), 4 verification or repro
check failed, 5 unknown repro name, 64 command-line usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import repro as _repro
from .errors import AopError, InternalInconsistency, ParseError
from .matrix import (
    OperatorMatrix,
    default_rank_tol,
    format_matrix,
    kernel_dims,
    min_modulus,
    operator_norm,
    parse_matrix,
    read_matrix,
)
from .metrics import (
    delta_improved,
    delta_turnsek,
    eps_hat,
    min_modulus_from_eps,
    witness_pair,
)
from .nearness import dist_to_scalar_isometries, distance_via_eps_hat
from .oracle import brute_force_dist_2x2, estimate_eps_hat

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_PARSE = 2
EXIT_SHAPE = 3
EXIT_FAILED = 4
EXIT_UNKNOWN_REPRO = 5
EXIT_USAGE = 64


def _vec(v: np.ndarray) -> list:
    if np.iscomplexobj(v):
        return [[float(z.real), float(z.imag)] for z in v]
    return [float(z) for z in v]


@dataclass
class AopReport:
    path: str
    rows: int
    cols: int
    field: str
    norm: float
    min_modulus: float
    eps_hat: Optional[float]
    kernel_dims: list
    witness: Optional[dict] = None
    dist_cv: Optional[float] = None
    lambda_star: Optional[float] = None
    stability: Optional[dict] = None
    oracle: Optional[dict] = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "AopReport":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "AopReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        def g(v):
            return "unavailable" if v is None else f"{v:.12g}"

        lines = [
            f"input        {self.path} ({self.rows}x{self.cols}, field {self.field})",
            f"norm         {g(self.norm)}",
            f"min modulus  {g(self.min_modulus)}",
            f"eps_hat      {g(self.eps_hat)}",
            f"ker dims     ker T = {self.kernel_dims[0]}, ker T* = {self.kernel_dims[1]}",
        ]
        if self.witness is not None:
            lines.append(f"witness      defect {g(self.witness['defect'])}")
        lines.append(f"dist to CV   {g(self.dist_cv)}")
        lines.append(f"lambda*      {g(self.lambda_star)}")
        if self.stability is not None:
            s = self.stability
            lines.append(
                f"stability    gap {g(s['gap'])} <= {g(s['rhs_improved'])} (improved), "
                f"{g(s['rhs_turnsek'])} (earlier)"
            )
        if self.oracle is not None:
            o = self.oracle
            lines.append(
                f"oracle       {g(o['estimate'])} ({o['samples']} samples, seed {o['seed']}, "
                f"diff {g(o['agreement'])})"
            )
        for w in self.warnings:
            lines.append(f"warning      {w}")
        return "\n".join(lines)


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise InternalInconsistency(what)


def build_report(
    T: OperatorMatrix,
    path: str = "-",
    rank_tol: float | None = None,
    oracle: dict | None = None,
) -> AopReport:
    """Assemble the full analysis, re-checking every cross-formula identity."""
    a = T.entries
    rows, cols = a.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    t, m = operator_norm(a), min_modulus(a)
    rep = AopReport(
        path=str(path), rows=rows, cols=cols, field=T.field,
        norm=t, min_modulus=m, eps_hat=None,
        kernel_dims=list(kernel_dims(a, rank_tol)),
    )
    if cols < 2:
        rep.eps_hat = None
        rep.warnings.append("eps_hat needs a domain of dimension >= 2")
    else:
        e = eps_hat(a)
        rep.eps_hat = e.value
        if t > 0:
            w = witness_pair(a, rank_tol)
            _require(abs(w.defect - e.value) <= 1e-9, "witness defect differs from eps_hat")
            rep.witness = {"x": _vec(w.x), "y": _vec(w.y), "defect": w.defect}
        if t > 0 and e.complement > 0:
            back = min_modulus_from_eps(e, t)
            _require(abs(back - m) <= 1e-12 * t, "min modulus round trip failed")

    if cols > rows:
        rep.warnings.append(
            f"nearness unavailable: no {rows}x{cols} isometry exists (cols > rows)"
        )
        return rep

    near = dist_to_scalar_isometries(a, rank_tol)
    rep.dist_cv = near.distance
    rep.lambda_star = near.lambda_star
    scale = max(t, 1.0)
    _require(abs(near.achieved - near.distance) <= 1e-10 * scale, "nearest operator misses the distance")
    if cols >= 2:
        _require(abs(distance_via_eps_hat(a) - near.distance) <= 1e-12 * scale,
                 "distance forms disagree")
    if cols >= 2 and t > 0 and m > rank_tol * t:
        e = eps_hat(a)
        lam_scale = min(t, near.lambda_star)
        rhs_i = delta_improved(e) * lam_scale
        gap = near.achieved
        _require(gap <= rhs_i + 1e-10 * scale, "stability bound violated")
        rep.stability = {
            "gap": gap,
            "rhs_improved": rhs_i,
            "rhs_turnsek": delta_turnsek(e) * lam_scale,
            "holds_improved": True,
        }
    if oracle is not None:
        rep.oracle = oracle
    return rep


def _load(path: str) -> OperatorMatrix:
    if path == "-":
        return parse_matrix(sys.stdin.read())
    return read_matrix(path)


def cmd_analyze(args) -> int:
    T = _load(args.path)
    oracle = None
    if args.oracle and T.cols >= 2:
        est = estimate_eps_hat(T.entries, args.samples, args.refine, seed=args.seed)
        oracle = {
            "estimate": est.value,
            "samples": est.samples,
            "refine": est.refine_iters,
            "seed": est.seed,
            "agreement": abs(est.value - eps_hat(T.entries).value),
        }
    rep = build_report(T, args.path, args.rank_tol, oracle=oracle)
    if args.format == "json":
        print(rep.to_json())
    else:
        print(rep.to_text())
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    T = _load(args.path)
    a = T.entries
    if a.shape[1] < 2:
        print("error: verify needs a domain of dimension >= 2", file=sys.stderr)
        return EXIT_SHAPE
    formula = eps_hat(a).value
    est = estimate_eps_hat(a, args.samples, args.refine, seed=args.seed)
    diff = abs(est.value - formula)
    sound = est.value <= formula + 1e-9
    ok = sound and diff <= args.tol
    result: dict[str, Any] = {
        "eps_hat_formula": formula,
        "eps_hat_oracle": est.value,
        "diff": diff,
        "samples": est.samples,
        "refine": est.refine_iters,
        "seed": est.seed,
        "tol": args.tol,
    }
    if a.shape == (2, 2) and not np.iscomplexobj(a):
        d = dist_to_scalar_isometries(a).distance
        b = brute_force_dist_2x2(a)
        result.update(dist_formula=d, dist_brute_2x2=b, dist_diff=abs(b - d))
        ok = ok and abs(b - d) <= args.tol
    result["passed"] = ok
    if args.format == "json":
        print(json.dumps(result, indent=2))
    else:
        for k, v in result.items():
            print(f"{k:<16} {v:.12g}" if isinstance(v, float) else f"{k:<16} {v}")
    if not ok:
        reason = "oracle exceeds closed form" if not sound else f"difference {diff:.3g} > tol {args.tol:g}"
        if "dist_diff" in result and result["dist_diff"] > args.tol:
            reason += f"; distance difference {result['dist_diff']:.3g}"
        print(f"verification failed: {reason}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_nearest(args) -> int:
    T = _load(args.path)
    a = T.entries
    rows, cols = a.shape
    if cols > rows:
        print(f"error: no {rows}x{cols} isometry exists (cols > rows)", file=sys.stderr)
        return EXIT_SHAPE
    near = dist_to_scalar_isometries(a, args.rank_tol)
    S = near.nearest
    _require(abs(operator_norm(a - S) - near.distance) <= 1e-10 * max(1.0, near.lambda_star),
             "nearest operator does not attain the distance")
    text = format_matrix(OperatorMatrix(S))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"distance {near.distance:.12g}, lambda* {near.lambda_star:.12g}", file=sys.stderr)
    return EXIT_OK


def _parse_scalar(s: str) -> complex | float:
    s = s.strip().replace("i", "j")
    z = complex(s)
    return z.real if z.imag == 0 else z


def cmd_repro(args) -> int:
    name = args.name
    if name not in _repro.REPRO_NAMES:
        print(f"error: unknown repro {name!r}; choose from {', '.join(_repro.REPRO_NAMES)}",
              file=sys.stderr)
        return EXIT_UNKNOWN_REPRO
    if name == "example-3.1":
        tab = _repro.example_3_1_table(args.n_max, seed=args.seed, oracle_samples=args.samples)
    elif name == "example-3.13":
        grid = np.linspace(0.0, 0.5, args.grid) if args.grid else None
        tab = _repro.example_3_13_sweep(_parse_scalar(args.lam), grid, args.trunc_dim)
    elif name == "delta-comparison":
        tab = _repro.delta_comparison(_repro.default_eps_grid(args.grid or 99))
    else:
        tab = _repro.convergence_demo(args.n_max, seed=args.seed)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        Path(str(out) + ".csv").write_text(tab.to_csv(), newline="")
        Path(str(out) + ".json").write_text(tab.to_json())
    elif args.format == "json":
        print(tab.to_json())
    else:
        sys.stdout.write(tab.to_csv())
    failed = [c for c in tab.checks if not c.passed]
    for c in tab.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.label}", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="random seed (default 0)")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS,
                        help="output format (default text)")
    common.add_argument("--rank-tol", type=_positive_float, default=argparse.SUPPRESS,
                        help="relative numerical rank tolerance (default max(rows, cols) * eps)")

    p = _Parser(
        prog="aop",
        description="eps-hat, minimum modulus and nearest scalar isometries for dense matrices",
        parents=[common],
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="norm, min modulus, eps_hat, distances")
    a.add_argument("path", help="matrix file, or - for stdin")
    a.add_argument("--oracle", action="store_true", help="also run the brute-force eps_hat estimate")
    a.add_argument("--samples", type=int, default=10_000)
    a.add_argument("--refine", type=int, default=200)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", parents=[common], help="cross-check closed forms by brute force")
    v.add_argument("path")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--refine", type=int, default=200)
    v.add_argument("--tol", type=_positive_float, default=1e-3)
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("nearest", parents=[common], help="write the nearest scalar multiple of an isometry")
    n.add_argument("path")
    n.add_argument("--out", help="write to this file instead of stdout")
    n.set_defaults(func=cmd_nearest)

    r = sub.add_parser("repro", parents=[common], help="regenerate a worked example as CSV/JSON")
    r.add_argument("name", help=", ".join(_repro.REPRO_NAMES))
    r.add_argument("--n-max", type=int, default=10, help="rows for example-3.1 / convergence-3.10")
    r.add_argument("--grid", type=int, default=0, help="grid points (delta-comparison, example-3.13)")
    r.add_argument("--trunc-dim", type=int, default=8)
    r.add_argument("--lam", default="1", help="shift scale for example-3.13, e.g. 2 or 1+1i")
    r.add_argument("--samples", type=int, default=10_000, help="oracle samples for example-3.1")
    r.add_argument("--out", help="path stem; writes <stem>.csv and <stem>.json")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    for name, default in (("seed", 0), ("format", "text"), ("rank_tol", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except AopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
