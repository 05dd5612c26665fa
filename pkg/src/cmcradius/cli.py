"""Command-line entry point: bound / cap / mesh / sweep subcommands.

Quantities are unit-normalized: curvatures in 1/length^2, mean curvature
in 1/length, distances in length.  Exit codes: 0 success, 1 failures or
internal errors, 2 hypothesis violations only, 64 usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import __version__, algebra, bounds, discrete, mesh, spaceforms
from .errors import (
    CmcRadiusError,
    EmptyIntervalError,
    HypothesisViolation,
    NoApplicableBound,
)
from .report import FORMATS, SweepReport, emit_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_HYPOTHESIS = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cmcradius", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate the optimized distance bound")
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--delta", type=float, required=True)
    p_bound.add_argument("--H", type=float, required=True)
    p_bound.add_argument("--K", type=float, default=0.0, help="ambient sectional curvature lower bound")
    p_bound.add_argument("--S", type=float, default=None, help="ambient scalar curvature lower bound (n=2)")

    p_cap = sub.add_parser("cap", help="check the bound against the spectral cap oracle")
    p_cap.add_argument("--n", type=int, required=True)
    p_cap.add_argument("--kappa", type=float, required=True)
    p_cap.add_argument("--H", type=float, required=True)
    p_cap.add_argument("--delta", type=float, required=True)
    p_cap.add_argument("--tol", type=float, default=1e-6)

    p_mesh = sub.add_parser("mesh", help="discrete verification on triangulated caps")
    p_mesh.add_argument("--kappa", type=float, required=True)
    p_mesh.add_argument("--H", type=float, required=True)
    p_mesh.add_argument("--rho", type=float, required=True)
    p_mesh.add_argument("--delta", type=float, required=True)
    p_mesh.add_argument("--levels", type=str, default="3,4,5")
    p_mesh.add_argument("--tol", type=float, default=1e-10)
    p_mesh.add_argument("--mesh-out", type=str, default=None, help="export finest mesh (plain text)")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep from a config file")
    p_sweep.add_argument("--config", type=str, required=True)
    p_sweep.add_argument("--seed", type=int, default=0)

    for p in (p_bound, p_cap, p_mesh, p_sweep):
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", type=str, default="table", choices=FORMATS)
    return parser


def parse_config(path: str) -> dict[str, list[str]]:
    """Flat key-value config; repeated keys accumulate into grids."""
    grids: dict[str, list[str]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            grids.setdefault(key, []).append(value)
    return grids


def _bound_row(n: int, delta: float, H: float, K: float, S: float | None) -> dict:
    row = {"n": n, "delta": delta, "H": H, "K": K, "S": S}
    try:
        res = bounds.best_bound(bounds.BoundInput(n=n, delta=delta, H=H, K_inf=K, S_inf=S))
    except (NoApplicableBound, HypothesisViolation, EmptyIntervalError) as exc:
        row.update(k_star=None, A=None, B=None, c=None, source=None,
                   status="not-applicable", reason=str(exc))
        return row
    row.update(k_star=res.k_star, A=res.A, B=res.B, c=res.c, source=res.source,
               status="pass", reason="")
    return row


def _cap_row(n: int, kappa: float, H: float, delta: float, tol: float) -> dict:
    rec = spaceforms.verify_cap_bound(n, kappa, H, delta, tol=tol)
    if not rec.applicable:
        status = "not-applicable"
    else:
        status = "pass" if rec.passed else "fail"
    return {
        "n": rec.n, "kappa": rec.kappa, "H": rec.H, "delta": rec.delta,
        "rho_star": rec.rho_star, "c_best": rec.c_best, "ratio": rec.ratio,
        "source": rec.source, "status": status, "reason": rec.reason,
    }


def _mesh_rows(kappa, H, rho, delta, levels, tol) -> tuple[list[dict], dict]:
    rep = discrete.mesh_verify(kappa, H, rho, delta, levels, tol=tol)
    rows = []
    for lv in rep.levels:
        status = "pass"
        if lv.bound_ok is False:
            status = "fail"
        rows.append({
            "kappa": kappa, "H": H, "rho": rho, "delta": delta, "level": lv.level,
            "vertices": lv.num_vertices, "max_edge": lv.max_edge, "lambda1": lv.lambda1,
            "radius": lv.radius, "verdict": lv.verdict, "oracle_error": lv.oracle_error,
            "status": status,
        })
    meta = {
        "oracle_lambda1": rep.oracle_lambda1,
        "c_best": rep.c_best,
        "convergence_order": rep.convergence_order,
        "agrees_with_oracle": rep.agrees_with_oracle,
    }
    return rows, meta


def _algebra_rows(ns: list[int], samples: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for n in ns:
        interval = bounds.k_interval(n, 0.0)
        min_crude = min_rem = float("inf")
        for _ in range(samples):
            phi = algebra.TracelessMatrix.random(n, rng)
            k = float(interval.lo) + rng.random() * float(interval.width)
            min_crude = min(min_crude, algebra.check_traceless_crude(phi))
            min_rem = min(min_rem, algebra.check_potential_remainder(phi, k, 0.0))
        ok = min_crude >= -1e-12 and min_rem >= -1e-12
        rows.append({
            "n": n, "samples": samples, "min_crude_slack": min_crude,
            "min_remainder": min_rem, "status": "pass" if ok else "fail",
        })
    return rows


def _floats(grids: dict, key: str, default=None) -> list[float]:
    if key not in grids:
        if default is None:
            raise UsageError(f"config is missing required key {key!r}")
        return default
    return [float(v) for v in grids[key]]


def _run_sweep(args) -> SweepReport:
    grids = parse_config(args.config)
    mode = grids.get("mode", ["cap"])[0]
    metadata = {"tool": "cmcradius", "version": __version__, "mode": mode, "seed": args.seed}
    report = SweepReport(kind=f"sweep-{mode}", metadata=metadata)
    if mode == "cap":
        ns = [int(v) for v in grids.get("n", ["2"])]
        kappas = _floats(grids, "kappa", [0.0])
        deltas = _floats(grids, "delta", [0.0])
        hs = _floats(grids, "H")
        tol = _floats(grids, "tol", [1e-6])[0]
        cases = sorted(itertools.product(ns, kappas, deltas, hs))
        report.rows = [_cap_row(n, kappa, H, delta, tol) for n, kappa, delta, H in cases]
    elif mode == "bound":
        ns = [int(v) for v in grids.get("n", ["2"])]
        deltas = _floats(grids, "delta", [0.0])
        hs = _floats(grids, "H")
        ks = _floats(grids, "K", [0.0])
        ss = _floats(grids, "S") if "S" in grids else [None]
        cases = sorted(itertools.product(ns, deltas, hs, ks, ss), key=lambda t: tuple(
            -1.0 if x is None else float(x) for x in t))
        report.rows = [_bound_row(n, d, H, K, S) for n, d, H, K, S in cases]
    elif mode == "algebra":
        ns = [int(v) for v in grids.get("n", ["2", "3", "4"])]
        samples = int(grids.get("samples", ["1000"])[0])
        report.rows = _algebra_rows(sorted(ns), samples, args.seed)
    else:
        raise UsageError(f"unknown sweep mode {mode!r} (expected cap, bound or algebra)")
    return report


def _exit_code(report: SweepReport) -> int:
    s = report.summary
    if s["fail"] > 0:
        return EXIT_FAIL
    if s["pass"] == 0 and s["not_applicable"] > 0:
        return EXIT_HYPOTHESIS
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        metadata = {"tool": "cmcradius", "version": __version__}
        if args.command == "bound":
            report = SweepReport(kind="bound", metadata=metadata)
            report.rows = [_bound_row(args.n, args.delta, args.H, args.K, args.S)]
        elif args.command == "cap":
            report = SweepReport(kind="cap", metadata=metadata)
            report.rows = [_cap_row(args.n, args.kappa, args.H, args.delta, args.tol)]
        elif args.command == "mesh":
            levels = [int(v) for v in args.levels.split(",") if v.strip()]
            rows, meta = _mesh_rows(args.kappa, args.H, args.rho, args.delta, levels, args.tol)
            metadata = dict(metadata, **meta)
            report = SweepReport(kind="mesh", metadata=metadata, rows=rows)
            if args.mesh_out:
                finest = mesh.build_cap_mesh(args.kappa, args.H, args.rho, max(levels))
                mesh.save_mesh(finest, args.mesh_out)
        else:
            report = _run_sweep(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CmcRadiusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    text = emit_report(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return _exit_code(report)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
