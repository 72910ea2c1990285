"""Command-line interface.

Exit codes: 0 success, 1 a statistical verdict or self-test failed,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from . import gamma as G
from . import harmonic as H
from . import kailath_segall as KS
from . import sim
from .checks import run_selftest
from .models import ModelConfigError, load_model_config, model_moment, parse_model
from .polycore import JSON_SCHEMA_VERSION, SparsePoly, gamma_names, xt_names

SEED_ENV = "LEVYHARMONIC_SEED"
DEFAULT_SEED = 20080101

__all__ = ["CliResult", "dispatch", "load_model_config", "main"]


class UsageError(Exception):
    pass


def _render(poly: SparsePoly, fmt: str, names, **meta) -> str:
    if fmt == "plain":
        return poly.to_plain(names)
    if fmt == "latex":
        return poly.to_latex(names)
    variables = {str(v): names(v) for v in sorted(poly.variables())}
    return poly.to_json(**meta, variables=variables)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from exc


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"cannot parse time grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="levyharmonic",
        description="Time-space harmonic polynomials of Lévy processes.",
    )
    p.add_argument("--max-order", type=int, default=G.DEFAULT_MAX_ORDER,
                   help="largest degree accepted (default %(default)s)")
    p.add_argument("--output", "-o", help="write the result to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("plain", "latex", "json"), default="plain")

    sp = sub.add_parser("gamma", help="print the cumulant-to-moment polynomial Gamma_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--route", choices=("recurrence", "partition", "series"), default="recurrence")
    fmt(sp)

    sp = sub.add_parser("harmonic", help="print Q_n(x, t) for a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--route", choices=H.ROUTES, default="closed")
    fmt(sp)

    sp = sub.add_parser("ks", help="print the Kailath-Segall polynomial P_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--route", choices=("recurrence", "gamma"), default="recurrence")
    fmt(sp)

    sp = sub.add_parser("moments", help="print E[X_t^r] as a polynomial in t")
    sp.add_argument("--model", required=True)
    sp.add_argument("--r", type=int, required=True)
    fmt(sp)

    def mc(sp):
        sp.add_argument("--model", required=True)
        sp.add_argument("--n-paths", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--confidence", type=float, default=3.0,
                        help="pass if |estimate - target| <= confidence * SE")
        sp.add_argument("--csv", help="write per-path statistics to this CSV file")

    sp = sub.add_parser("simulate", help="simulate paths and summarize X_t on a grid")
    mc(sp)
    sp.add_argument("--t-grid", default="1.0")

    sp = sub.add_parser("verify", help="Monte Carlo verification")
    vsub = sp.add_subparsers(dest="check", required=True)
    vm = vsub.add_parser("martingale", help="E[Q_n(X_t,t)] = 0 and E[Q_n(X_t,t) - Q_n(X_s,s)] = 0")
    mc(vm)
    vm.add_argument("--n", type=int, required=True)
    vm.add_argument("--s", type=float, default=0.5)
    vm.add_argument("--t", type=float, default=1.0)
    vo = vsub.add_parser("orthogonality", help="E[P_t^(n) P_t^(m)] against its reference value")
    mc(vo)
    vo.add_argument("--n", type=int, required=True)
    vo.add_argument("--m", type=int, required=True)
    vo.add_argument("--t", type=float, default=1.0)

    sub.add_parser("selftest", help="run the exact identity suite (no randomness)")
    return p


def _sim_config(args, grid) -> sim.SimConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        return sim.SimConfig(
            model=parse_model(args.model),
            horizon=max(grid),
            grid=grid,
            n_paths=args.n_paths,
            seed=seed,
            confidence_multiplier=args.confidence,
            workers=args.workers,
        )
    except ValueError as exc:
        if isinstance(exc, ModelConfigError):
            raise
        raise UsageError(str(exc)) from exc


def _write_csv(path: str, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


def _verdicts_json(verdicts, **meta) -> str:
    return json.dumps(
        {"schema_version": JSON_SCHEMA_VERSION, **meta, "verdicts": [v.to_dict() for v in verdicts]},
        indent=2,
    )


def _run(args) -> tuple[int, str]:
    cmd = args.command
    if cmd == "gamma":
        build = {"recurrence": G.gamma_recurrence, "partition": G.gamma_partition,
                 "series": G.gamma_series}[args.route]
        return 0, _render(build(args.n), args.format, gamma_names, kind="gamma", n=args.n)
    if cmd == "harmonic":
        model = parse_model(args.model)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", H.MartingaleBoundWarning)
            q = H.q_route(model, args.n, args.route)
        for w in caught:
            print(f"levyharmonic: warning: {w.message}", file=sys.stderr)
        return 0, _render(q.poly, args.format, xt_names, kind="harmonic", model=model.name, n=args.n)
    if cmd == "ks":
        build = KS.ks_recurrence if args.route == "recurrence" else KS.ks_from_gamma
        return 0, _render(build(args.n), args.format, gamma_names, kind="kailath-segall", n=args.n)
    if cmd == "moments":
        model = parse_model(args.model)
        return 0, _render(model_moment(model, args.r), args.format, xt_names,
                          kind="moment", model=model.name, r=args.r)
    if cmd == "simulate":
        cfg = _sim_config(args, _grid(args.t_grid))
        paths = sim.simulate(cfg)
        if args.csv:
            header = ["path"] + [f"X({g:g})" for g in paths.grid]
            _write_csv(args.csv, header, [np.arange(paths.n_paths)] + list(paths.values.T))
        summary = {
            "schema_version": JSON_SCHEMA_VERSION,
            "model": cfg.model.name,
            "seed": cfg.seed,
            "n_paths": cfg.n_paths,
            "grid": paths.grid.tolist(),
            "mean": paths.values.mean(axis=0).tolist(),
            "variance": paths.values.var(axis=0, ddof=1).tolist() if cfg.n_paths > 1 else None,
        }
        return 0, json.dumps(summary, indent=2)
    if cmd == "verify":
        if args.check == "martingale":
            if not args.s < args.t:
                raise UsageError("need --s < --t")
            cfg = _sim_config(args, (args.s, args.t))
            paths = sim.simulate(cfg)
            verdicts = list(sim.mc_martingale_test(cfg, args.n, args.s, args.t, paths))
            if args.csv:
                qs = sim.evaluate_q(cfg.model, args.n, paths.values[:, 0], args.s)
                qt = sim.evaluate_q(cfg.model, args.n, paths.values[:, 1], args.t)
                _write_csv(args.csv, ["path", "Q(X_s,s)", "Q(X_t,t)"], [np.arange(paths.n_paths), qs, qt])
        else:
            cfg = _sim_config(args, (args.t,))
            paths = sim.simulate(cfg)
            verdicts = [sim.mc_orthogonality_test(cfg, args.n, args.m, args.t, paths)]
            if args.csv:
                top = max(args.n, args.m, 1)
                P = sim.compute_iterated_integrals(sim.compute_variations(paths, top), top)[:, :, 0]
                _write_csv(args.csv, ["path", f"P{args.n}", f"P{args.m}"],
                           [np.arange(paths.n_paths), P[args.n], P[args.m]])
        out = _verdicts_json(verdicts, model=cfg.model.name, seed=cfg.seed)
        return (0 if all(v.passed for v in verdicts) else 1), out
    if cmd == "selftest":
        results = list(run_selftest())
        text = "\n".join(str(r) for r in results)
        return (0 if all(r.passed for r in results) else 1), text
    raise UsageError(f"unknown command {cmd!r}")


class CliResult(NamedTuple):
    code: int
    text: str
    destination: str | None = None


def dispatch(argv: Sequence[str] | None = None) -> CliResult:
    """Run one command and return its exit code and rendered output.

    Usage and configuration errors come back as exit code 2 with a one-line
    diagnostic in place of the output.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CliResult(int(exc.code or 0), "")
    old_bound = G.max_order()
    try:
        G.set_max_order(args.max_order)
        code, text = _run(args)
    except (UsageError, ValueError, OSError) as exc:
        # ValueError covers model config, truncation, order-bound and sim errors
        return CliResult(2, f"levyharmonic: error: {exc}")
    finally:
        G.set_max_order(old_bound)
    return CliResult(code, text, args.output)


def main(argv: Sequence[str] | None = None) -> int:
    result = dispatch(argv)
    if result.code == 2:
        if result.text:
            print(result.text, file=sys.stderr)
    elif result.destination:
        with open(result.destination, "w", encoding="utf-8") as fh:
            fh.write(result.text + "\n")
    elif result.text:
        print(result.text)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
