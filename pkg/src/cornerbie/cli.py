"""Command line driver: solve, table, angle-sweep."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from typing import Optional

import numpy as np

from .errors import ConfigError, CornerBieError, GeometryError, ParameterError
from .harness import (
    EXAMPLE_NAMES,
    RunConfig,
    angle_sweep,
    example_config,
    make_exact_solution,
    run_example,
    write_sweep_csv,
    write_table_csv,
)

__all__ = ["main"]


def _parse_phi(text: str) -> float:
    """Angles accept plain floats or multiples of pi like '5pi/3' or '1.5pi'."""
    t = text.strip().lower().replace(" ", "")
    if "pi" in t:
        head, _, tail = t.partition("pi")
        value = float(head) if head not in ("", "+", "-") else float(head + "1")
        value *= math.pi
        if tail.startswith("/"):
            value /= float(tail[1:])
        elif tail:
            raise ConfigError(f"cannot parse angle {text!r}")
        return value
    return float(t)


def _load_points(path: str):
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
        return tuple((float(p[0]), float(p[1])) for p in data)
    except json.JSONDecodeError:
        pts = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            x, y = line.split()[:2]
            pts.append((float(x), float(y)))
        if not pts:
            raise ConfigError(f"no evaluation points found in {path}")
        return tuple(pts)


def _config_from_json(path: str) -> RunConfig:
    with open(path) as fh:
        raw = json.load(fh)
    sol_raw = raw.pop("solution", None)
    domain = raw.pop("domain", None)
    if domain is None:
        raise ConfigError("config JSON needs a 'domain' field")
    base = example_config(domain) if domain in EXAMPLE_NAMES and not raw.get("vertices") else None
    kwargs = {}
    if sol_raw is not None:
        params = {k: v for k, v in sol_raw.items() if k != "name"}
        kwargs["solution"] = make_exact_solution(sol_raw["name"], **params)
    for key in ("phi", "c", "eps", "delta", "M", "N"):
        if key in raw:
            kwargs[key] = raw[key]
    if "pairs" in raw:
        kwargs["pairs"] = tuple((int(m), int(n)) for m, n in raw["pairs"])
    if "points" in raw:
        kwargs["points"] = tuple((float(p[0]), float(p[1])) for p in raw["points"])
    if "vertices" in raw:
        kwargs["vertices"] = tuple((float(v[0]), float(v[1])) for v in raw["vertices"])
    if base is not None:
        return replace(base, **kwargs)
    required = ("solution", "pairs", "c", "eps", "delta", "points")
    missing = [k for k in required if k not in kwargs]
    if missing:
        raise ConfigError(f"config JSON missing fields: {missing}")
    return RunConfig(domain=domain, phi=kwargs.pop("phi", None), **kwargs)


def _resolve_config(args) -> RunConfig:
    if args.config:
        cfg = _config_from_json(args.config)
    elif args.example:
        cfg = example_config(args.example)
    else:
        raise ConfigError("provide --example or --config")
    overrides = {}
    if args.phi is not None:
        overrides["phi"] = _parse_phi(args.phi)
    if args.c is not None:
        overrides["c"] = args.c
    if args.epsilon is not None:
        overrides["eps"] = args.epsilon
    if args.delta is not None:
        overrides["delta"] = args.delta
    if args.rhs_M is not None:
        overrides["M"] = args.rhs_M
    if args.outer_N is not None:
        overrides["N"] = args.outer_N
    if args.points is not None:
        overrides["points"] = _load_points(args.points)
    if getattr(args, "mu", None) is not None or getattr(args, "nu", None) is not None:
        if args.mu is None or args.nu is None:
            raise ConfigError("--mu and --nu must be given together")
        overrides["pairs"] = ((args.mu, args.nu),)
    return replace(cfg, **overrides) if overrides else cfg


def _add_common(sub):
    sub.add_argument("--example", choices=EXAMPLE_NAMES)
    sub.add_argument("--config", help="JSON run configuration")
    sub.add_argument("--phi", help="corner angle (e.g. '5pi/3' or 5.235987)")
    sub.add_argument("--mu", type=int)
    sub.add_argument("--nu", type=int)
    sub.add_argument("--c", type=float)
    sub.add_argument("--epsilon", type=float)
    sub.add_argument("--delta", type=float)
    sub.add_argument("--rhs-M", dest="rhs_M", type=int)
    sub.add_argument("--outer-N", dest="outer_N", type=int)
    sub.add_argument("--points", help="file with evaluation points (JSON or 'x y' lines)")
    sub.add_argument("--out", help="output CSV path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cornerbie",
        description="Exterior Neumann Laplace solver on planar corner domains",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("solve", "run a single (mu, nu) discretization and report point values"),
        ("table", "run a (mu, nu) sweep and write an error/condition table"),
        ("angle-sweep", "condition number across a corner-angle grid"),
    ):
        sub = subs.add_parser(name, help=desc)
        _add_common(sub)
        if name == "angle-sweep":
            sub.add_argument("--phi-grid", help="comma-separated angle list, e.g. '1.1pi,1.2pi'")
    return parser


def _cmd_solve(args) -> int:
    cfg = _resolve_config(args)
    if len(cfg.pairs) != 1:
        cfg = _replace_pairs(cfg, (cfg.pairs[-1],))
    rows = run_example(cfg)
    row = rows[0]
    if row.failed:
        print(f"row (mu={row.mu}, nu={row.nu}) failed: {row.error_message}", file=sys.stderr)
        return 3
    print(f"domain={cfg.domain} mu={row.mu} nu={row.nu} cond={row.cond:.4f}")
    for p, e in zip(cfg.points, row.errors):
        print(f"  point ({p[0]:g}, {p[1]:g}): |u - u_mN| = {e:.6e}")
    if args.out:
        write_table_csv(rows, args.out)
    return 0


def _replace_pairs(cfg: RunConfig, pairs) -> RunConfig:
    return replace(cfg, pairs=pairs)


def _cmd_table(args) -> int:
    cfg = _resolve_config(args)
    rows = run_example(cfg)
    for row in rows:
        if row.failed:
            print(f"row (mu={row.mu}, nu={row.nu}) failed: {row.error_message}",
                  file=sys.stderr)
        else:
            cells = " ".join(f"{e:.3e}" for e in row.errors)
            print(f"mu={row.mu:4d} nu={row.nu:4d} errors: {cells} cond={row.cond:.4f}")
    if args.out:
        write_table_csv(rows, args.out)
    if all(row.failed for row in rows):
        return 3
    return 0


def _cmd_angle_sweep(args) -> int:
    if not args.example:
        raise ConfigError("angle-sweep needs --example")
    if not args.phi_grid:
        raise ConfigError("angle-sweep needs --phi-grid")
    phis = [_parse_phi(tok) for tok in args.phi_grid.split(",") if tok.strip()]
    base = example_config(args.example) if args.example != "triangle" else None
    if base is None:
        raise ConfigError("angle sweeps need a parametric family, not the triangle")
    mu = args.mu if args.mu is not None else 16
    nu = args.nu if args.nu is not None else 64
    eps = args.epsilon if args.epsilon is not None else base.eps
    points = angle_sweep(args.example, phis, mu, nu, c=args.c, eps=eps, delta=args.delta)
    for pt in points:
        if pt.error_message:
            print(f"phi={pt.phi:.6f}: failed: {pt.error_message}", file=sys.stderr)
        else:
            print(f"phi={pt.phi:.6f} cond={pt.cond:.4f}")
    if args.out:
        write_sweep_csv(points, args.out)
    if all(pt.error_message for pt in points):
        return 3
    return 0


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    np.seterr(divide="raise", invalid="raise", over="raise")
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "table":
            return _cmd_table(args)
        return _cmd_angle_sweep(args)
    except (ConfigError, ParameterError, GeometryError, OSError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (CornerBieError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
