"""Benchmark command line interface.

Runs one of the built-in traveling-wave problems (or a config-defined
problem) for a given basis size, fractional order, and list of output
times, and emits error tables or surface samples as CSV or aligned text.

Exit codes: 0 success, 2 configuration error, 3 solver divergence,
4 output I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .basis import (
    CollocationSet,
    OrthoBasis,
    build_basis,
    generate_collocation,
    generate_dense_sequence,
)
from .errors import ConfigError, DivergenceError
from .problem import ProblemSpec, example_problem, load_problem_config, rescale_to_reference
from .solver import Solution, error_norms, evaluate, solve


@dataclass(frozen=True)
class RunConfig:
    example: str                       # "ex1" | "ex2" | "custom"
    n: int = 6
    alphas: tuple[float, ...] = (0.9,)
    tau_list: tuple[float, ...] = (0.5,)
    zeta_grid: tuple[float, ...] = ()  # empty: derive {i/6} style grid from n
    out: Optional[str] = None
    fmt: str = "pretty"
    config_path: Optional[str] = None
    surface: Optional[int] = None
    seed_metadata: bool = False
    layout: str = "graded"             # "graded" | "tensor"
    passes: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        for a in self.alphas:
            if not 0.0 < a <= 1.0:
                raise ConfigError(f"alpha must lie in (0, 1], got {a}")
        for t in self.tau_list:
            if not 0.0 <= t <= 1.0:
                raise ConfigError(f"tau values must lie in [0, 1], got {t}")
        if self.fmt not in ("csv", "pretty"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.layout not in ("graded", "tensor"):
            raise ConfigError(f"unknown layout {self.layout!r}")


@dataclass(frozen=True)
class TableRow:
    zeta: float
    w_exact: float
    w_approx: float
    abs_error: float


def builtin_exact(example: int, point: tuple[float, float]) -> float:
    """Closed-form traveling-wave solutions of the two built-in problems."""
    z, t = point
    if not (0.0 <= z <= 1.0 and 0.0 <= t <= 1.0):
        raise ConfigError(f"point {point} outside the unit square")
    if example == 1:
        return 0.5 - 0.5 * math.tanh(0.25 * z + 0.375 * t)
    if example == 2:
        arg = 0.5 - 0.5 * math.tanh(z / 3.0 - 10.0 * t / 9.0)
        assert arg >= 0.0  # tanh < 1 everywhere
        return math.sqrt(arg)
    raise ConfigError(f"unknown example {example}")


def _problem(cfg: RunConfig, alpha: float) -> ProblemSpec:
    if cfg.example in ("ex1", "ex2"):
        return example_problem(int(cfg.example[-1]), alpha)
    if cfg.config_path is None:
        raise ConfigError("custom problem requires --config")
    return load_problem_config(cfg.config_path)


def _collocation(cfg: RunConfig) -> CollocationSet:
    if cfg.layout == "tensor":
        return generate_collocation(max(cfg.n - 1, 1), 1)
    return generate_dense_sequence(cfg.n)


def _solve(cfg: RunConfig, alpha: float) -> tuple[ProblemSpec, Solution]:
    spec = _problem(cfg, alpha)
    hp = rescale_to_reference(spec)
    basis = build_basis(hp, _collocation(cfg))
    sol, _ = solve(hp, basis, passes=cfg.passes)
    return spec, sol


def _zeta_grid(cfg: RunConfig) -> list[float]:
    if cfg.zeta_grid:
        return list(cfg.zeta_grid)
    return [i / cfg.n for i in range(1, cfg.n)]


def _metadata(cfg: RunConfig, alpha: float) -> list[str]:
    lines = [
        f"version={__version__}",
        f"example={cfg.example}",
        f"n={cfg.n}",
        f"alpha={alpha:g}",
        f"collocation={cfg.layout}"
        + ("" if cfg.layout == "tensor"
           else " (van der Corput bases 2/3, tau grading 3)"),
        f"passes={cfg.passes}",
    ]
    if cfg.seed_metadata:
        lines.append(f"numpy={np.__version__}")
        lines.append("rng=none (fully deterministic pipeline)")
    return lines


def run_table(cfg: RunConfig, alpha: float):
    """Error-table rows and (l2, linf) per output time, one basis/solve."""
    spec, sol = _solve(cfg, alpha)
    grid = _zeta_grid(cfg)
    if not grid:
        raise ConfigError("empty evaluation grid")
    out = []
    for tau in cfg.tau_list:
        rows = []
        for z in grid:
            approx = evaluate(sol, (z, tau))
            ex = spec.exact(z, tau) if spec.exact else math.nan
            rows.append(TableRow(z, ex, approx, abs(ex - approx)))
        if spec.exact:
            l2, linf, _ = error_norms(sol, spec.exact, tau, grid)
        else:
            l2 = linf = math.nan
        out.append((tau, rows, l2, linf))
    return out


def _format_table(cfg: RunConfig, alpha: float, tables) -> str:
    meta = _metadata(cfg, alpha)
    lines = []
    if cfg.fmt == "csv":
        lines += [f"# {m}" for m in meta]
        lines.append("tau,zeta,w_exact,w_approx,abs_error")
        for tau, rows, l2, linf in tables:
            for r in rows:
                lines.append(
                    f"{tau:.6f},{r.zeta:.6f},{r.w_exact:.6f},"
                    f"{r.w_approx:.6f},{r.abs_error:.6e}"
                )
            lines.append(f"# tau={tau:.6f} L2={l2:.6e} Linf={linf:.6e}")
    else:
        lines += meta
        for tau, rows, l2, linf in tables:
            lines.append("")
            lines.append(f"tau = {tau:g}")
            lines.append(f"{'zeta':>10} {'w_exact':>12} {'w_approx':>12} {'abs_error':>12}")
            for r in rows:
                lines.append(
                    f"{r.zeta:>10.5f} {r.w_exact:>12.6f} "
                    f"{r.w_approx:>12.6f} {r.abs_error:>12.4e}"
                )
            lines.append(f"L2 = {l2:.6e}   Linf = {linf:.6e}")
    return "\n".join(lines) + "\n"


def emit_surface(cfg: RunConfig, alpha: float, density: int) -> str:
    """CSV sample of exact/approximate solutions on a density x density
    uniform grid over the closed square (row-major)."""
    if density < 2:
        raise ConfigError(f"surface density must be >= 2, got {density}")
    spec, sol = _solve(cfg, alpha)
    lines = [f"# {m}" for m in _metadata(cfg, alpha)]
    lines.append("zeta,tau,w_exact,w_approx,error")
    coords = [i / (density - 1) for i in range(density)]
    for t in coords:
        for z in coords:
            approx = evaluate(sol, (z, t))
            ex = spec.exact(z, t) if spec.exact else math.nan
            lines.append(f"{z:.6f},{t:.6f},{ex:.6f},{approx:.6f},{ex - approx:.6e}")
    return "\n".join(lines) + "\n"


def _out_path(cfg: RunConfig, alpha: float) -> Optional[str]:
    if cfg.out is None:
        return None
    if len(cfg.alphas) == 1:
        return cfg.out
    stem, dot, ext = cfg.out.rpartition(".")
    if not dot:
        return f"{cfg.out}_alpha{alpha:g}"
    return f"{stem}_alpha{alpha:g}.{ext}"


def _parse_args(argv) -> RunConfig:
    ap = argparse.ArgumentParser(
        prog="tfbh-bench",
        description="Kernel-collocation benchmark for the time-fractional "
                    "Burgers-Huxley equation",
    )
    ap.add_argument("--example", choices=("1", "2"))
    ap.add_argument("--config", dest="config_path")
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--alpha", default="0.9", help="fractional order, comma list allowed")
    ap.add_argument("--tau", default="0.5", help="comma list of output times")
    ap.add_argument("--grid", default=None,
                    help="evaluation grid: point count or comma list of zeta values")
    ap.add_argument("--out", default=None)
    ap.add_argument("--format", dest="fmt", choices=("csv", "pretty"), default="pretty")
    ap.add_argument("--surface", type=int, default=None, metavar="DENSITY")
    ap.add_argument("--seed-metadata", action="store_true")
    ap.add_argument("--layout", choices=("graded", "tensor"), default="graded")
    ap.add_argument("--passes", type=int, default=1)
    ns = ap.parse_args(argv)

    if ns.example is None and ns.config_path is None:
        raise ConfigError("one of --example or --config is required")
    try:
        alphas = tuple(float(x) for x in ns.alpha.split(","))
        taus = tuple(float(x) for x in ns.tau.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad numeric list: {exc}") from exc
    grid: tuple[float, ...] = ()
    if ns.grid is not None:
        try:
            if "," in ns.grid:
                grid = tuple(float(x) for x in ns.grid.split(","))
            else:
                count = int(ns.grid)
                grid = tuple(i / (count + 1) for i in range(1, count + 1))
        except ValueError as exc:
            raise ConfigError(f"bad --grid value {ns.grid!r}") from exc
    example = f"ex{ns.example}" if ns.example else "custom"
    return RunConfig(
        example=example, n=ns.n, alphas=alphas, tau_list=taus, zeta_grid=grid,
        out=ns.out, fmt=ns.fmt, config_path=ns.config_path, surface=ns.surface,
        seed_metadata=ns.seed_metadata, layout=ns.layout, passes=ns.passes,
    )


def main(argv=None) -> int:
    try:
        cfg = _parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        outputs = []
        for alpha in cfg.alphas:
            if cfg.surface is not None:
                text = emit_surface(cfg, alpha, cfg.surface)
            else:
                text = _format_table(cfg, alpha, run_table(cfg, alpha))
            outputs.append((_out_path(cfg, alpha), text))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: solver diverged at iteration {exc.iteration}: {exc}",
              file=sys.stderr)
        return 3
    try:
        for path, text in outputs:
            if path is None:
                sys.stdout.write(text)
            else:
                with open(path, "w") as fh:
                    fh.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
