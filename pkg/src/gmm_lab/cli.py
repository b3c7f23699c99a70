"""Command-line entry point.

Three subcommands:

* theory    closed-form tables over a rho grid (limits, variance
            ingredients, estimator variances);
* simulate  the Monte Carlo experiment tables (mean-std, var-check,
            mse, g1-check), written to --out as CSV;
* tail-ratio  the heavy-tail negligibility diagnostic over a t grid.

CSV conventions: UTF-8, comma separated, LF line endings, one fixed
header per subcommand (consumers parse by column name), numbers in
shortest round-trip decimal form, infinite markers as the literal
``inf``, inapplicable fields empty. Identical command lines, seed
included, produce byte-identical files whatever --workers says.

Exit codes: 0 success, 1 usage error, 2 regime or validation error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import re
import sys
import time
from typing import Optional, Sequence, TextIO

from .errors import GmmLabError, InputError, RegimeError
from .montecarlo import Experiment, ExperimentConfig, SimResult, run_experiment
from .theory import (
    EllipticalModel,
    Gaussian,
    Mixing,
    StudentT,
    asymptotic_limit,
    cosine_correlation_variance,
    gmm_asymptotic_variance,
    gmm_correlation_variance,
    gmm_log_rate_variance,
    single_pair_mean,
    tail_ratio,
    variance_ingredients,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGIME = 2
EXIT_IO = 3

# Values of |rho| at or beyond this are treated as the exact endpoints,
# which the simulate grids drop unless --include-endpoints is given.
_ENDPOINT_TOL = 1e-12

SIM_COLUMNS = (
    "experiment",
    "nu",
    "rho",
    "sigma",
    "n",
    "mean_g",
    "std_g",
    "f1",
    "finf",
    "nvar_emp",
    "nvar_theory",
    "mse_g",
    "mse_c",
    "var_rho_g_theory",
    "reps",
    "seed",
    "degenerate_count",
)

THEORY_COLUMNS = (
    "nu",
    "rho",
    "sigma",
    "f1",
    "finf",
    "v",
    "h",
    "nvar_theory",
    "log_rate_theory",
    "var_rho_g_theory",
    "cosine_factor",
)

TAIL_COLUMNS = ("nu", "t", "ratio")

# Desk-scale presets shrink repetitions and grids so a full table lands
# in CI-friendly time; the full presets mirror the reported experiment
# designs and are meant for long unattended runs.
PRESETS = {
    "fig1": {
        "experiment": Experiment.MEAN_STD,
        "nu": "3,2,1,0.5",
        "n_list": "1,10,100,1000,10000",
        "rho_grid": "-0.99:0.99:0.01",
        "reps": 10000,
    },
    "fig1-small": {
        "experiment": Experiment.MEAN_STD,
        "nu": "3,2,1,0.5",
        "n_list": "1,10,100,1000",
        "rho_grid": "-0.9:0.9:0.1",
        "reps": 1000,
    },
    "fig2": {
        "experiment": Experiment.VAR_CHECK,
        "nu": "2.5,3,4,5",
        "n_list": "10,100,1000,10000",
        "rho_grid": "-0.99:0.99:0.01",
        "reps": 10000,
    },
    "fig2-small": {
        "experiment": Experiment.VAR_CHECK,
        "nu": "2.5,3,4,5",
        "n_list": "10,100,1000",
        "rho_grid": "-0.8:0.8:0.2",
        "reps": 1000,
    },
    "fig3": {
        "experiment": Experiment.MSE_COMPARE,
        "nu": "2.5,3,4,4.5",
        "n_list": "100,1000,10000",
        "rho_grid": "-0.99:0.99:0.01",
        "reps": 10000,
    },
    "fig3-small": {
        "experiment": Experiment.MSE_COMPARE,
        "nu": "2.5,3,4,4.5",
        "n_list": "100,1000",
        "rho_grid": "-0.9:0.9:0.1",
        "reps": 1000,
    },
    "fig4": {
        "experiment": Experiment.MSE_COMPARE,
        "nu": "5,6,8,10,inf",
        "n_list": "100,1000,10000",
        "rho_grid": "-0.99:0.99:0.01",
        "reps": 10000,
    },
    "fig4-small": {
        "experiment": Experiment.MSE_COMPARE,
        "nu": "5,6,8,10,inf",
        "n_list": "100,1000",
        "rho_grid": "-0.9:0.9:0.1",
        "reps": 1000,
    },
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems on our exit code and lets
    grid arguments start with a minus sign (-1:1:0.5, -0.8,-0.4,0)."""

    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        # Anything shaped like a negative number leading a grid or list
        # is a value, never an option; no option here starts with -<digit>.
        self._negative_number_matcher = re.compile(r"^-\d|^-\.\d")

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def _strip_dust(value: float) -> float:
    """Round away accumulated float dust so grid values like
    0.30000000000000004 print as 0.3."""
    return float(f"{value:.12g}")


def parse_grid(text: str) -> list[float]:
    """A real grid: either comma-separated values or start:stop:step
    with both endpoints included (within half a step)."""
    text = text.strip()
    if not text:
        raise InputError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"grid ranges take start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise InputError(f"bad grid range {text!r}") from exc
        if step <= 0.0:
            raise InputError(f"grid step must be positive, got {step}")
        if stop < start:
            raise InputError(f"grid stop lies before start in {text!r}")
        count = int(math.floor((stop - start) / step + 0.5))
        values = [_strip_dust(start + i * step) for i in range(count + 1)]
        return [v for v in values if v <= stop + step / 2.0]
    try:
        return [_strip_dust(float(p)) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InputError(f"bad grid list {text!r}") from exc


def parse_counts(text: str) -> list[int]:
    """Comma-separated positive integer list, e.g. sample sizes."""
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InputError(f"bad count list {text!r}") from exc
    if not values or any(v < 1 for v in values):
        raise InputError(f"counts must be positive integers, got {text!r}")
    return values


def parse_nu_list(text: str) -> list[float]:
    """Comma-separated tail indices; the literal inf means Gaussian."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part.lower() in ("inf", "infinity"):
            values.append(math.inf)
            continue
        try:
            value = float(part)
        except ValueError as exc:
            raise InputError(f"bad nu value {part!r}") from exc
        if not (value > 0.0):
            raise InputError(f"nu must be positive, got {part!r}")
        values.append(value)
    if not values:
        raise InputError(f"empty nu list {text!r}")
    return values


def _mixing_for(nu: float) -> Mixing:
    return Gaussian() if nu == math.inf else StudentT(nu)


def _format(value: float) -> str:
    """Shortest round-trip decimal; inf markers spelled out."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _write_rows(out: TextIO, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(v) if v is not None else "" for v in row])


# ---------------------------------------------------------------------------
# theory subcommand
# ---------------------------------------------------------------------------

def _theory_row(nu: float, rho: float, sigma: float) -> list:
    model = EllipticalModel(rho=rho, sigma=sigma, mixing=_mixing_for(nu))
    v, h = variance_ingredients(model)
    try:
        nvar = gmm_asymptotic_variance(model, 1)
    except RegimeError:
        nvar = math.inf
    if isinstance(model.mixing, StudentT) and model.mixing.nu == 2.0:
        log_rate: Optional[float] = gmm_log_rate_variance(model)
    else:
        log_rate = None
    try:
        var_rho_g: Optional[float] = gmm_correlation_variance(model, 1)
    except RegimeError:
        # Infinite second moment is an inf marker; undefined transform
        # (sigma away from 1) is an empty cell.
        var_rho_g = math.inf if sigma == 1.0 else None
    try:
        cosine_factor = cosine_correlation_variance(nu, 0.0, 1)
    except RegimeError:
        cosine_factor = math.inf
    return [
        nu,
        rho,
        sigma,
        single_pair_mean(model),
        asymptotic_limit(model),
        v,
        h,
        nvar,
        log_rate,
        var_rho_g,
        cosine_factor,
    ]


def _cmd_theory(args: argparse.Namespace) -> int:
    rho_grid = parse_grid(args.rho_grid)
    for rho in rho_grid:
        if not (-1.0 <= rho <= 1.0):
            raise InputError(f"rho must lie in [-1, 1], got {rho}")
    nus = parse_nu_list(args.nu)
    rows = [_theory_row(nu, rho, args.sigma) for nu in nus for rho in rho_grid]
    if args.out is None:
        _write_rows(sys.stdout, THEORY_COLUMNS, rows)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            _write_rows(handle, THEORY_COLUMNS, rows)
        print(f"wrote {len(rows)} theory rows to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate subcommand
# ---------------------------------------------------------------------------

def _sim_rows(result: SimResult) -> list[list]:
    rows = []
    for cell in result.cells:
        rows.append(
            [
                result.experiment.value,
                cell.nu,
                cell.rho,
                cell.sigma,
                cell.n,
                cell.mean_g,
                cell.std_g,
                cell.theory_f1,
                cell.theory_finf,
                cell.var_g_times_n,
                cell.theory_nvar,
                cell.mse_rho_g,
                cell.mse_rho_c,
                cell.theory_var_rho_g,
                cell.reps,
                cell.seed,
                cell.degenerate_count,
            ]
        )
    return rows


def _apply_preset(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    preset = PRESETS[args.preset]
    if args.experiment != preset["experiment"].value:
        parser.error(
            f"preset {args.preset!r} belongs to experiment "
            f"{preset['experiment'].value!r}, not {args.experiment!r}"
        )
    if args.nu is None:
        args.nu = preset["nu"]
    if args.n_list is None:
        args.n_list = preset["n_list"]
    if args.rho_grid is None:
        args.rho_grid = preset["rho_grid"]
    if args.reps is None:
        args.reps = preset["reps"]


def _resolve_workers_flag(value: Optional[int]) -> Optional[int]:
    if value is not None:
        return value
    env = os.environ.get("GMM_LAB_WORKERS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"GMM_LAB_WORKERS must be an int, got {env!r}") from exc
    return os.cpu_count() or 1


def _cmd_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.preset is not None:
        _apply_preset(args, parser)
    if args.nu is None:
        args.nu = "3"
    if args.n_list is None:
        args.n_list = "1000"
    if args.rho_grid is None:
        args.rho_grid = "-0.99:0.99:0.01"
    if args.reps is None:
        args.reps = 10000
    experiment = Experiment(args.experiment)
    rho_grid = parse_grid(args.rho_grid)
    if not args.include_endpoints:
        rho_grid = [r for r in rho_grid if abs(r) < 1.0 - _ENDPOINT_TOL]
    if not rho_grid:
        raise InputError("rho grid is empty after dropping the endpoints")
    n_values = parse_counts(args.n_list)
    nus = parse_nu_list(args.nu)
    sigmas = parse_grid(args.sigma)
    workers = _resolve_workers_flag(args.workers)
    started = time.monotonic()
    rows: list[list] = []
    for nu in nus:
        for sigma in sigmas:
            config = ExperimentConfig(
                model=EllipticalModel(rho=0.0, sigma=sigma, mixing=_mixing_for(nu)),
                n_values=tuple(n_values),
                rho_grid=tuple(rho_grid),
                repetitions=args.reps,
                seed=args.seed,
                experiment=experiment,
            )
            rows.extend(_sim_rows(run_experiment(config, workers=workers)))
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            _write_rows(handle, SIM_COLUMNS, rows)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    elapsed = time.monotonic() - started
    print(
        f"wrote {len(rows)} rows to {args.out} "
        f"(experiment={experiment.value}, seed={args.seed}, {elapsed:.1f}s)"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# tail-ratio subcommand
# ---------------------------------------------------------------------------

def _cmd_tail_ratio(args: argparse.Namespace) -> int:
    nus = parse_nu_list(args.nu)
    for nu in nus:
        if nu == math.inf:
            raise InputError("tail-ratio needs a finite nu")
    t_values = parse_grid(args.t_list)
    for t in t_values:
        if t <= 0.0:
            raise InputError(f"t values must be positive, got {t}")
    rows = [[nu, t, tail_ratio(nu, t)] for nu in nus for t in t_values]
    if args.out is None:
        _write_rows(sys.stdout, TAIL_COLUMNS, rows)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            _write_rows(handle, TAIL_COLUMNS, rows)
        print(f"wrote {len(rows)} tail-ratio rows to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmm-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_theory = sub.add_parser("theory", help="closed-form tables over a rho grid")
    p_theory.add_argument("--rho-grid", default="-1:1:0.1", help="grid or start:stop:step")
    p_theory.add_argument("--sigma", type=float, default=1.0)
    p_theory.add_argument("--nu", default="inf", help="comma list; inf for Gaussian")
    p_theory.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment table")
    p_sim.add_argument("experiment", choices=[e.value for e in Experiment])
    p_sim.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p_sim.add_argument("--nu", default=None, help="comma list; inf for Gaussian")
    p_sim.add_argument("--sigma", default="1", help="comma list of scale ratios")
    p_sim.add_argument("--rho-grid", default=None, help="grid or start:stop:step")
    p_sim.add_argument("--n-list", default=None, help="comma list of sample sizes")
    p_sim.add_argument("--reps", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--workers", type=int, default=None,
                       help="process count (default: GMM_LAB_WORKERS or cpu count)")
    p_sim.add_argument("--include-endpoints", action="store_true",
                       help="keep rho = -1 and rho = 1 grid points")
    p_sim.add_argument("--out", required=True, help="CSV output path")

    p_tail = sub.add_parser("tail-ratio", help="heavy-tail negligibility diagnostic")
    p_tail.add_argument("--nu", required=True, help="comma list of tail indices")
    p_tail.add_argument("--t-list", required=True, help="comma list of thresholds")
    p_tail.add_argument("--out", default=None, help="CSV path (default: stdout)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command == "simulate":
            return _cmd_simulate(args, parser)
        if args.command == "tail-ratio":
            return _cmd_tail_ratio(args)
    except RegimeError as exc:
        print(f"gmm-lab: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (InputError, GmmLabError) as exc:
        print(f"gmm-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gmm-lab: {exc}", file=sys.stderr)
        return EXIT_IO
    raise AssertionError(f"unhandled command {args.command!r}")


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
