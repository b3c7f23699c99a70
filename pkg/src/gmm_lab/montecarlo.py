"""Seeded Monte Carlo experiments over the elliptical model.

Four experiment kinds, one per reported table:

* mean-std:  mean and standard deviation of the similarity g_n across a
             (n, rho) grid, next to the n = 1 and n = infinity limits;
* var-check: empirical n * Var(g_n) next to its asymptotic value;
* mse:       mean squared error of the two correlation estimators (the
             inverse-limit one and the cosine one) next to the theoretical
             variance of the former;
* g1-check:  mean of g_1 next to the exact single-pair mean, including
             scale ratios away from 1.

Determinism contract. Repetition r of a run seeded with s draws from
RngState(s, r), so every repetition is replayable in isolation and the
grid cells of one run share repetition streams. Repetitions are grouped
into fixed blocks; blocks may be computed by any number of workers, but
accumulation inside a block is sequential in r and blocks are merged in
block order, so the emitted table is bit-identical for every worker
count.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .errors import InputError, RegimeError
from .sampling import MixingMatrix, RngState, sample_mixing, sample_uniform_angle
from .similarity import _cosine_terms, _gmm_terms
from .theory import (
    EllipticalModel,
    StudentT,
    asymptotic_limit,
    gmm_asymptotic_variance,
    gmm_correlation_variance,
    single_pair_mean,
)

_UINT64_SPAN = 1 << 64


class Experiment(str, Enum):
    """Experiment kinds; the value is the tag used on the command line
    and in the experiment column of emitted tables."""

    MEAN_STD = "mean-std"
    VAR_CHECK = "var-check"
    MSE_COMPARE = "mse"
    G1_CHECK = "g1-check"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: a model template crossed with grids.

    The template's sigma and mixing law apply to every cell; its rho is
    a placeholder that each rho_grid value replaces in turn.
    """

    model: EllipticalModel
    n_values: tuple[int, ...]
    rho_grid: tuple[float, ...]
    repetitions: int
    seed: int
    experiment: Experiment

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "rho_grid", tuple(float(r) for r in self.rho_grid))
        if not self.n_values:
            raise InputError("n_values must be nonempty")
        for n in self.n_values:
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise InputError(f"sample sizes must be positive ints, got {n!r}")
        if not self.rho_grid:
            raise InputError("rho_grid must be nonempty")
        for rho in self.rho_grid:
            if not (-1.0 <= rho <= 1.0):
                raise InputError(f"rho_grid values must lie in [-1, 1], got {rho}")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise InputError(f"repetitions must be a positive int, got {self.repetitions!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < _UINT64_SPAN):
            raise InputError(f"seed must fit in a uint64, got {self.seed!r}")
        if not isinstance(self.experiment, Experiment):
            raise InputError(f"unknown experiment: {self.experiment!r}")


@dataclass(frozen=True)
class SimCell:
    """Aggregated results for one (rho, n) grid cell.

    Theory columns that have no finite value in the cell's regime (for
    example n * Var under mixing without a second moment) hold math.inf.
    The mean/std of the two correlation estimators are carried for
    diagnostics even though only their MSEs are tabulated.
    """

    nu: float
    rho: float
    sigma: float
    n: int
    reps: int
    seed: int
    mean_g: float
    std_g: float
    var_g_times_n: float
    mse_rho_g: float
    mse_rho_c: float
    mean_rho_g: float
    std_rho_g: float
    mean_rho_c: float
    std_rho_c: float
    theory_f1: float
    theory_finf: float
    theory_nvar: float
    theory_var_rho_g: float
    degenerate_count: int


@dataclass(frozen=True)
class SimResult:
    """An experiment tag plus its grid cells in emission order."""

    experiment: Experiment
    cells: tuple[SimCell, ...]


class Welford:
    """Single-pass mean/variance accumulator with an order-fixed merge.

    ``add`` implements the classic update; ``merge`` folds another
    accumulator in by the pairwise combination rule, which is what makes
    block-parallel accumulation reproducible: the same block boundaries
    merged in the same order give the same floats.
    """

    __slots__ = ("count", "mean", "_m2")

    def __init__(self) -> None:
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    def merge(self, other: "Welford") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean
            self._m2 = other._m2
            return
        count = self.count + other.count
        delta = other.mean - self.mean
        self._m2 += other._m2 + delta * delta * self.count * other.count / count
        self.mean += delta * other.count / count
        self.count = count

    def variance(self) -> float:
        """Sample variance (n - 1 denominator)."""
        if self.count < 2:
            raise InputError(f"variance needs at least 2 values, got {self.count}")
        return self._m2 / (self.count - 1)

    def squared_deviation_mean(self, center: float) -> float:
        """Mean of (value - center)^2, from the moments already held."""
        if self.count < 1:
            raise InputError("squared deviation needs at least 1 value")
        shift = self.mean - center
        return self._m2 / self.count + shift * shift


def welford_accumulate(values: Iterable[float]) -> tuple[float, float, int]:
    """Fold a stream into (mean, sample variance, count).

    The variance is reported as nan when the stream has a single value
    (mean defined, spread not); an empty stream is an error.
    """
    acc = Welford()
    for value in values:
        acc.add(float(value))
    if acc.count == 0:
        raise InputError("cannot accumulate an empty stream")
    variance = acc.variance() if acc.count >= 2 else math.nan
    return acc.mean, variance, acc.count


# ---------------------------------------------------------------------------
# block execution
# ---------------------------------------------------------------------------

@dataclass
class _BlockStats:
    g: Welford
    rho_g: Welford
    rho_c: Welford
    degenerate: int


def _block_size(n: int) -> int:
    """Repetitions per work block: about 4M draws a block, at least 1
    and at most 4096 repetitions, so tasks stay coarse at small n and
    bounded at large n. Fixed by n alone; never by worker count."""
    return max(1, min(4096, (1 << 22) // max(n, 1)))


def _run_block(
    model: EllipticalModel, n: int, seed: int, rep_start: int, rep_stop: int
) -> _BlockStats:
    """Accumulate repetitions [rep_start, rep_stop) of one grid cell."""
    matrix = MixingMatrix.from_model(model)
    stats = _BlockStats(g=Welford(), rho_g=Welford(), rho_c=Welford(), degenerate=0)
    for rep in range(rep_start, rep_stop):
        rng = RngState(seed=seed, stream=rep).generator()
        theta = sample_uniform_angle(rng, n)
        t = sample_mixing(rng, model.mixing, n)
        cos_t = np.cos(theta) * t
        sin_t = np.sin(theta) * t
        if n == 1:
            # Scalar arithmetic; the draws above stay vectorized so the
            # stream layout is the same as for any other n.
            x = matrix.a11 * float(cos_t[0]) + matrix.a12 * float(sin_t[0])
            y = matrix.a21 * float(cos_t[0]) + matrix.a22 * float(sin_t[0])
            xp = x if x > 0.0 else 0.0
            xm = -x if x < 0.0 else 0.0
            yp = y if y > 0.0 else 0.0
            ym = -y if y < 0.0 else 0.0
            num = min(xp, yp) + min(xm, ym)
            den = max(xp, yp) + max(xm, ym)
            dot = x * y
            norm_prod = abs(x) * abs(y)
        else:
            x = matrix.a11 * cos_t + matrix.a12 * sin_t
            y = matrix.a21 * cos_t + matrix.a22 * sin_t
            num, den = _gmm_terms(x, y)
            dot, norm_x_sq, norm_y_sq = _cosine_terms(x, y)
            norm_prod = math.sqrt(norm_x_sq * norm_y_sq)
        if not (den > 0.0 and norm_prod > 0.0 and math.isfinite(den) and math.isfinite(norm_prod)):
            stats.degenerate += 1
            continue
        g = num / den
        c = dot / norm_prod
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        w = (1.0 - g) / (1.0 + g)
        stats.g.add(g)
        stats.rho_g.add(1.0 - 2.0 * w * w)
        stats.rho_c.add(c)
    return stats


def _run_block_task(task: tuple) -> _BlockStats:
    cell_index, model, n, seed, rep_start, rep_stop = task
    del cell_index
    return _run_block(model, n, seed, rep_start, rep_stop)


# ---------------------------------------------------------------------------
# experiment driver
# ---------------------------------------------------------------------------

def _theory_nvar(model: EllipticalModel) -> float:
    try:
        return gmm_asymptotic_variance(model, 1)
    except RegimeError:
        return math.inf


def _theory_var_rho_g(model: EllipticalModel, n: int) -> float:
    try:
        return gmm_correlation_variance(model, n)
    except RegimeError:
        return math.inf


def _nu_tag(model: EllipticalModel) -> float:
    return model.mixing.nu if isinstance(model.mixing, StudentT) else math.inf


def _assemble_cell(
    config: ExperimentConfig, model: EllipticalModel, n: int, stats: _BlockStats
) -> SimCell:
    count = stats.g.count
    if count >= 2:
        var_g = stats.g.variance()
        std_g = math.sqrt(var_g)
        std_rho_g = math.sqrt(stats.rho_g.variance())
        std_rho_c = math.sqrt(stats.rho_c.variance())
    else:
        var_g = math.nan
        std_g = math.nan
        std_rho_g = math.nan
        std_rho_c = math.nan
    if count >= 1:
        mean_g = stats.g.mean
        mean_rho_g = stats.rho_g.mean
        mean_rho_c = stats.rho_c.mean
        mse_rho_g = stats.rho_g.squared_deviation_mean(model.rho)
        mse_rho_c = stats.rho_c.squared_deviation_mean(model.rho)
    else:
        mean_g = math.nan
        mean_rho_g = math.nan
        mean_rho_c = math.nan
        mse_rho_g = math.nan
        mse_rho_c = math.nan
    return SimCell(
        nu=_nu_tag(model),
        rho=model.rho,
        sigma=model.sigma,
        n=n,
        reps=config.repetitions,
        seed=config.seed,
        mean_g=mean_g,
        std_g=std_g,
        var_g_times_n=n * var_g,
        mse_rho_g=mse_rho_g,
        mse_rho_c=mse_rho_c,
        mean_rho_g=mean_rho_g,
        std_rho_g=std_rho_g,
        mean_rho_c=mean_rho_c,
        std_rho_c=std_rho_c,
        theory_f1=single_pair_mean(model),
        theory_finf=asymptotic_limit(model),
        theory_nvar=_theory_nvar(model),
        theory_var_rho_g=_theory_var_rho_g(model, n),
        degenerate_count=stats.degenerate,
    )


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        return 1
    if not isinstance(workers, int) or workers < 1:
        raise InputError(f"workers must be a positive int, got {workers!r}")
    return workers


def _run(config: ExperimentConfig, workers: Optional[int]) -> SimResult:
    worker_count = _resolve_workers(workers)
    cell_keys = [(n, rho) for n in config.n_values for rho in config.rho_grid]
    tasks = []
    for index, (n, rho) in enumerate(cell_keys):
        model = dataclasses.replace(config.model, rho=rho)
        block = _block_size(n)
        for start in range(0, config.repetitions, block):
            stop = min(start + block, config.repetitions)
            tasks.append((index, model, n, config.seed, start, stop))
    if worker_count == 1:
        block_stats = [_run_block_task(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (worker_count * 8))
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            block_stats = list(pool.map(_run_block_task, tasks, chunksize=chunk))
    merged: dict[int, _BlockStats] = {}
    # pool.map preserves task order, so folding left to right merges
    # blocks in rep order within each cell.
    for task, stats in zip(tasks, block_stats):
        index = task[0]
        if index not in merged:
            merged[index] = stats
        else:
            merged[index].g.merge(stats.g)
            merged[index].rho_g.merge(stats.rho_g)
            merged[index].rho_c.merge(stats.rho_c)
            merged[index].degenerate += stats.degenerate
    cells = []
    for index, (n, rho) in enumerate(cell_keys):
        model = dataclasses.replace(config.model, rho=rho)
        cells.append(_assemble_cell(config, model, n, merged[index]))
    return SimResult(experiment=config.experiment, cells=tuple(cells))


def _expect(config: ExperimentConfig, experiment: Experiment) -> None:
    if config.experiment is not experiment:
        raise InputError(
            f"config is tagged {config.experiment.value!r}, expected {experiment.value!r}"
        )


def run_mean_std(config: ExperimentConfig, workers: Optional[int] = None) -> SimResult:
    """Mean/std of g_n over the grid, any mixing law."""
    _expect(config, Experiment.MEAN_STD)
    return _run(config, workers)


def run_var_check(config: ExperimentConfig, workers: Optional[int] = None) -> SimResult:
    """Empirical n * Var(g_n) against the asymptotic value; needs
    Student mixing with nu > 2 so that value is finite."""
    _expect(config, Experiment.VAR_CHECK)
    mixing = config.model.mixing
    if not (isinstance(mixing, StudentT) and mixing.nu > 2.0):
        raise RegimeError(
            "the variance check applies to Student mixing with nu > 2; "
            "below that the second mixing moment is infinite and n * Var "
            "does not converge"
        )
    return _run(config, workers)


def run_mse_compare(config: ExperimentConfig, workers: Optional[int] = None) -> SimResult:
    """MSE of the two correlation estimators; the inverse-limit
    estimator is exact only at sigma = 1, so that scale is required."""
    _expect(config, Experiment.MSE_COMPARE)
    if config.model.sigma != 1.0:
        raise RegimeError(
            "the correlation estimators are compared at sigma = 1, where "
            "the inverse-limit transform is exact"
        )
    return _run(config, workers)


def run_g1_check(config: ExperimentConfig, workers: Optional[int] = None) -> SimResult:
    """Mean of the single-pair similarity against its exact value; the
    sample size is pinned to 1 whatever the config says."""
    _expect(config, Experiment.G1_CHECK)
    return _run(dataclasses.replace(config, n_values=(1,)), workers)


_RUNNERS = {
    Experiment.MEAN_STD: run_mean_std,
    Experiment.VAR_CHECK: run_var_check,
    Experiment.MSE_COMPARE: run_mse_compare,
    Experiment.G1_CHECK: run_g1_check,
}


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> SimResult:
    """Dispatch a config to its runner (regime checks included)."""
    return _RUNNERS[config.experiment](config, workers)
