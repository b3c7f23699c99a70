"""Finite-sample similarity statistics on paired vectors.

The generalized min-max similarity splits every entry into positive and
negative parts, x_i = x_i+ - x_i-, and forms

    g_n = sum_i [min(x_i+, y_i+) + min(x_i-, y_i-)]
        / sum_i [max(x_i+, y_i+) + max(x_i-, y_i-)].

On nonnegative data this reduces to the classical min-max (Jaccard-like)
kernel. The cosine similarity c_n = <x, y> / (|x| |y|) is provided
alongside as the comparison statistic. Both are pure functions; sums use
numpy's deterministic reduction, so results are reproducible and exactly
symmetric in the two arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError


def _as_finite_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{name} must be a nonempty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class PairedSample:
    """Two equal-length vectors of finite reals, observed pairwise."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = _as_finite_vector(self.x, "x")
        y = _as_finite_vector(self.y, "y")
        if x.shape != y.shape:
            raise InputError(
                f"x and y must have equal length, got {x.size} and {y.size}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class SignedDecomposition:
    """Entrywise split v = pos - neg with pos, neg >= 0 and pos * neg = 0."""

    pos: np.ndarray
    neg: np.ndarray


def decompose(v) -> SignedDecomposition:
    """Split a vector into its positive and negative parts."""
    arr = _as_finite_vector(v, "v")
    return SignedDecomposition(pos=np.maximum(arr, 0.0), neg=np.maximum(-arr, 0.0))


def _gmm_terms(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    # Shared with the Monte Carlo hot path; callers validate.
    xp = np.maximum(x, 0.0)
    xm = np.maximum(-x, 0.0)
    yp = np.maximum(y, 0.0)
    ym = np.maximum(-y, 0.0)
    num = float(np.sum(np.minimum(xp, yp)) + np.sum(np.minimum(xm, ym)))
    den = float(np.sum(np.maximum(xp, yp)) + np.sum(np.maximum(xm, ym)))
    return num, den


def gmm(s: PairedSample) -> float:
    """Generalized min-max similarity g_n of the sample, a value in [0, 1].

    Raises
    ------
    DegenerateInputError
        If both vectors are identically zero (the 0/0 ratio is left
        undefined rather than given an arbitrary value).
    """
    num, den = _gmm_terms(s.x, s.y)
    if den == 0.0:
        raise DegenerateInputError("gmm undefined: both vectors are identically zero")
    return num / den


def _cosine_terms(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    dot = float(np.sum(x * y))
    nx = float(np.sum(x * x))
    ny = float(np.sum(y * y))
    return dot, nx, ny


def cosine(s: PairedSample) -> float:
    """Cosine similarity c_n of the sample, a value in [-1, 1].

    Raises
    ------
    DegenerateInputError
        If either vector has zero norm.
    """
    peak_x = float(np.max(np.abs(s.x)))
    peak_y = float(np.max(np.abs(s.y)))
    if peak_x == 0.0 or peak_y == 0.0:
        raise DegenerateInputError("cosine undefined: a vector has zero norm")
    # Rescale each vector by a power of two near its largest entry. The
    # ratio is scale-free and power-of-two scaling is exact, so this only
    # stops the squared sums from under- or overflowing on extreme inputs.
    x = s.x * math.ldexp(1.0, -math.frexp(peak_x)[1])
    y = s.y * math.ldexp(1.0, -math.frexp(peak_y)[1])
    dot, nx, ny = _cosine_terms(x, y)
    c = dot / (math.sqrt(nx) * math.sqrt(ny))
    # sqrt rounding can push |c| a few ulp past 1 for collinear vectors
    return min(1.0, max(-1.0, c))
