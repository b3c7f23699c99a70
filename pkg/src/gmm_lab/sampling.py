"""Exact sampler for the bivariate elliptical model.

A draw is (X, Y) = (cos(theta - 2 alpha), sigma cos(theta)) T with theta
uniform on (-pi, pi] and T the mixing radius, realized through the
mixing matrix A = [[cos a, sin a], [sigma cos a, -sigma sin a]] acting
on the unit circle so that A A^T recovers the target covariance shape
[[1, sigma rho], [sigma rho, sigma^2]].

Randomness is routed through named (seed, stream) pairs: two states
with the same pair produce identical draws and states with different
pairs are statistically independent, which is what lets the Monte Carlo
harness replay any single repetition in isolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .similarity import PairedSample
from .theory import EllipticalModel, Gaussian, Mixing, StudentT, UnitT

_UINT64_SPAN = 1 << 64


@dataclass(frozen=True)
class RngState:
    """Deterministic generator factory keyed by (seed, stream)."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InputError(f"{name} must be an int, got {value!r}")
            if not (0 <= value < _UINT64_SPAN):
                raise InputError(f"{name} must fit in a uint64, got {value}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, self.stream]))
        )


@dataclass(frozen=True)
class MixingMatrix:
    """The 2x2 matrix mapping the scaled unit circle onto the ellipse."""

    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def from_model(cls, model: EllipticalModel) -> "MixingMatrix":
        alpha = math.asin(math.sqrt((1.0 - model.rho) / 2.0))
        return cls(
            a11=math.cos(alpha),
            a12=math.sin(alpha),
            a21=model.sigma * math.cos(alpha),
            a22=-model.sigma * math.sin(alpha),
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def covariance(self) -> np.ndarray:
        a = self.as_array()
        return a @ a.T


def sample_uniform_angle(rng: np.random.Generator, size: int) -> np.ndarray:
    """Angles uniform on (-pi, pi]: negating a draw from [-pi, pi) flips
    which endpoint is included."""
    return -rng.uniform(-math.pi, math.pi, size=size)


def sample_mixing(rng: np.random.Generator, mixing: Mixing, size: int) -> np.ndarray:
    """Draws of the mixing radius T for any supported mixing law.

    Gaussian: T = sqrt(chi2(2)). Student: T = sqrt(chi2(2) * nu /
    chi2(nu)), the sqrt of 2 F(2, nu), with the numerator drawn before
    the denominator so the stream layout is fixed. UnitT: ones.
    """
    if isinstance(mixing, Gaussian):
        return np.sqrt(rng.chisquare(2.0, size=size))
    if isinstance(mixing, StudentT):
        numer = rng.chisquare(2.0, size=size)
        denom = rng.chisquare(mixing.nu, size=size)
        return np.sqrt(numer * mixing.nu / denom)
    if isinstance(mixing, UnitT):
        return np.ones(size)
    raise InputError(f"unknown mixing law: {mixing!r}")


def _sample_xy(
    rng: np.random.Generator, model: EllipticalModel, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Hot path used by the Monte Carlo harness: plain (x, y) arrays."""
    theta = sample_uniform_angle(rng, size)
    t = sample_mixing(rng, model.mixing, size)
    matrix = MixingMatrix.from_model(model)
    cos_t = np.cos(theta) * t
    sin_t = np.sin(theta) * t
    x = matrix.a11 * cos_t + matrix.a12 * sin_t
    y = matrix.a21 * cos_t + matrix.a22 * sin_t
    return x, y


def sample_pair(state: RngState, model: EllipticalModel, n: int) -> PairedSample:
    """A paired sample of n observations from the model."""
    if n < 1:
        raise InputError(f"n must be a positive count, got {n}")
    x, y = _sample_xy(state.generator(), model, n)
    return PairedSample(x=x, y=y)
