"""Brute-force quadrature oracle for the closed forms in gmm_lab.theory.

Everything in the limit theory reduces to averages over the uniform
angle theta of functionals built from the signed parts of

    x(theta) = cos(theta - 2 alpha),    y(theta) = sigma cos(theta).

This module evaluates those averages by direct adaptive quadrature of
the raw integrands, with no algebraic simplification shared with the
closed forms, so agreement between the two is meaningful evidence. It
exists for the test suite and for spot checks; simulation code never
calls it.
"""
from __future__ import annotations

import math
from typing import Callable

from scipy.integrate import quad

from .errors import InputError
from .theory import EllipticalModel, geometry

# Averages this oracle can compute, matching the field names of
# theory.FunctionalMoments plus the single-pair mean ratio.
FUNCTIONALS = (
    "mean_min",
    "mean_max",
    "mean_min_sq",
    "mean_max_sq",
    "mean_cross",
    "single_pair_mean",
)


def _wrap(angle: float) -> float:
    """Reduce an angle into the integration window (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def _breakpoints(model: EllipticalModel) -> list[float]:
    """Angles where the integrands lose smoothness.

    The signed parts switch on and off where x or y crosses zero
    (theta = 2 alpha +- pi/2 and +- pi/2), the positive parts cross at
    theta = tau and theta = 2 alpha - tau, and the negative parts cross
    at the antipodes tau +- pi. All are wrapped into (-pi, pi] and
    deduplicated before splitting the quadrature.
    """
    g = geometry(model)
    a2 = 2.0 * g.alpha
    raw = [
        -math.pi / 2.0,
        math.pi / 2.0,
        a2 - math.pi / 2.0,
        a2 + math.pi / 2.0,
        g.tau,
        a2 - g.tau,
        g.tau - math.pi,
        g.tau + math.pi,
    ]
    points = sorted({_wrap(angle) for angle in raw})
    edges = [-math.pi]
    for point in points:
        if point - edges[-1] > 1e-12:
            edges.append(point)
    if math.pi - edges[-1] > 1e-12:
        edges.append(math.pi)
    else:
        edges[-1] = math.pi
    return edges


def _integrand(model: EllipticalModel, which: str) -> Callable[[float], float]:
    a2 = 2.0 * geometry(model).alpha
    sigma = model.sigma

    def parts(theta: float) -> tuple[float, float]:
        x = math.cos(theta - a2)
        y = sigma * math.cos(theta)
        lo = min(max(x, 0.0), max(y, 0.0)) + min(max(-x, 0.0), max(-y, 0.0))
        hi = max(max(x, 0.0), max(y, 0.0)) + max(max(-x, 0.0), max(-y, 0.0))
        return lo, hi

    if which == "mean_min":
        return lambda theta: parts(theta)[0]
    if which == "mean_max":
        return lambda theta: parts(theta)[1]
    if which == "mean_min_sq":
        return lambda theta: parts(theta)[0] ** 2
    if which == "mean_max_sq":
        return lambda theta: parts(theta)[1] ** 2
    if which == "mean_cross":
        return lambda theta: parts(theta)[0] * parts(theta)[1]
    if which == "single_pair_mean":

        def ratio(theta: float) -> float:
            lo, hi = parts(theta)
            return lo / hi if hi > 0.0 else 0.0

        return ratio
    raise InputError(f"unknown functional {which!r}; expected one of {FUNCTIONALS}")


def quadrature_moment(model: EllipticalModel, which: str) -> float:
    """Average of the named functional over theta uniform on (-pi, pi],
    by piecewise adaptive quadrature between the integrand kinks."""
    if abs(model.rho) >= 1.0:
        raise InputError(
            "the quadrature oracle needs |rho| < 1; at the endpoints the "
            "integrands degenerate and the closed forms are exact"
        )
    integrand = _integrand(model, which)
    edges = _breakpoints(model)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
        total += piece
    return total / (2.0 * math.pi)
