"""Closed-form limit theory for the generalized min-max similarity.

Model. A pair (X, Y) follows the bivariate elliptical law

    (X, Y)^T = A (cos theta, sin theta)^T T,

with theta uniform on (-pi, pi], T > 0 an independent scalar mixing
radius, and A chosen so that A A^T = [[1, sigma rho], [sigma rho,
sigma^2]]. Writing alpha = arcsin(sqrt((1 - rho) / 2)), the pair can be
represented as (X, Y) = (cos(theta - 2 alpha), sigma cos theta) T, and
all quantities below are trigonometric functionals of alpha, sigma and
of the angle tau in [-pi/2 + 2 alpha, pi/2] solving

    cos(tau - 2 alpha) / cos(tau) = sigma.

Quantities. For a paired sample of size n the similarity g_n has

* single_pair_mean:   E g_1, the exact mean at n = 1;
* asymptotic_limit:   the almost-sure limit of g_n as n grows;
* minmax_moments:     the five moments of the normalized per-observation
                      min-functional and max-functional (xi, zeta) that
                      assemble the asymptotic variance;
* variance_ingredients: the residual variance V = E(xi E zeta - zeta
                      E xi)^2 and the mean denominator H = E zeta, giving
                      Var(g_n) ~ (1/n) (V / H^4) (E T^2 / (E T)^2);
* estimator transforms: the correlation estimator inverted from the
                      limit at sigma = 1 and the asymptotic variances of
                      both that estimator and the cosine-based one;
* tail_ratio:         the max/sum negligibility diagnostic
                      t P(T > t) / E min(T, t) for Student mixing.

Every closed form here is cross-checked against direct numerical
integration of the defining angular integrals in gmm_lab.oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from scipy.integrate import quad

from .errors import InputError, RegimeError

# Treat |rho| within this distance of 1 as the endpoint itself: the
# log terms of the single-pair mean are 0 * (-inf) limits there and the
# limiting values are analytically forced.
_ENDPOINT_TOL = 1e-12


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gaussian:
    """Gaussian mixing: T^2 is chi-square with 2 degrees of freedom."""


@dataclass(frozen=True)
class StudentT:
    """Student mixing with nu degrees of freedom: T = sqrt(2 F(2, nu))."""

    nu: float

    def __post_init__(self) -> None:
        if not (isinstance(self.nu, (int, float)) and 0.0 < float(self.nu) < math.inf):
            raise InputError(f"StudentT requires finite nu > 0, got {self.nu!r}")
        object.__setattr__(self, "nu", float(self.nu))


@dataclass(frozen=True)
class UnitT:
    """Degenerate mixing T = 1: the pure angular model on the ellipse."""


Mixing = Union[Gaussian, StudentT, UnitT]


@dataclass(frozen=True)
class EllipticalModel:
    """Data-generating process: correlation rho, scale ratio sigma, mixing law."""

    rho: float
    sigma: float = 1.0
    mixing: Mixing = Gaussian()

    def __post_init__(self) -> None:
        rho = float(self.rho)
        sigma = float(self.sigma)
        if not (-1.0 <= rho <= 1.0):
            raise InputError(f"rho must lie in [-1, 1], got {rho}")
        if not (0.0 < sigma < math.inf):
            raise InputError(f"sigma must be a positive finite real, got {sigma}")
        if not isinstance(self.mixing, (Gaussian, StudentT, UnitT)):
            raise InputError(f"unknown mixing law: {self.mixing!r}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class GeometryParams:
    """Angles (alpha, tau) driving every closed form of this module."""

    alpha: float
    tau: float


def geometry(model: EllipticalModel) -> GeometryParams:
    """Angles of the model: alpha = arcsin(sqrt((1 - rho)/2)) and the tau
    solving cos(tau - 2 alpha)/cos(tau) = sigma.

    tau is computed as atan2(sigma - cos(2 alpha), sin(2 alpha)), which
    extends the arctan form continuously to the rho = +-1 endpoints where
    sin(2 alpha) vanishes: at rho = 1 it yields +-pi/2 by the sign of
    sigma - 1 (and 0 = alpha when sigma = 1), matching the limiting
    interval endpoints.
    """
    alpha = math.asin(math.sqrt((1.0 - model.rho) / 2.0))
    tau = math.atan2(model.sigma - math.cos(2.0 * alpha), math.sin(2.0 * alpha))
    return GeometryParams(alpha=alpha, tau=tau)


# ---------------------------------------------------------------------------
# limits of the similarity
# ---------------------------------------------------------------------------

def single_pair_mean(model: EllipticalModel) -> float:
    """Exact mean of the similarity computed from a single pair, E g_1.

    The value does not depend on the mixing law (T cancels from the
    ratio at n = 1). The log factors are evaluated through the stable
    identities sin(2a)/cos(tau) = sqrt(1 + s^2 - 2 s r) and
    sin(2a)/cos(2a - tau) = sqrt(1 + 1/s^2 - 2 r / s).
    """
    rho, sigma = model.rho, model.sigma
    if rho >= 1.0 - _ENDPOINT_TOL:
        return min(sigma, 1.0 / sigma)
    if rho <= -1.0 + _ENDPOINT_TOL:
        return 0.0
    g = geometry(model)
    s2a = math.sin(2.0 * g.alpha)
    c2a = math.cos(2.0 * g.alpha)
    log_a = 0.5 * math.log1p(sigma * sigma - 2.0 * sigma * rho)
    log_b = 0.5 * math.log1p(1.0 / sigma**2 - 2.0 * rho / sigma)
    term_a = (g.tau + math.pi / 2.0 - 2.0 * g.alpha) * c2a + s2a * log_a
    term_b = (math.pi / 2.0 - g.tau) * c2a + s2a * log_b
    value = term_a / (sigma * math.pi) + sigma * term_b / math.pi
    return min(1.0, max(0.0, value))


def single_pair_mean_unit_scale(rho: float) -> float:
    """Simplified form of the single-pair mean at sigma = 1."""
    if rho >= 1.0 - _ENDPOINT_TOL:
        return 1.0
    if rho <= -1.0 + _ENDPOINT_TOL:
        return 0.0
    alpha = math.asin(math.sqrt((1.0 - rho) / 2.0))
    value = rho + (
        math.sqrt(1.0 - rho * rho) * math.log(2.0 - 2.0 * rho) - 2.0 * rho * alpha
    ) / math.pi
    return min(1.0, max(0.0, value))


def asymptotic_limit(model: EllipticalModel) -> float:
    """Large-sample limit of the similarity g_n (independent of mixing)."""
    rho, sigma = model.rho, model.sigma
    if rho >= 1.0 - _ENDPOINT_TOL:
        return min(sigma, 1.0 / sigma)
    if rho <= -1.0 + _ENDPOINT_TOL:
        return 0.0
    g = geometry(model)
    num = 1.0 - math.sin(2.0 * g.alpha - g.tau) + sigma * (1.0 - math.sin(g.tau))
    den = sigma * (1.0 + math.sin(g.tau)) + 1.0 + math.sin(2.0 * g.alpha - g.tau)
    return num / den


def asymptotic_limit_unit_scale(rho: float) -> float:
    """Simplified form of the large-sample limit at sigma = 1."""
    s = math.sqrt((1.0 - rho) / 2.0)
    return (1.0 - s) / (1.0 + s)


# ---------------------------------------------------------------------------
# moments of the min/max functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalMoments:
    """First and second moments of the per-observation min-functional
    (mean_min*) and max-functional (mean_max*), plus their cross moment.

    The functionals are xi = [min(X+, Y+) + min(X-, Y-)] / T and
    zeta = [max(X+, Y+) + max(X-, Y-)] / T; both are bounded, so all
    moments are finite regardless of the mixing law.
    """

    mean_min: float
    mean_max: float
    mean_min_sq: float
    mean_max_sq: float
    mean_cross: float


def minmax_moments(model: EllipticalModel) -> FunctionalMoments:
    """The five closed-form moments of (xi, zeta)."""
    sigma = model.sigma
    g = geometry(model)
    alpha, tau = g.alpha, g.tau
    s2a = math.sin(2.0 * alpha)
    c2a = math.cos(2.0 * alpha)
    sin_t = math.sin(tau)
    sin_at = math.sin(2.0 * alpha - tau)
    mean_min = (1.0 - sin_at + sigma * (1.0 - sin_t)) / math.pi
    mean_max = (sigma * (1.0 + sin_t) + 1.0 + sin_at) / math.pi
    mean_min_sq = (
        tau
        + math.pi / 2.0
        - 2.0 * alpha
        + 0.5 * math.sin(2.0 * tau - 4.0 * alpha)
        + sigma * sigma * (math.pi / 2.0 - tau - 0.5 * math.sin(2.0 * tau))
    ) / (2.0 * math.pi)
    mean_max_sq = (
        sigma * sigma * (tau / 2.0 + 0.25 * math.sin(2.0 * tau) + math.pi / 4.0)
        + (math.pi / 4.0 + alpha - tau / 2.0 - 0.25 * math.sin(2.0 * tau - 4.0 * alpha))
    ) / math.pi + sigma * (s2a - 2.0 * alpha * c2a) / math.pi
    mean_cross = sigma * ((math.pi - 2.0 * alpha) * c2a + s2a) / (2.0 * math.pi)
    return FunctionalMoments(
        mean_min=mean_min,
        mean_max=mean_max,
        mean_min_sq=mean_min_sq,
        mean_max_sq=mean_max_sq,
        mean_cross=mean_cross,
    )


def minmax_moments_unit_scale(rho: float) -> FunctionalMoments:
    """Simplified moment forms at sigma = 1 (functions of alpha alone)."""
    alpha = math.asin(math.sqrt((1.0 - rho) / 2.0))
    sa = math.sin(alpha)
    s2a = math.sin(2.0 * alpha)
    c2a = math.cos(2.0 * alpha)
    return FunctionalMoments(
        mean_min=2.0 * (1.0 - sa) / math.pi,
        mean_max=2.0 * (1.0 + sa) / math.pi,
        mean_min_sq=(math.pi - 2.0 * alpha - s2a) / (2.0 * math.pi),
        mean_max_sq=(math.pi / 2.0 + alpha + 1.5 * s2a - 2.0 * alpha * c2a) / math.pi,
        mean_cross=((math.pi - 2.0 * alpha) * c2a + s2a) / (2.0 * math.pi),
    )


def variance_ingredients(model: EllipticalModel) -> tuple[float, float]:
    """Residual variance V = E(xi E zeta - zeta E xi)^2 and denominator
    mean H = E zeta.

    V is evaluated from its expanded closed form (three brace terms over
    pi^3); the equivalent assembly from the five moments of
    ``minmax_moments`` is kept as an independent verification route in
    the test suite rather than being reused here.
    """
    sigma = model.sigma
    g = geometry(model)
    alpha, tau = g.alpha, g.tau
    sin_t = math.sin(tau)
    sin_at = math.sin(2.0 * alpha - tau)
    a_part = 1.0 - sin_at + sigma * (1.0 - sin_t)  # pi * E xi
    b_part = sigma * (1.0 + sin_t) + 1.0 + sin_at  # pi * E zeta
    brace1 = (
        2.0 * tau
        + math.pi
        - 4.0 * alpha
        + math.sin(2.0 * tau - 4.0 * alpha)
        + sigma * sigma * (math.pi - 2.0 * tau - math.sin(2.0 * tau))
    )
    brace2 = (
        sigma * sigma * (2.0 * tau + math.sin(2.0 * tau) + math.pi)
        + (math.pi + 4.0 * alpha - 2.0 * tau - math.sin(2.0 * tau - 4.0 * alpha))
        + 4.0 * sigma * (math.sin(2.0 * alpha) - 2.0 * alpha * math.cos(2.0 * alpha))
    )
    brace3 = (math.pi - 2.0 * alpha) * math.cos(2.0 * alpha) + math.sin(2.0 * alpha)
    pi3 = math.pi**3
    v = (
        brace1 * b_part * b_part / (4.0 * pi3)
        + brace2 * a_part * a_part / (4.0 * pi3)
        - sigma * brace3 * a_part * b_part / pi3
    )
    h = b_part / math.pi
    return max(v, 0.0), h


def variance_ingredients_unit_scale(rho: float) -> tuple[float, float]:
    """Simplified (V, H) at sigma = 1."""
    alpha = math.asin(math.sqrt((1.0 - rho) / 2.0))
    sa = math.sin(alpha)
    v = (4.0 / math.pi**3) * sa * sa * (
        3.0 * math.pi
        - 8.0 * math.cos(alpha)
        + 2.0 * math.sin(2.0 * alpha)
        + math.pi * math.cos(2.0 * alpha)
        - 8.0 * alpha * sa
        - 4.0 * alpha * math.cos(2.0 * alpha)
    )
    h = 2.0 * (1.0 + sa) / math.pi
    return max(v, 0.0), h


# ---------------------------------------------------------------------------
# mixing-variable moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixingMoments:
    """E T, E T^2 and E T^4 of the mixing radius, math.inf when divergent."""

    first: float
    second: float
    fourth: float

    def __post_init__(self) -> None:
        for name in ("first", "second", "fourth"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise InputError(f"moment {name} must be positive, got {value!r}")


def student_mixing_moments(nu: float) -> MixingMoments:
    """Moments of the Student mixing radius T = sqrt(2 F(2, nu)).

    E T exists for nu > 1, E T^2 for nu > 2 and E T^4 for nu > 4;
    divergent moments are reported as math.inf. E T is evaluated in log
    space through lgamma so large nu cannot overflow.
    """
    nu = float(nu)
    if not (0.0 < nu < math.inf):
        raise InputError(f"nu must be a positive finite real, got {nu}")
    if nu > 1.0:
        first = math.exp(
            0.5 * math.log(nu)
            + math.lgamma(nu / 2.0 - 0.5)
            + math.lgamma(0.5)
            - math.log(2.0)
            - math.lgamma(nu / 2.0)
        )
    else:
        first = math.inf
    second = 2.0 * nu / (nu - 2.0) if nu > 2.0 else math.inf
    if nu > 4.0:
        fourth = 4.0 * nu**3 / ((nu - 2.0) ** 2 * (nu - 4.0)) + 4.0 * nu**2 / (
            (nu - 2.0) ** 2
        )
    else:
        fourth = math.inf
    return MixingMoments(first=first, second=second, fourth=fourth)


def mixing_moments(mixing: Mixing) -> MixingMoments:
    """Moments of T for any of the supported mixing laws."""
    if isinstance(mixing, Gaussian):
        # T = sqrt(chi-square(2)): E T = sqrt(pi/2), E T^2 = 2, E T^4 = 8.
        return MixingMoments(first=math.sqrt(math.pi / 2.0), second=2.0, fourth=8.0)
    if isinstance(mixing, UnitT):
        return MixingMoments(first=1.0, second=1.0, fourth=1.0)
    if isinstance(mixing, StudentT):
        return student_mixing_moments(mixing.nu)
    raise InputError(f"unknown mixing law: {mixing!r}")


# ---------------------------------------------------------------------------
# asymptotic variances and estimator transforms
# ---------------------------------------------------------------------------

def _second_moment_ratio(mixing: Mixing) -> float:
    moments = mixing_moments(mixing)
    if not math.isfinite(moments.second):
        raise RegimeError(
            "the sqrt(n) variance formula needs a finite second mixing moment "
            "(Student nu > 2); at nu = 2 the variance decays at the log(n)/n "
            "rate instead, see gmm_log_rate_variance"
        )
    return moments.second / (moments.first * moments.first)


def gmm_asymptotic_variance(model: EllipticalModel, n: int) -> float:
    """Leading-order variance of g_n: (1/n) (V/H^4) (E T^2 / (E T)^2)."""
    if n < 1:
        raise InputError(f"n must be a positive count, got {n}")
    v, h = variance_ingredients(model)
    if v == 0.0:
        return 0.0
    return v / h**4 * _second_moment_ratio(model.mixing) / n


def gmm_log_rate_variance(model: EllipticalModel) -> float:
    """Limit variance of sqrt(n / log n) (g_n - limit) in the boundary
    regime nu = 2, equal to (V/H^4)(4/pi^2)."""
    if not (isinstance(model.mixing, StudentT) and model.mixing.nu == 2.0):
        raise RegimeError(
            "the log-rate normalization applies only to Student mixing with "
            "nu = 2 exactly"
        )
    v, h = variance_ingredients(model)
    if v == 0.0:
        return 0.0
    return v / h**4 * 4.0 / math.pi**2


def correlation_from_gmm(g: float) -> float:
    """Correlation recovered from a similarity value via the inverse of
    the sigma = 1 limit: rho = 1 - 2 ((1 - g)/(1 + g))^2."""
    if not (0.0 <= g <= 1.0):
        raise InputError(f"similarity must lie in [0, 1], got {g}")
    w = (1.0 - g) / (1.0 + g)
    return 1.0 - 2.0 * w * w


def gmm_correlation_variance(model: EllipticalModel, n: int) -> float:
    """Leading-order variance of the correlation estimator inverted from
    g_n: (1/n) 2 (1 - rho) (1 + sqrt((1 - rho)/2))^4 (V/H^4)(E T^2/(E T)^2).

    Defined only at sigma = 1, where the inversion formula is exact.
    """
    if n < 1:
        raise InputError(f"n must be a positive count, got {n}")
    if model.sigma != 1.0:
        raise RegimeError(
            "the inverted correlation estimator is defined only for "
            "sigma = 1; general-sigma inversion is not supported"
        )
    rho = model.rho
    s = math.sqrt((1.0 - rho) / 2.0)
    coeff = 2.0 * (1.0 - rho) * (1.0 + s) ** 4
    v, h = variance_ingredients(model)
    if coeff == 0.0 or v == 0.0:
        return 0.0
    return coeff * v / h**4 * _second_moment_ratio(model.mixing) / n


def cosine_correlation_variance(nu: float, rho: float, n: int) -> float:
    """Leading-order variance of the cosine correlation estimator:
    (1/n) (E T^4 / (2 (E T^2)^2)) (1 - rho^2)^2.

    nu = math.inf selects the Gaussian case, whose factor is exactly 1.
    """
    if n < 1:
        raise InputError(f"n must be a positive count, got {n}")
    if not (-1.0 <= rho <= 1.0):
        raise InputError(f"rho must lie in [-1, 1], got {rho}")
    if nu == math.inf:
        factor = 1.0
    else:
        moments = student_mixing_moments(nu)
        if not math.isfinite(moments.fourth):
            raise RegimeError(
                "the cosine variance formula needs a finite fourth mixing "
                "moment (Student nu > 4)"
            )
        factor = moments.fourth / (2.0 * moments.second * moments.second)
    return factor * (1.0 - rho * rho) ** 2 / n


# ---------------------------------------------------------------------------
# heavy-tail diagnostic
# ---------------------------------------------------------------------------

def mixing_survival(nu: float, t: float) -> float:
    """Survival P(T > t) = (1 + t^2/nu)^(-nu/2) of the Student mixing
    radius, from T^2 = 2 F(2, nu); at nu = 1 this is (1 + t^2)^(-1/2)."""
    nu = float(nu)
    if not (0.0 < nu < math.inf):
        raise InputError(f"nu must be a positive finite real, got {nu}")
    if t < 0.0:
        raise InputError(f"t must be nonnegative, got {t}")
    return (1.0 + t * t / nu) ** (-nu / 2.0)


def tail_ratio(nu: float, t: float) -> float:
    """Max/sum negligibility diagnostic t P(T > t) / E min(T, t).

    The denominator E min(T, t) = integral of the survival function over
    [0, t] is evaluated by adaptive quadrature on decade subintervals so
    very large t stays accurate. The similarity g_n is consistent for a
    mixing law exactly when this ratio vanishes as t grows; for nu = 0.5
    it tends to 1/2 instead, which is the non-convergent regime.
    """
    if t <= 0.0:
        raise InputError(f"t must be positive, got {t}")
    nu = float(nu)
    edges = [0.0]
    edge = 1.0
    while edge < t:
        edges.append(edge)
        edge *= 10.0
    edges.append(float(t))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = quad(
            lambda x: mixing_survival(nu, x), lo, hi, epsabs=0.0, epsrel=1e-10, limit=200
        )
        total += piece
    return t * mixing_survival(nu, t) / total
