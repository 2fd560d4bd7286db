"""Scaled-Beta sender-type distribution.

Types are drawn from ``zbar * Beta(alpha, beta_shape)``. The equilibrium
formulas only ever need the density, the CDF, and upper partial moments
``int_c^zbar z^p g(z) dz``, so that is the whole surface; there is no
sampling.

The regularized incomplete beta function is evaluated with the continued
fraction of the modified Lentz algorithm, switching to the symmetric
complement for x above (alpha+1)/(alpha+beta+2) so the fraction always
converges fast. Target absolute error 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, DegenerateTailError, DomainError
from .quadrature import integrate

# Thresholds and lower limits below this are treated as exactly zero; 1/z
# integrands are cut at it instead.
EFFECTIVE_ZERO = 1e-6

_CDF_TOL = 1e-12
_SUPPORT_TOL = 1e-9
_LENTZ_TINY = 1e-300
_LENTZ_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _LENTZ_TINY:
        d = _LENTZ_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _LENTZ_MAX_ITER + 1):
        m2 = 2 * m
        # Even step.
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + aa / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        h *= d * c
        # Odd step.
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + aa / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CDF_TOL:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction stalled (a={a}, b={b}, x={x})")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), abs error <= 1e-12."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError("beta shapes must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@dataclass(frozen=True)
class SenderDist:
    """Sender types distributed as zbar * Beta(alpha, beta_shape) on [0, zbar]."""

    alpha: float
    beta_shape: float
    zbar: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta_shape > 0 and self.zbar > 0):
            raise ConfigError(
                f"need alpha, beta_shape, zbar > 0, got "
                f"({self.alpha}, {self.beta_shape}, {self.zbar})"
            )

    @property
    def mean(self) -> float:
        return self.zbar * self.alpha / (self.alpha + self.beta_shape)

    def pdf(self, z: float | np.ndarray) -> float | np.ndarray:
        """Density of the scaled Beta; 0 on the boundary where the exponent allows."""
        z_arr = np.asarray(z, dtype=float)
        if np.any(z_arr < -_SUPPORT_TOL) or np.any(z_arr > self.zbar + _SUPPORT_TOL):
            raise DomainError(f"pdf argument outside [0, {self.zbar}]")
        u = np.clip(z_arr / self.zbar, 0.0, 1.0)
        ln_b = (
            math.lgamma(self.alpha) + math.lgamma(self.beta_shape)
            - math.lgamma(self.alpha + self.beta_shape)
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            ln_pdf = (
                (self.alpha - 1.0) * np.log(u)
                + (self.beta_shape - 1.0) * np.log1p(-u)
                - ln_b - math.log(self.zbar)
            )
        out = np.where(np.isnan(ln_pdf) | np.isinf(ln_pdf), 0.0, np.exp(ln_pdf))
        # alpha == 1 (beta_shape == 1) keeps a finite boundary density.
        if self.alpha == 1.0:
            out = np.where(u == 0.0, math.exp(-ln_b) / self.zbar, out)
        if self.beta_shape == 1.0:
            out = np.where(u == 1.0, math.exp(-ln_b) / self.zbar, out)
        if np.ndim(z) == 0:
            return float(out)
        return out

    def cdf(self, z: float) -> float:
        """P(Z <= z); arguments outside the support are clamped."""
        return reg_inc_beta(self.alpha, self.beta_shape, z / self.zbar)

    def quantile(self, p: float) -> float:
        """Inverse CDF by bisection to 1e-12; diagnostics only."""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"quantile probability {p} outside [0, 1]")
        lo, hi = 0.0, self.zbar
        while hi - lo > 1e-12 * self.zbar:
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def partial_moment(self, c: float, p: float) -> float:
        """Upper partial moment int_c^zbar z^p g(z) dz by adaptive quadrature."""
        if not -_SUPPORT_TOL <= c <= self.zbar + _SUPPORT_TOL:
            raise DomainError(f"lower limit {c} outside [0, {self.zbar}]")
        if p < -1.0:
            raise DomainError(f"exponent {p} below -1 is not integrable here")
        if p == -1.0 and c < EFFECTIVE_ZERO:
            raise DomainError("1/z integrand needs a lower limit >= EFFECTIVE_ZERO")
        c = min(max(c, 0.0), self.zbar)
        if c >= self.zbar:
            return 0.0
        return integrate(lambda z: z**p * self.pdf(z), c, self.zbar, rel_tol=1e-9)

    def trunc_mean(self, c: float) -> float:
        """Conditional mean E[z | z >= c] = partial_moment(c, 1) / P(z >= c)."""
        if not -_SUPPORT_TOL <= c < self.zbar:
            if abs(c - self.zbar) <= _SUPPORT_TOL:
                return self.zbar
            raise DomainError(f"threshold {c} outside [0, {self.zbar})")
        if c >= self.zbar - _SUPPORT_TOL:
            return self.zbar
        mass = 1.0 - self.cdf(c)
        if mass < 1e-12:
            raise DegenerateTailError(
                f"tail mass above {c:g} is below 1e-12; conditional mean is ill-posed"
            )
        return self.partial_moment(c, 1.0) / mass
