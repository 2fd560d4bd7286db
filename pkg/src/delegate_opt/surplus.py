"""Aggregate net surplus of a well-behaved equilibrium.

The planner's objective splits into a separating part (assortative matching,
type-specific actions) on [z_l, z_h] and a pooling part (random matching,
one pooled action) on [z_h, zbar]:

    sep  = int_{z_l}^{z_h} (A k z^(q+1) sigma(z)^a - beta sigma(z)^2 / z) g(z) dz
    pool = A k s_h^a E[z|z>=z_h] int_{z_h}^{zbar} z^q g(z) dz
           - beta s_h^2 int_{z_h}^{zbar} g(z)/z dz

Transfers cancel, so nothing here reads wages.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import thresholds
from .distributions import EFFECTIVE_ZERO, SenderDist
from .errors import DomainError
from .model import ModelParams
from .quadrature import integrate
from .separating import SeparatingPath

_REL_TOL = 1e-8
# beyond zbar - this, the pooling part is treated as empty (see thresholds).
_TOP_GUARD = 1e-9


@dataclass(frozen=True)
class SurplusBreakdown:
    separating_part: float
    pooling_part: float
    total: float
    z_l: float
    z_h: float


def sep_part(
    p: ModelParams,
    d: SenderDist,
    path: SeparatingPath,
    z_lo: float,
    z_hi: float,
    rel_tol: float = _REL_TOL,
    seed_fn=None,
) -> float:
    """Net surplus density integrated over a slice of the separating region.

    ``seed_fn(z_nodes)`` may supply starting actions for the inversion at the
    quadrature nodes (sweeps interpolate from already-solved neighbours).
    """

    def integrand(z: np.ndarray) -> np.ndarray:
        sig = path.sigma_many(z, seed=None if seed_fn is None else seed_fn(z))
        with np.errstate(invalid="ignore"):
            net = (
                p.A * p.k * np.power(z, p.q + 1.0) * np.power(sig, p.a)
                - p.beta_cost * sig**2 / z
            )
        # z = 0 can only occur with sigma = 0, where the density is 0 too.
        return np.where(z == 0.0, 0.0, net) * d.pdf(z)

    return integrate(integrand, z_lo, z_hi, rel_tol=rel_tol)


def pool_part(
    p: ModelParams,
    d: SenderDist,
    z_h: float,
    s_h: float,
    pm_q: float | None = None,
    pm_inv: float | None = None,
    ez: float | None = None,
) -> float:
    """Net surplus of the pooled tail, given the pooled action s_h.

    The 1/z integral is cut at EFFECTIVE_ZERO; with s_h = 0 the cost term is
    identically zero, which covers the degenerate pooling-at-zero case where
    the raw integral would diverge.
    """
    if z_h >= d.zbar - _TOP_GUARD:
        return 0.0
    ez = d.trunc_mean(z_h) if ez is None else ez
    pm_q = d.partial_moment(z_h, p.q) if pm_q is None else pm_q
    gross = p.A * p.k * s_h**p.a * ez * pm_q
    if s_h == 0.0:
        return gross
    if pm_inv is None:
        pm_inv = d.partial_moment(max(z_h, EFFECTIVE_ZERO), -1.0)
    return gross - p.beta_cost * s_h**2 * pm_inv


def pi_w(
    p: ModelParams,
    d: SenderDist,
    z_l: float,
    z_h: float,
    path: SeparatingPath | None = None,
) -> SurplusBreakdown:
    """Aggregate net surplus of the well-behaved equilibrium at (z_l, z_h).

    Pass ``path`` to reuse a separating path already anchored at z_l.
    """
    if not 0.0 <= z_l <= z_h <= d.zbar * (1.0 + 1e-12):
        raise DomainError(f"need 0 <= z_l <= z_h <= zbar, got ({z_l}, {z_h})")
    if path is not None and path.z_l != z_l:
        raise DomainError("path anchored at a different z_l")
    if z_h <= z_l:
        s_star, _ = thresholds.pooling_star(p, d, z_l)
        pool = pool_part(p, d, z_l, s_star)
        return SurplusBreakdown(0.0, pool, pool, z_l, z_h)
    if path is None:
        path = SeparatingPath(p, z_l, d.zbar)
    if z_h >= d.zbar - _TOP_GUARD:
        sep = sep_part(p, d, path, z_l, d.zbar)
        return SurplusBreakdown(sep, 0.0, sep, z_l, z_h)
    sep = sep_part(p, d, path, z_l, z_h)
    s_h = thresholds.pooled_action(p, d, path, z_h)
    pool = pool_part(p, d, z_h, s_h)
    return SurplusBreakdown(sep, pool, sep + pool, z_l, z_h)


def pi_p(p: ModelParams, d: SenderDist, z_star: float) -> float:
    """Net surplus of the pure pooling equilibrium with entry threshold z*."""
    s_star, _ = thresholds.pooling_star(p, d, z_star)
    return pool_part(p, d, z_star, s_star)


def pi_s(p: ModelParams, d: SenderDist, z_l: float = 0.0) -> float:
    """Net surplus of the separating equilibrium (full delegation)."""
    return pi_w(p, d, z_l, d.zbar).total


def well_behaved_gain(
    p: ModelParams,
    d: SenderDist,
    q_small: float,
    a_small: float,
    z_h_small: float,
) -> float:
    """Pi_w(0, z_h) - Pi_s at perturbed (q, a); tends to A k mu_z / 2 as all
    three arguments shrink, which is why small caps beat full delegation."""
    p_small = replace(p, q=q_small, a=a_small)
    return pi_w(p_small, d, 0.0, z_h_small).total - pi_s(p_small, d)
