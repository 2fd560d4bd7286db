"""Maximize aggregate net surplus over the threshold triangle.

Stage one evaluates the objective on a regular grid over
{0 <= z_l <= z_h <= zbar}, including the pooling diagonal and the separating
edge. Stage two refines locally: golden-section along the z_l = 0 edge or the
diagonal when the grid optimum lies there (the usual case), otherwise
Nelder-Mead with reflection back into the triangle. Everything is
deterministic; rerunning a configuration reproduces the result bitwise.

Grid-stage bookkeeping exploits two structural facts: the pooling-tail
integrals depend on z_h only (cached per column), and for a fixed z_l the
separating integral is cumulative in z_h (accumulated along each row).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import surplus as sp
from . import thresholds as th
from .distributions import EFFECTIVE_ZERO, SenderDist
from .errors import ConfigError
from .model import ModelParams
from .separating import SeparatingPath

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_TIE_TOL = 1e-9
_FLAT_TOL = 1e-10
_CERT_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerOptions:
    grid: int = 61
    tol: float = 1e-6
    refine: str = "auto"  # auto | golden | nelder-mead | none
    max_refine_evals: int = 400

    def __post_init__(self) -> None:
        if self.grid < 3:
            raise ConfigError("grid resolution must be at least 3")
        if self.refine not in ("auto", "golden", "nelder-mead", "none"):
            raise ConfigError(f"unknown refine method {self.refine!r}")


@dataclass(frozen=True)
class DelegationOutcome:
    thresholds: th.Thresholds
    interval: tuple[float, float]
    surplus: sp.SurplusBreakdown
    percentile_zh: float
    diagnostics: dict = field(compare=False)


class _GridSweep:
    """Objective values on the triangular grid, cached per optimize() call."""

    def __init__(self, p: ModelParams, d: SenderDist, n: int):
        self.p, self.d, self.n = p, d, n
        self.grid = np.linspace(0.0, d.zbar, n)
        self.values = np.full((n, n), np.nan)
        self.n_evals = 0
        # Column data: tail integrals depend on z_h alone.
        self.ez = np.empty(n)
        self.pm_q = np.empty(n)
        self.pm_inv = np.empty(n)
        for j in range(n - 1):
            z = self.grid[j]
            self.ez[j] = d.trunc_mean(z)
            self.pm_q[j] = d.partial_moment(z, p.q)
            self.pm_inv[j] = d.partial_moment(max(z, EFFECTIVE_ZERO), -1.0)
        self.ez[n - 1] = d.zbar
        self.pm_q[n - 1] = 0.0
        self.pm_inv[n - 1] = 0.0

    def run(self) -> None:
        p, d, n, grid = self.p, self.d, self.n, self.grid
        for i in range(n):
            z_l = grid[i]
            if i == n - 1:
                self.values[i, i] = 0.0  # empty market corner
                self.n_evals += 1
                break
            s_star, _ = th.pooling_star(p, d, z_l)
            self.values[i, i] = sp.pool_part(
                p, d, z_l, s_star, self.pm_q[i], self.pm_inv[i], self.ez[i]
            )
            path = SeparatingPath(p, z_l, d.zbar)
            sigs = path.sigma_many(grid[i + 1:])
            # Known actions at the row's grid knots seed the inversion at the
            # quadrature nodes in between.
            knots = np.concatenate(([z_l], grid[i + 1:]))
            sig_knots = np.concatenate(([path.s_l], sigs))
            seed_fn = lambda z: np.interp(z, knots, sig_knots)  # noqa: E731
            cum = 0.0
            for j in range(i + 1, n):
                cum += sp.sep_part(p, d, path, grid[j - 1], grid[j], seed_fn=seed_fn)
                if j == n - 1:
                    self.values[i, j] = cum
                else:
                    s_h = th.pooled_action(
                        p, d, path, grid[j], sigma=sigs[j - i - 1], ez=self.ez[j]
                    )
                    self.values[i, j] = cum + sp.pool_part(
                        p, d, grid[j], s_h, self.pm_q[j], self.pm_inv[j], self.ez[j]
                    )
            self.n_evals += n - i

    def best(self) -> tuple[int, int, float, bool, bool]:
        """Best cell under the tie rule: value, then larger z_h, then smaller z_l."""
        vmax = np.nanmax(self.values)
        ii, jj = np.where(self.values >= vmax - _TIE_TOL)
        order = sorted(range(len(ii)), key=lambda t: (-jj[t], ii[t]))
        i, j = int(ii[order[0]]), int(jj[order[0]])
        tie_break = len(ii) > 1
        near = np.argwhere(self.values >= vmax - _FLAT_TOL)
        flat = any(
            abs(int(a) - i) > 1 or abs(int(b) - j) > 1 for a, b in near
        )
        return i, j, float(self.values[i, j]), tie_break, flat


def _golden_max(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float, int]:
    """Deterministic golden-section maximization on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    n = 2
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        n += 1
    x = 0.5 * (a + b)
    return x, f(x), n + 1


def _reflect_into_triangle(x: np.ndarray, zbar: float) -> np.ndarray:
    z_l, z_h = float(x[0]), float(x[1])
    for _ in range(8):
        if z_l < 0.0:
            z_l = -z_l
        if z_h < 0.0:
            z_h = -z_h
        if z_l > zbar:
            z_l = 2.0 * zbar - z_l
        if z_h > zbar:
            z_h = 2.0 * zbar - z_h
        if 0.0 <= z_l <= z_h <= zbar:
            break
        if z_h < z_l:
            z_l, z_h = z_h, z_l
    z_l = min(max(z_l, 0.0), zbar)
    z_h = min(max(z_h, z_l), zbar)
    return np.array([z_l, z_h])


def _nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    step: float,
    zbar: float,
    tol: float,
    max_evals: int,
) -> tuple[np.ndarray, float, int]:
    """Maximize f over the triangle with a reflected-simplex Nelder-Mead."""
    pts = [x0]
    for k in range(2):
        x = x0.copy()
        x[k] += step if x[k] + step <= zbar else -step
        pts.append(_reflect_into_triangle(x, zbar))
    simplex = [(p, f(p)) for p in pts]
    n_evals = 3

    def sort_simplex():
        simplex.sort(key=lambda t: -t[1])

    sort_simplex()
    while n_evals < max_evals:
        spread = max(
            np.max(np.abs(simplex[0][0] - simplex[k][0])) for k in (1, 2)
        )
        if spread < tol:
            break
        centroid = 0.5 * (simplex[0][0] + simplex[1][0])
        worst, f_worst = simplex[2]
        xr = _reflect_into_triangle(centroid + (centroid - worst), zbar)
        fr = f(xr)
        n_evals += 1
        if fr > simplex[0][1]:
            xe = _reflect_into_triangle(centroid + 2.0 * (centroid - worst), zbar)
            fe = f(xe)
            n_evals += 1
            simplex[2] = (xe, fe) if fe > fr else (xr, fr)
        elif fr > simplex[1][1]:
            simplex[2] = (xr, fr)
        else:
            xc = _reflect_into_triangle(centroid + 0.5 * (worst - centroid), zbar)
            fc = f(xc)
            n_evals += 1
            if fc > f_worst:
                simplex[2] = (xc, fc)
            else:
                best = simplex[0][0]
                for k in (1, 2):
                    xs = _reflect_into_triangle(
                        best + 0.5 * (simplex[k][0] - best), zbar
                    )
                    simplex[k] = (xs, f(xs))
                n_evals += 2
        sort_simplex()
    return simplex[0][0], simplex[0][1], n_evals


def optimize(
    p: ModelParams, d: SenderDist, opts: OptimizerOptions | None = None
) -> DelegationOutcome:
    """Solve the planner's problem: argmax of the net surplus over thresholds."""
    opts = opts or OptimizerOptions()
    sweep = _GridSweep(p, d, opts.grid)
    sweep.run()
    gi, gj, g_val, tie_break, flat = sweep.best()
    grid = sweep.grid
    step = grid[1] - grid[0]
    z_l, z_h, val = grid[gi], grid[gj], g_val
    method = "none"
    refine_evals = 0

    def value(z_lo: float, z_hi: float) -> float:
        return sp.pi_w(p, d, z_lo, z_hi).total

    # A refined point replaces the grid optimum only when it wins by more
    # than the tie tolerance; on noise-flat plateaus the structured grid
    # point (e.g. the exact pooling corner) is kept.
    if opts.refine != "none":
        if gi == gj:
            # Pooling diagonal: one-dimensional in the common threshold.
            a = grid[max(gi - 1, 0)]
            b = grid[min(gi + 1, opts.grid - 1)]
            z_star, v, refine_evals = _golden_max(
                lambda z: value(z, z), a, min(b, d.zbar * (1.0 - 1e-12)), opts.tol
            )
            method = "golden-diagonal"
            if v > val + _TIE_TOL:
                z_l = z_h = z_star
                val = v
        elif gi == 0 and opts.refine in ("auto", "golden"):
            a = grid[gj - 1]
            b = grid[min(gj + 1, opts.grid - 1)]
            z_top, v, refine_evals = _golden_max(
                lambda z: value(0.0, z), a, b, opts.tol
            )
            method = "golden-edge"
            if v > val + _TIE_TOL:
                z_l, z_h, val = 0.0, z_top, v
        else:
            x, v, refine_evals = _nelder_mead(
                lambda x: value(x[0], x[1]),
                np.array([grid[gi], grid[gj]]),
                0.5 * step,
                d.zbar,
                opts.tol,
                opts.max_refine_evals,
            )
            method = "nelder-mead"
            if v > val + _TIE_TOL:
                z_l, z_h, val = float(x[0]), float(x[1]), v
    record = th.resolve(p, d, z_l, z_h)
    breakdown = sp.pi_w(p, d, record.z_l, record.z_h)
    diagnostics = {
        "grid": opts.grid,
        "grid_best": {"z_l": float(grid[gi]), "z_h": float(grid[gj]), "value": g_val},
        "refine_method": method,
        "refine_evals": refine_evals,
        "n_grid_evals": sweep.n_evals,
        "tie_break_applied": tie_break,
        "flat_objective": flat,
        "certificate": float(breakdown.total - g_val),
    }
    if breakdown.total < g_val - _CERT_TOL:
        raise ConfigError(
            f"refined optimum {breakdown.total} fell below the grid value {g_val}"
        )
    return DelegationOutcome(
        thresholds=record,
        interval=(record.t_l, record.t_h),
        surplus=breakdown,
        percentile_zh=d.cdf(record.z_h),
        diagnostics=diagnostics,
    )
