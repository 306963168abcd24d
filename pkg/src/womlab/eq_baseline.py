"""Symmetric baseline model: interior equilibria, stability and existence threshold."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit, logit

from . import network
from .errors import NoComparisonError, NoEquilibriumError
from .network import DegreeDistribution
from .pricing import (MarketParams, PriceLaw, _one_price_share, eta_array,
                      firm_profit_baseline, log_ratio, price_law, search_gap,
                      spread_factor)

EPS = 1e-9
SLOPE_STEP = 1e-7
# Candidate q values: uniform in q plus uniform in logit(q) so that roots
# hugging either end of (0, 1) are still bracketed.
_GRID = np.unique(np.concatenate([
    np.linspace(EPS, 1 - EPS, 2001),
    expit(np.linspace(logit(EPS), logit(1 - EPS), 801)),
]))


@dataclass(frozen=True)
class Equilibrium:
    q: float
    law: PriceLaw
    stable: bool
    profit: float
    residual: float

    @property
    def r(self) -> float:
        return self.law.p_hi


# The q = 0 outcome with no sales exists for every s > 0.
NO_TRADE_Q = 0.0


def _require_comparisons(dist: DegreeDistribution):
    if dist.support.max() < 2:
        raise NoComparisonError("every consumer has one friend; prices are never compared")


def benefit_from_eta(eta, delta, pgf_1mq, ttilde):
    """Normalized search benefit given ``eta``, ``tau(1-q)`` and ``tau_tilde(q)``.

    Shared with the asymmetric model, where ``pgf_1mq`` becomes ``(1-w)**k``
    and ``ttilde`` the cutoff type's comparison weight.
    """
    eta = np.asarray(eta, dtype=float)
    finite = np.isfinite(eta)
    e = np.where(finite, eta, 1.0)
    gap = search_gap(e)
    bracket = delta * ttilde * e * spread_factor(e) + (1.0 - delta) * e * log_ratio(e)
    den = 1.0 - delta * pgf_1mq + bracket / gap
    out = np.where(finite, (1.0 - delta) / den, 0.0)
    return out if out.ndim else float(out)


def rhs_ic(dist: DegreeDistribution, delta: float, q):
    """Search benefit ``s/v`` at which a consumer is indifferent at search probability ``q``.

    Vectorized over ``q``. Tends to 0 at both ends of (0, 1).
    """
    _require_comparisons(dist)
    q = np.asarray(q, dtype=float)
    eta = eta_array(dist, q, delta)
    out = benefit_from_eta(eta, delta, network.pgf(dist, 1.0 - q), network.tau_tilde(dist, q))
    out = np.where((q <= 0) | (q >= 1), 0.0, out)
    return out if out.ndim else float(out)


def _slope(f, x, h=SLOPE_STEP):
    h = min(h, x / 2, (1 - x) / 2)
    return (f(x + h) - f(x - h)) / (2 * h)


def _peak(f, grid, vals, i):
    """Golden-section refinement of a grid local maximum at index ``i``."""
    a, c = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    b = grid[i]
    if not (a < b < c):
        return b, vals[i]
    res = minimize_scalar(lambda x: -f(x), bracket=(a, b, c), method="golden",
                          options={"xtol": 1e-12})
    if res.fun < -vals[i] and a < res.x < c:
        return float(res.x), float(-res.fun)
    return b, vals[i]


def interior_roots(dist: DegreeDistribution, delta: float, cost: float) -> List[float]:
    """All ``q`` in ``(EPS, 1-EPS)`` with ``rhs_ic(q) = cost``, ascending."""
    f = lambda x: float(rhs_ic(dist, delta, x)) - cost
    grid = _GRID
    vals = rhs_ic(dist, delta, grid) - cost
    # A hump that only just reaches the cost line can slip between grid points.
    extra = []
    for i in range(1, len(grid) - 1):
        if vals[i] < 0 and vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1] and vals[i] > -0.1 * cost:
            x, fx = _peak(lambda t: f(t), grid, vals, i)
            if fx >= 0:
                extra.append(x)
    if extra:
        grid = np.unique(np.concatenate([grid, extra]))
        vals = rhs_ic(dist, delta, grid) - cost
    roots = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200))
    if vals[-1] == 0:
        roots.append(float(grid[-1]))
    return roots


def _build(dist, params: MarketParams, q: float) -> Optional[Equilibrium]:
    eta = float(eta_array(dist, q, params.delta))
    law = price_law(eta, params.s)
    if law.p_hi > params.v * (1 + 1e-12):
        return None
    f = lambda x: float(rhs_ic(dist, params.delta, x))
    profit = float(_one_price_share(dist, q, params.delta)) * law.p_hi
    return Equilibrium(
        q=q,
        law=law,
        stable=_slope(f, q) < 0,
        profit=profit,
        residual=f(q) - params.cost_ratio,
    )


def solve_equilibria(dist: DegreeDistribution, params: MarketParams) -> List[Equilibrium]:
    """Every interior equilibrium, sorted by ``q``. Empty when ``s > s_bar``."""
    _require_comparisons(dist)
    out = []
    for q in interior_roots(dist, params.delta, params.cost_ratio):
        eq = _build(dist, params, q)
        if eq is not None:
            out.append(eq)
    return out


def stable_equilibrium(dist: DegreeDistribution, params: MarketParams) -> Equilibrium:
    """The stable equilibrium with the largest search probability."""
    stable = [e for e in solve_equilibria(dist, params) if e.stable]
    if not stable:
        raise NoEquilibriumError(
            f"no active-trade equilibrium at s={params.s}, v={params.v}, delta={params.delta}"
        )
    return stable[-1]


def s_bar(dist: DegreeDistribution, delta: float, v: float = 1.0) -> float:
    """Largest search cost with an active-trade equilibrium, ``v * max_q rhs_ic(q)``."""
    _require_comparisons(dist)
    f = lambda x: float(rhs_ic(dist, delta, x))
    vals = rhs_ic(dist, delta, _GRID)
    i = int(np.argmax(vals))
    _, best = _peak(f, _GRID, vals, i)
    return v * best


@dataclass
class LimitRow:
    s: float
    q: float = float("nan")
    e_p: float = float("nan")
    dispersion: float = float("nan")
    flagged: bool = False


@dataclass
class LimitReport:
    rows: List[LimitRow] = field(default_factory=list)
    monotone: bool = True

    @property
    def flagged(self) -> List[LimitRow]:
        return [r for r in self.rows if r.flagged]


def _ordered(prev, cur, ds, sign):
    # ds == 0 means the same s; the values must then coincide
    if ds == 0:
        return cur == prev
    return sign * (cur - prev) > 0


def small_s_limit_check(dist: DegreeDistribution, delta: float, s_sequence: Sequence[float],
                        v: float = 1.0) -> LimitReport:
    """Track the stable equilibrium as ``s`` falls: ``q`` and ``E[p]`` should rise
    toward 1 and ``v`` while the dispersion ``p_hi - p_lo`` shrinks."""
    threshold = s_bar(dist, delta, v)
    report = LimitReport()
    for s in s_sequence:
        if s > threshold:
            report.rows.append(LimitRow(s=s, flagged=True))
            continue
        try:
            eq = stable_equilibrium(dist, MarketParams(v, s, delta))
        except NoEquilibriumError:
            report.rows.append(LimitRow(s=s, flagged=True))
            continue
        report.rows.append(LimitRow(s=s, q=eq.q, e_p=eq.law.e_p, dispersion=eq.law.dispersion))
    good = [r for r in report.rows if not r.flagged]
    for a, b in zip(good, good[1:]):
        ds = a.s - b.s
        if ds < 0:
            report.monotone = False
        elif not (_ordered(a.q, b.q, ds, +1) and _ordered(a.e_p, b.e_p, ds, +1)
                  and _ordered(a.dispersion, b.dispersion, ds, -1)):
            report.monotone = False
    if any(r.q >= 1 or r.e_p > v for r in good):
        report.monotone = False
    return report


@dataclass
class DenseRow:
    kmax: int
    q: float
    eta: float
    relative_dispersion: float
    e_p: float


@dataclass
class DenseReport:
    rows: List[DenseRow]
    dispersion_floor: float
    price_floor: float

    @property
    def holds(self) -> bool:
        return all(r.relative_dispersion >= self.dispersion_floor and r.e_p >= self.price_floor
                   for r in self.rows)


def dense_limit_check(params: MarketParams, kmax_sequence: Sequence[int],
                      dispersion_floor: float = 0.01,
                      price_floor: Optional[float] = None) -> DenseReport:
    """Stable equilibria when every consumer has exactly ``kmax`` friends.

    Relative dispersion ``1/(1+eta)`` should stay above ``dispersion_floor`` and
    ``E[p]`` above ``price_floor`` (default ``10 * s``) however large ``kmax`` gets.
    """
    if price_floor is None:
        price_floor = 10 * params.s
    rows = []
    for k in kmax_sequence:
        eq = stable_equilibrium(network.degenerate(int(k)), params)
        rows.append(DenseRow(int(k), eq.q, eq.law.eta, eq.law.relative_dispersion, eq.law.e_p))
    return DenseReport(rows, dispersion_floor, price_floor)


def profit_spread(dist: DegreeDistribution, params: MarketParams, eq: Equilibrium,
                  n: int = 101) -> float:
    """Relative max-min spread of firm profit over an ``n``-point support grid."""
    grid = np.linspace(eq.law.p_lo, eq.law.p_hi, n)
    prof = firm_profit_baseline(dist, eq.q, params.delta, eq.law, grid)
    return float((prof.max() - prof.min()) / eq.profit)
