"""Full-diffusion variant and the checks behind the multi-period foundation.

``rho_solve`` finds the price at which an informed consumer is indifferent
between buying now and waiting a period for a friend's quote; buying at once
is optimal whenever ``r <= rho``. ``period_three_check`` compares the chance of
hearing from friends in the second period with the best case in the third.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import network
from .eq_baseline import Equilibrium
from .errors import InvalidArgument, NoEquilibriumError
from .network import DegreeDistribution
from .pricing import MarketParams, PriceLaw, integrated_cdf, price_law, search_gap

_LOG_ETA_LO, _LOG_ETA_HI = math.log(1e-12), math.log(1e12)


def full_diffusion_benefit(eta, delta):
    """``(1-d)(1 - eta L) / (1 - 2 d eta (1 - eta L))`` with ``L = ln(1+1/eta)``.

    Decreasing in ``eta`` from ``1 - delta`` toward 0.
    """
    gap = search_gap(eta)
    return (1.0 - delta) * gap / (1.0 - 2.0 * delta * np.asarray(eta) * gap)


def solve_full_diffusion(params: MarketParams) -> Equilibrium:
    """Unique equilibrium when passive consumers always learn both prices.

    ``eta = q / (2 delta (1 - q))`` here, so ``q = 2 delta eta / (1 + 2 delta eta)``.
    """
    d, cost = params.delta, params.cost_ratio
    h = lambda x: float(full_diffusion_benefit(math.exp(x), d)) - cost
    if h(_LOG_ETA_LO) <= 0:
        raise NoEquilibriumError(
            f"s/v={cost} exceeds the full-diffusion threshold 1 - delta = {1 - d}"
        )
    if h(_LOG_ETA_HI) >= 0:
        raise NoEquilibriumError(f"s/v={cost} too small to resolve eta below 1e12")
    eta = math.exp(brentq(h, _LOG_ETA_LO, _LOG_ETA_HI, xtol=1e-15, rtol=8.9e-16, maxiter=300))
    q = 2 * d * eta / (1 + 2 * d * eta)
    law = price_law(eta, params.s)
    if law.p_hi > params.v * (1 + 1e-12):
        raise NoEquilibriumError("reservation price exceeds the valuation")
    return Equilibrium(
        q=q,
        law=law,
        stable=True,
        profit=q / 2 * law.p_hi,
        residual=full_diffusion_residual(params, law),
    )


def full_diffusion_residual(params: MarketParams, law: PriceLaw) -> float:
    """Searching minus waiting payoff, ``v - E[p] - s - delta (v - E[min])``."""
    v, s, d = params.v, params.s, params.delta
    return (v - law.e_p - s) - d * (v - law.e_pmin)


def full_diffusion_firm_profit(q: float, delta: float, law: PriceLaw, p):
    """``(q/2 + delta (1-q) (1 - F(p))) p``."""
    p = np.asarray(p, dtype=float)
    out = (q / 2 + delta * (1 - q) * (1 - law.cdf(p))) * p
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RhoCheck:
    rho: float
    r: float
    holds: bool


def _rho_gap(dist, params, q, law):
    c = params.delta * (1.0 - network.pgf(dist, 1.0 - q / 2.0))
    return lambda x: c * integrated_cdf(law, x) - (1.0 - params.delta) * (params.v - x)


def rho_solve(dist: DegreeDistribution, params: MarketParams, q: float, law: PriceLaw) -> RhoCheck:
    """Solve ``(1-d)(v - rho) = d (1 - tau(1-q/2)) int_{p_lo}^{rho} F`` on ``[p_lo, v]``.

    Returns ``rho = inf`` when waiting never pays on that interval.
    """
    if not 0 < q < 1:
        raise InvalidArgument(f"q must lie in (0, 1), got {q}")
    g = _rho_gap(dist, params, q, law)
    lo, hi = law.p_lo, params.v
    grid = np.linspace(lo, hi, 101)
    vals = g(grid)
    # uniqueness rests on g increasing; verify before bisecting
    if np.any(np.diff(vals) < -1e-14 * np.abs(vals).max()):
        raise ArithmeticError("rho equation is not monotone on [p_lo, v]")
    if vals[-1] <= 0:
        return RhoCheck(rho=math.inf, r=law.p_hi, holds=True)
    if vals[0] >= 0:
        rho = lo
    else:
        rho = brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=300)
    return RhoCheck(rho=float(rho), r=law.p_hi, holds=law.p_hi <= rho)


def rho_for_equilibrium(dist, params, eq: Equilibrium) -> RhoCheck:
    return rho_solve(dist, params, eq.q, eq.law)


@dataclass(frozen=True)
class PeriodThreeCheck:
    x: float
    p2: float
    p3_bound: float
    t1: float
    holds: bool
    vacuous: bool = False

    @property
    def below_t1(self) -> bool:
        """Third-period bound under ``t(1)``, the comparison used as ``q -> 1``."""
        return self.p3_bound < self.t1


def period_three_check(dist: DegreeDistribution, q: float) -> PeriodThreeCheck:
    """Second- versus third-period chance of being informed by a friend.

    ``x = sum t(k) [1 - (1-q)**(k-1)]`` is the chance that a friend heard from
    one of their other friends, ``p2 = 1 - tau(1-q)`` the chance of hearing in
    period two and ``p3_bound = tau(1-x)`` the largest chance in period three.
    ``holds`` means ``p3_bound < p2``.
    """
    if not 0 < q <= 1:
        raise InvalidArgument(f"q must lie in (0, 1], got {q}")
    k = dist.degrees.astype(float)
    x = float(np.dot(dist.mass, 1.0 - np.power(1.0 - q, k - 1)))
    x = min(max(x, 0.0), 1.0)
    p2 = 1.0 - network.pgf(dist, 1.0 - q)
    p3 = network.pgf(dist, 1.0 - x)
    t1 = dist.t(1)
    if t1 >= 1.0:
        return PeriodThreeCheck(x, p2, p3, t1, holds=False, vacuous=True)
    return PeriodThreeCheck(x, p2, p3, t1, holds=bool(p3 < p2 and p3 < 1.0))
