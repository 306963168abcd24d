"""Asymmetric model: consumers know their own degree, firms only the distribution.

Types with fewer than ``khat`` friends always search, type ``khat`` searches
with probability ``q`` and better-connected types wait for word of mouth.
An equilibrium is either *interior* (type ``khat`` indifferent, ``0 < q < 1``)
or *boundary* (``q = 1``; type ``khat`` weakly prefers to search while the
next type weakly prefers to wait).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.stats import binom

from .eq_baseline import _GRID, _slope, benefit_from_eta
from .errors import InvalidArgument, NoComparisonError, NoEquilibriumError
from .network import DegreeDistribution, comparison_weight, mean_degree
from .pricing import MarketParams, PriceLaw, cdf, price_law

INTERIOR, BOUNDARY = "interior", "boundary"


@dataclass(frozen=True)
class AsymEquilibrium:
    khat: int
    q: float
    w: float
    w_hat: float
    eta_hat: float
    W: float
    law: PriceLaw
    regime: str
    stable: bool
    residual: float

    @property
    def r(self) -> float:
        return self.law.p_hi


def _check_khat(dist, khat):
    if not 1 <= khat <= dist.kmax:
        raise InvalidArgument(f"khat must lie in [1, {dist.kmax}], got {khat}")


def search_probabilities(dist: DegreeDistribution, khat: int, q: float) -> Tuple[float, float]:
    """``(w_hat, w)``: population-average and degree-weighted (neighbor) search probability."""
    _check_khat(dist, khat)
    below = dist.mass[: khat - 1]
    k_below = np.arange(1, khat)
    t_hat = dist.t(khat)
    w_hat = below.sum() + t_hat * q
    w = (np.dot(below, k_below) + t_hat * khat * q) / mean_degree(dist)
    return float(min(w_hat, 1.0)), float(min(w, 1.0))


def _passive_weights(dist, khat, q):
    """Degrees and mass of consumers who wait: ``(1-q) t(khat)`` and ``t(k)`` above."""
    ks = np.arange(khat, dist.kmax + 1)
    om = dist.mass[khat - 1:].copy()
    om[0] *= 1.0 - q
    return ks, om


def shares(dist: DegreeDistribution, khat: int, q: float, delta: float) -> Tuple[float, float]:
    """Shares of consumers who see one price and who compare two prices."""
    w_hat, w = search_probabilities(dist, khat, q)
    ks, om = _passive_weights(dist, khat, q)
    one = (1 - w / 2) ** ks - (1 - w) ** ks / 2
    two = comparison_weight(ks, w)
    return w_hat / 2 + delta * np.dot(om, one), delta * float(np.dot(om, two))


def eta_hat(dist: DegreeDistribution, khat: int, q: float, delta: float) -> float:
    """Ratio of single-price consumers to price comparers."""
    if not 0 <= q <= 1:
        raise InvalidArgument(f"q must lie in [0, 1], got {q}")
    one, two = shares(dist, khat, q, delta)
    if two <= 0:
        raise NoComparisonError(f"nobody compares prices at khat={khat}, q={q}")
    return float(one / two)


def benefit(dist: DegreeDistribution, delta: float, khat: int, q: float,
            k: Optional[int] = None) -> float:
    """Normalized search benefit of a degree-``k`` consumer (default ``khat``).

    Compare with ``s/v``: larger means the type strictly prefers to search.
    """
    k = khat if k is None else k
    _, w = search_probabilities(dist, khat, q)
    try:
        eta = eta_hat(dist, khat, q, delta)
    except NoComparisonError:
        return 0.0
    return float(benefit_from_eta(eta, delta, (1 - w) ** k, comparison_weight(k, w)))


def asym_residual(dist: DegreeDistribution, params: MarketParams, khat: int, q: float,
                  k: Optional[int] = None) -> float:
    return benefit(dist, params.delta, khat, q, k) - params.cost_ratio


def _residual_grid(dist, params, khat, q):
    """``asym_residual`` for type ``khat`` over an array of ``q`` values."""
    q = np.asarray(q, dtype=float)[:, None]
    d = params.delta
    t_hat = dist.t(khat)
    below = dist.mass[: khat - 1]
    w_hat = np.minimum(below.sum() + t_hat * q, 1.0)
    w = np.minimum((np.dot(below, np.arange(1, khat)) + t_hat * khat * q) / mean_degree(dist), 1.0)
    ks = np.arange(khat, dist.kmax + 1)[None, :]
    om = np.broadcast_to(dist.mass[khat - 1:], (q.shape[0], ks.shape[1])).copy()
    om[:, 0] *= 1.0 - q[:, 0]
    one = w_hat[:, 0] / 2 + d * np.sum(om * ((1 - w / 2) ** ks - (1 - w) ** ks / 2), axis=1)
    two = d * np.sum(om * comparison_weight(ks, w), axis=1)
    with np.errstate(divide="ignore"):
        eta = np.where(two > 0, one / np.where(two > 0, two, 1.0), np.inf)
    w = w[:, 0]
    return benefit_from_eta(eta, d, (1 - w) ** khat, comparison_weight(khat, w)) - params.cost_ratio


def _build(dist, params, khat, q, regime, stable, residual) -> Optional[AsymEquilibrium]:
    w_hat, w = search_probabilities(dist, khat, q)
    eta = eta_hat(dist, khat, q, params.delta)
    law = price_law(eta, params.s)
    if law.p_hi > params.v * (1 + 1e-12):
        return None
    return AsymEquilibrium(
        khat=khat, q=float(q), w=w, w_hat=w_hat, eta_hat=eta,
        W=float(comparison_weight(khat, w)), law=law, regime=regime,
        stable=stable, residual=residual,
    )


def solve_asym(dist: DegreeDistribution, params: MarketParams) -> List[AsymEquilibrium]:
    """All interior and boundary equilibria, sorted by ``w``."""
    support = [int(k) for k in dist.support]
    out = []
    for i, khat in enumerate(support):
        f = lambda x, kh=khat: asym_residual(dist, params, kh, x)
        vals = _residual_grid(dist, params, khat, _GRID)
        for j in range(len(_GRID) - 1):
            a, b = _GRID[j], _GRID[j + 1]
            if vals[j] * vals[j + 1] < 0:
                q = brentq(f, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
                eq = _build(dist, params, khat, q, INTERIOR, _slope(f, q) < 0, f(q))
                if eq is not None:
                    out.append(eq)
        if i + 1 < len(support):
            k_next = support[i + 1]
            here = asym_residual(dist, params, khat, 1.0)
            nxt = asym_residual(dist, params, khat, 1.0, k=k_next)
            if here >= 0 and nxt <= 0:
                # the benefit curve drops vertically through s/v here
                eq = _build(dist, params, khat, 1.0, BOUNDARY, True, here)
                if eq is not None:
                    out.append(eq)
    return sorted(out, key=lambda e: e.w)


def stable_asym(dist: DegreeDistribution, params: MarketParams) -> AsymEquilibrium:
    stable = [e for e in solve_asym(dist, params) if e.stable]
    if not stable:
        raise NoEquilibriumError("no stable equilibrium in the asymmetric model")
    return stable[-1]


def firm_profit_asym(dist: DegreeDistribution, params: MarketParams, eq: AsymEquilibrium, p):
    """Per-firm profit of charging ``p``, summed term by term over degrees and
    the number ``m`` of searching friends."""
    law = eq.law
    p = np.asarray(p, dtype=float)
    tol = 1e-12 * law.p_hi
    if np.any(p < law.p_lo - tol) or np.any(p > law.p_hi + tol):
        raise InvalidArgument("price outside the support of the price law")
    d = params.delta
    ks, om = _passive_weights(dist, eq.khat, eq.q)
    one = two = 0.0
    for k, weight in zip(ks, om):
        if weight == 0:
            continue
        m = np.arange(1, k + 1)
        pm = binom.pmf(m, k, eq.w)
        one += weight * (np.dot(pm, 0.5 ** m) + (1 - eq.w) ** k / 2)
        two += weight * np.dot(pm, 1 - 0.5 ** (m - 1))
    out = (eq.w_hat / 2 + d * one + d * two * (1 - cdf(law, p))) * p
    return out if out.ndim else float(out)


def waiting_payoffs(dist: DegreeDistribution, params: MarketParams, eq: AsymEquilibrium) -> np.ndarray:
    """Payoff of waiting for each degree ``k = 1..kmax`` at the equilibrium prices."""
    k = dist.degrees
    law, w = eq.law, eq.w
    spread = law.e_p - law.e_pmin
    return params.delta * (params.v - law.e_p + comparison_weight(k, w) * spread
                           - (1 - w) ** k * params.s)


def cutoff_monotonicity_check(dist: DegreeDistribution, params: MarketParams,
                              eq: AsymEquilibrium) -> bool:
    """True when the waiting payoff strictly increases with the degree."""
    if not 0 < eq.w < 1:
        raise InvalidArgument(f"needs 0 < w < 1, got w={eq.w}")
    return bool(np.all(np.diff(waiting_payoffs(dist, params, eq)) > 0))


def benefit_curve(dist: DegreeDistribution, delta: float, points_per_type: int = 50):
    """``(w, benefit)`` pairs tracing every cutoff type in order of ``w``.

    Consecutive types meet at the same ``w`` with different benefits, which
    shows up as vertical segments.
    """
    rows = []
    for khat in dist.support:
        for q in np.linspace(0.0, 1.0, points_per_type):
            _, w = search_probabilities(dist, int(khat), q)
            rows.append((w, benefit(dist, delta, int(khat), q), int(khat), q))
    return rows
