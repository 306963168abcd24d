"""Monte Carlo simulation of the two-period baseline market.

Each replication draws the two posted prices from the price law and then a
batch of consumers. Friends' search decisions are i.i.d. Bernoulli(q) and
friends pick a firm uniformly, the same independence structure that the
binomial payoff formulas assume. Replications use independent PCG64 streams
spawned from one ``SeedSequence``, so results do not depend on how the work
is split across threads.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import network
from .errors import InvalidArgument
from .network import DegreeDistribution
from .pricing import MarketParams, PriceLaw, firm_profit_baseline, quantile

GENERATOR = "numpy.random.PCG64 (SeedSequence.spawn per replication)"
_MARKET_STREAM, _PROFIT_STREAM = 0, 1


@dataclass(frozen=True, eq=False)
class SimConfig:
    n_consumers: int
    n_replications: int
    seed: int
    params: MarketParams
    dist: DegreeDistribution
    q: float
    law: PriceLaw
    workers: Optional[int] = None

    def __post_init__(self):
        if int(self.n_consumers) < 1:
            raise InvalidArgument("n_consumers must be >= 1")
        if int(self.n_replications) < 1:
            raise InvalidArgument("n_replications must be >= 1")
        if not 0 < self.q < 1:
            raise InvalidArgument(f"q must lie in (0, 1), got {self.q}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr


@dataclass(frozen=True)
class ProfitPoint:
    price: float
    demand: float
    profit: float
    stderr: float


@dataclass
class SimReport:
    payoff_active: Estimate
    payoff_passive: Estimate
    payoff_gap: Estimate
    e_price_paid: Estimate
    comparer_fraction: Estimate
    profit_at: List[ProfitPoint] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    def metrics(self) -> List[Tuple[str, Estimate]]:
        rows = [
            ("payoff_active", self.payoff_active),
            ("payoff_passive", self.payoff_passive),
            ("payoff_gap", self.payoff_gap),
            ("e_price_paid", self.e_price_paid),
            ("comparer_fraction", self.comparer_fraction),
        ]
        for pt in self.profit_at:
            rows.append((f"profit@{pt.price:.17g}", Estimate(pt.profit, pt.stderr)))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "mean", "stderr"])
        for name, est in self.metrics():
            w.writerow([name, f"{est.mean:.17g}", f"{est.stderr:.17g}"])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _streams(cfg: SimConfig, which: int):
    root = np.random.SeedSequence(int(cfg.seed))
    return root.spawn(2)[which].spawn(int(cfg.n_replications))


def _draw_consumers(rng, cfg: SimConfig):
    """Search choice, own firm, degree, searching friends and friends at firm 0."""
    n = int(cfg.n_consumers)
    active = rng.random(n) < cfg.q
    own = rng.integers(0, 2, n)
    k = rng.choice(cfg.dist.degrees, size=n, p=cfg.dist.mass)
    m = rng.binomial(k, cfg.q)
    at0 = rng.binomial(m, 0.5)
    return active, own, m, at0


def _workers(cfg: SimConfig) -> int:
    if cfg.workers is not None:
        return max(1, int(cfg.workers))
    env = os.environ.get("WOMLAB_THREADS")
    return max(1, int(env)) if env else 1


def _run(cfg, which, fn):
    seqs = _streams(cfg, which)
    n = _workers(cfg)
    if n == 1:
        return [fn(np.random.Generator(np.random.PCG64(s))) for s in seqs]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(lambda s: fn(np.random.Generator(np.random.PCG64(s))), seqs))


def _estimate(x) -> Estimate:
    x = np.asarray(x, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return Estimate(float("nan"), float("inf"))
    se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else float("inf")
    return Estimate(float(np.mean(x)), se)


def _market_replication(cfg: SimConfig):
    v, s, d = cfg.params.v, cfg.params.s, cfg.params.delta

    def one(rng):
        prices = np.asarray(quantile(cfg.law, rng.random(2)))
        active, own, m, at0 = _draw_consumers(rng, cfg)
        p_own = prices[own]
        # every consumer is scored under both choices; friends are unaffected
        pay_active = v - p_own - s
        both = (at0 > 0) & (at0 < m)
        single = np.where(at0 == m, prices[0], prices[1])
        paid_passive = np.where(m == 0, p_own + s, np.where(both, prices.min(), single))
        pay_passive = d * (v - paid_passive)
        single_buyer = active | ~both
        realized = np.where(active | (m == 0), p_own, single)
        return (
            pay_active.mean(),
            pay_passive.mean(),
            (pay_active - pay_passive).mean(),
            realized[single_buyer].mean() if single_buyer.any() else np.nan,
            (~active & both).mean(),
        )

    return one


def simulate_market(cfg: SimConfig, price_grid: Optional[Sequence[float]] = None) -> SimReport:
    """Estimate consumer payoffs, prices paid and the comparer share at ``(q, law)``.

    With ``price_grid`` the focal-firm profit curve is estimated as well.
    """
    rows = np.array(_run(cfg, _MARKET_STREAM, _market_replication(cfg)))
    report = SimReport(
        payoff_active=_estimate(rows[:, 0]),
        payoff_passive=_estimate(rows[:, 1]),
        payoff_gap=_estimate(rows[:, 2]),
        e_price_paid=_estimate(rows[:, 3]),
        comparer_fraction=_estimate(rows[:, 4]),
        metadata={
            "generator": GENERATOR,
            "seed": int(cfg.seed),
            "n_consumers": int(cfg.n_consumers),
            "n_replications": int(cfg.n_replications),
            "q": float(cfg.q),
        },
    )
    if price_grid is not None:
        report.profit_at = profit_curve(cfg, price_grid)
    return report


def profit_curve(cfg: SimConfig, price_grid: Sequence[float]) -> List[ProfitPoint]:
    """Focal-firm demand and profit at each grid price; only the rival's price is random."""
    law = cfg.law
    grid = np.asarray(price_grid, dtype=float)
    tol = 1e-12 * law.p_hi
    if grid.ndim != 1 or np.any(grid < law.p_lo - tol) or np.any(grid > law.p_hi + tol):
        raise InvalidArgument("price grid must lie within the price support")
    d = cfg.params.delta

    def one(rng):
        rival = quantile(law, rng.random())
        active, own, m, at0 = _draw_consumers(rng, cfg)
        # focal firm is firm 0
        sure = np.where(active, own == 0, d * np.where(m == 0, own == 0, (at0 == m) & (m > 0)))
        split = d * (~active & (at0 > 0) & (at0 < m))
        demand = sure.mean() + split.mean() * (grid < rival)
        return demand, demand * grid

    out = _run(cfg, _PROFIT_STREAM, one)
    demand = np.array([o[0] for o in out])
    profit = np.array([o[1] for o in out])
    pts = []
    for j, p in enumerate(grid):
        est = _estimate(profit[:, j])
        pts.append(ProfitPoint(float(p), float(demand[:, j].mean()), est.mean, est.stderr))
    return pts


@dataclass
class VerifyResult:
    name: str
    estimate: float
    target: float
    stderr: float
    passed: bool


def verify(cfg: SimConfig, n_prices: int = 11, k: float = 3.0) -> Tuple[SimReport, List[VerifyResult]]:
    """Compare simulation estimates with the analytic model at ``k`` standard errors."""
    law, dist, d = cfg.law, cfg.dist, cfg.params.delta
    grid = np.linspace(law.p_lo, law.p_hi, n_prices)
    rep = simulate_market(cfg, grid)
    checks = [
        ("indifference", rep.payoff_gap, 0.0),
        ("e_price_paid", rep.e_price_paid, law.e_p),
        ("comparer_fraction", rep.comparer_fraction,
         (1 - cfg.q) * float(network.tau_tilde(dist, cfg.q))),
    ]
    analytic = firm_profit_baseline(dist, cfg.q, d, law, grid)
    for pt, target in zip(rep.profit_at, analytic):
        checks.append((f"profit@{pt.price:.6g}", Estimate(pt.profit, pt.stderr), float(target)))
    results = [VerifyResult(name, est.mean, target, est.stderr, est.within(target, k))
               for name, est, target in checks]
    return rep, results
