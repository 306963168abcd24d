"""Equilibrium price law ``F(p) = 1 + eta - eta * p_hi / p`` and its moments.

Everything here is a function of the single shape parameter ``eta`` (ratio
of consumers who see one price to consumers who compare both) and the
search cost ``s``, which fixes the scale through the reservation price.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import network
from .errors import DivergedError, InvalidArgument, NoComparisonError

# Below this value of 1/eta the closed forms lose digits to cancellation and
# the power series take over.
_SERIES_Z = 1e-2
_SERIES_TERMS = 12


@dataclass(frozen=True)
class MarketParams:
    """Valuation ``v``, search cost ``s`` and diffusion speed ``delta``."""

    v: float
    s: float
    delta: float

    def __post_init__(self):
        v, s, d = float(self.v), float(self.s), float(self.delta)
        if not (np.isfinite(v) and v > 0):
            raise InvalidArgument(f"valuation v must be > 0, got {self.v}")
        if not (0 < s < v):
            raise InvalidArgument(f"search cost must satisfy 0 < s < v, got s={self.s}, v={self.v}")
        if not (0 < d < 1):
            raise InvalidArgument(
                f"delta must lie strictly between 0 and 1, got {self.delta}; "
                "at 0 or 1 only the no-trade equilibrium exists"
            )
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "delta", d)

    @property
    def cost_ratio(self) -> float:
        return self.s / self.v


def _z(eta):
    with np.errstate(divide="ignore"):
        return 1.0 / np.asarray(eta, dtype=float)


def _series(z, coef):
    # coef[n] multiplies z**n; evaluated only where z is small
    return np.polynomial.polynomial.polyval(z, coef)


_GAP_COEF = np.array([0.0] + [(-1.0) ** (n + 1) / (n + 1) for n in range(1, _SERIES_TERMS + 1)])
_SPREAD_COEF = np.array([0.0, 0.0] + [(-1.0) ** n * (n - 1) / (n * (n + 1))
                                      for n in range(2, _SERIES_TERMS + 2)])


def log_ratio(eta):
    """``ln(1 + 1/eta)``."""
    return np.log1p(_z(eta))


def search_gap(eta):
    """``1 - eta * ln(1 + 1/eta)``, equal to ``s / p_hi``; tends to ``1/(2 eta)``."""
    z = _z(eta)
    small = z < _SERIES_Z
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 1.0 - np.log1p(z) / z
    out = np.where(small, _series(np.where(small, z, 0.0), _GAP_COEF), direct)
    return out if out.ndim else float(out)


def spread_factor(eta):
    """``(1 + 2 eta) ln(1 + 1/eta) - 2``; behaves like ``1/(6 eta**2)``."""
    z = _z(eta)
    small = z < _SERIES_Z
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1.0 + 2.0 / z) * np.log1p(z) - 2.0
    out = np.where(small, _series(np.where(small, z, 0.0), _SPREAD_COEF), direct)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PriceLaw:
    """Support ``[p_lo, p_hi]`` with ``p_hi = r`` and the first moments."""

    eta: float
    p_hi: float
    p_lo: float
    e_p: float
    e_pmin: float

    @property
    def dispersion(self) -> float:
        return self.p_hi - self.p_lo

    @property
    def relative_dispersion(self) -> float:
        """``(p_hi - p_lo) / p_hi = 1 / (1 + eta)``."""
        return 1.0 / (1.0 + self.eta)

    def cdf(self, p):
        return cdf(self, p)

    def quantile(self, u):
        return quantile(self, u)


def price_law(eta: float, s: float) -> PriceLaw:
    """Build the price law for shape ``eta`` at search cost ``s``.

    The upper bound is the reservation price ``r = s / (1 - eta ln(1+1/eta))``,
    so ``p_hi - E[p] = s`` holds by construction.
    """
    if not eta > 0:
        raise InvalidArgument(f"eta must be > 0, got {eta}")
    if not s > 0:
        raise InvalidArgument(f"s must be > 0, got {s}")
    gap = search_gap(eta)
    if not (np.isfinite(eta) and np.isfinite(gap) and gap > 0):
        raise DivergedError(f"price law diverges at eta={eta}")
    p_hi = s / gap
    if not np.isfinite(p_hi):
        raise DivergedError(f"reservation price overflows at eta={eta}")
    e_p = p_hi - s
    spread = eta * p_hi * spread_factor(eta)
    return PriceLaw(
        eta=float(eta),
        p_hi=float(p_hi),
        p_lo=float(eta / (1.0 + eta) * p_hi),
        e_p=float(e_p),
        e_pmin=float(e_p - spread),
    )


def cdf(law: PriceLaw, p):
    """``F(p)``, clamped to 0 below the support and 1 at or above ``p_hi``."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        inner = 1.0 + law.eta - law.eta * law.p_hi / p
    out = np.where(p >= law.p_hi, 1.0, np.where(p <= law.p_lo, 0.0, np.clip(inner, 0.0, 1.0)))
    return out if out.ndim else float(out)


def quantile(law: PriceLaw, u):
    """Inverse CDF, ``eta * p_hi / (1 + eta - u)``."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)) or np.any(u > 1):
        raise InvalidArgument("u must lie in [0, 1]")
    out = law.eta * law.p_hi / (1.0 + law.eta - u)
    out = np.where(u >= 1.0, law.p_hi, out)
    return out if out.ndim else float(out)


def integrated_cdf(law: PriceLaw, x):
    """``int_{p_lo}^{x} F(p) dp`` in closed form (``F = 1`` past ``p_hi``)."""
    x = np.asarray(x, dtype=float)
    xin = np.clip(x, law.p_lo, law.p_hi)
    inside = (1.0 + law.eta) * (xin - law.p_lo) - law.eta * law.p_hi * np.log(xin / law.p_lo)
    out = inside + np.maximum(x - law.p_hi, 0.0)
    return out if out.ndim else float(out)


def expected_price(eta, s):
    """``E[p] = s * eta ln(1+1/eta) / (1 - eta ln(1+1/eta))``; increasing in eta."""
    gap = search_gap(eta)
    return s * (1.0 - gap) / gap


def _one_price_share(dist, q, delta):
    q = np.asarray(q, dtype=float)
    return q / 2.0 + delta * (1.0 - q) * (
        network.pgf(dist, 1.0 - q / 2.0) - network.pgf(dist, 1.0 - q) / 2.0
    )


def _two_price_share(dist, q, delta):
    q = np.asarray(q, dtype=float)
    return delta * (1.0 - q) * network.tau_tilde(dist, q)


def eta_array(dist, q, delta):
    """Vectorized ``eta(q)``; ``inf`` where nobody compares prices."""
    num = _one_price_share(dist, q, delta)
    den = _two_price_share(dist, q, delta)
    with np.errstate(divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def eta_baseline(dist, q: float, delta: float) -> float:
    """Ratio of single-price consumers to price-comparing consumers."""
    if not 0 < q < 1:
        raise InvalidArgument(f"q must lie in (0, 1), got {q}")
    if not 0 < delta < 1:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    den = float(_two_price_share(dist, q, delta))
    if den <= 0:
        raise NoComparisonError(
            "no consumer compares prices (t(1) = 1 or q too small); eta diverges"
        )
    return float(_one_price_share(dist, q, delta)) / den


def firm_profit_baseline(dist, q: float, delta: float, law: PriceLaw, p):
    """Per-firm expected profit of charging ``p`` against a rival drawing from ``law``."""
    p = np.asarray(p, dtype=float)
    tol = 1e-12 * law.p_hi
    if np.any(p < law.p_lo - tol) or np.any(p > law.p_hi + tol):
        raise InvalidArgument("price outside the support of the price law")
    share = _one_price_share(dist, q, delta) + _two_price_share(dist, q, delta) * (1.0 - cdf(law, p))
    out = share * p
    return out if np.ndim(out) else float(out)
