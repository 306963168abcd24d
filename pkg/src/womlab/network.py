"""Degree distributions on {1, ..., kmax} and their generating functions.

The probability generating function ``pgf(x) = sum_k t(k) x**k`` and the
price-comparison probability ``tau_tilde(q) = 1 + pgf(1-q) - 2 pgf(1-q/2)``
are the only network statistics the market model needs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvalidArgument

_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Probability mass ``t(k)`` for ``k = 1..kmax``.

    ``mass[i]`` holds ``t(i + 1)``. ``gamma`` and ``normalizer`` are set only
    for power-law distributions, where ``t(k) = normalizer * k**gamma``.
    """

    kmax: int
    mass: np.ndarray
    gamma: Optional[float] = None
    normalizer: Optional[float] = None
    _support: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        kmax = int(self.kmax)
        if kmax < 1:
            raise InvalidArgument(f"kmax must be >= 1, got {self.kmax}")
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size != kmax:
            raise InvalidArgument(f"mass must have exactly kmax={kmax} entries")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise InvalidArgument("degree probabilities must be finite and >= 0")
        total = mass.sum()
        if abs(total - 1.0) > _NORM_TOL:
            raise InvalidArgument(f"degree probabilities sum to {total!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "kmax", kmax)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "_support", np.flatnonzero(mass > 0) + 1)

    @classmethod
    def from_weights(cls, weights) -> "DegreeDistribution":
        """Normalize nonnegative weights for k = 1..len(weights)."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise InvalidArgument("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
            raise InvalidArgument("weights must be finite, >= 0 and not all zero")
        return cls(w.size, w / w.sum())

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(1, self.kmax + 1)

    @property
    def support(self) -> np.ndarray:
        """Degrees carrying positive mass."""
        return self._support

    def t(self, k: int) -> float:
        if 1 <= k <= self.kmax:
            return float(self.mass[k - 1])
        return 0.0

    def to_csv(self) -> str:
        """Serialize as a ``k,t_k`` table with 17 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "t_k"])
        for k, tk in zip(self.degrees, self.mass):
            writer.writerow([int(k), f"{tk:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DegreeDistribution":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["k", "t_k"]:
            raise InvalidArgument("expected header row 'k,t_k'")
        pairs = {}
        for row in rows[1:]:
            if not row:
                continue
            pairs[int(row[0])] = float(row[1])
        if not pairs or min(pairs) < 1:
            raise InvalidArgument("degrees must be >= 1")
        kmax = max(pairs)
        mass = np.zeros(kmax)
        for k, tk in pairs.items():
            mass[k - 1] = tk
        return cls(kmax, mass)


def power_law(gamma: float, kmax: int) -> DegreeDistribution:
    """``t(k) = n * k**gamma`` on ``1..kmax`` with ``n = 1 / sum_j j**gamma``."""
    if not np.isfinite(gamma):
        raise InvalidArgument("gamma must be finite")
    if int(kmax) < 1:
        raise InvalidArgument(f"kmax must be >= 1, got {kmax}")
    k = np.arange(1, int(kmax) + 1, dtype=float)
    w = k ** float(gamma)
    n = 1.0 / w.sum()
    return DegreeDistribution(int(kmax), w * n, gamma=float(gamma), normalizer=n)


def degenerate(k: int, kmax: Optional[int] = None) -> DegreeDistribution:
    """Every consumer has exactly ``k`` friends."""
    kmax = k if kmax is None else kmax
    if not 1 <= k <= kmax:
        raise InvalidArgument(f"need 1 <= k <= kmax, got k={k}, kmax={kmax}")
    mass = np.zeros(kmax)
    mass[k - 1] = 1.0
    return DegreeDistribution(kmax, mass)


def _check_unit(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0.0)) or np.any(x > 1.0):
        raise InvalidArgument(f"{name} must lie in [0, 1]")
    return x


def _out(x, value):
    return float(value) if np.ndim(x) == 0 else value


def pgf(dist: DegreeDistribution, x):
    """Evaluate ``sum_k t(k) x**k`` by Horner's scheme. Accepts arrays."""
    x = _check_unit("x", x)
    coef = np.concatenate(([0.0], dist.mass))
    return _out(x, P.polyval(x, coef))


def comparison_weight(k, w):
    """``1 + (1-w)**k - 2 (1-w/2)**k``: chance that ``k`` friends, each
    searching independently with probability ``w``, report both prices.

    Written through ``expm1``/``log1p`` so the O(w**2) value near ``w = 0``
    is not lost to cancellation.
    """
    k = np.asarray(k, dtype=float)
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.expm1(k * np.log1p(-w))
        b = np.expm1(k * np.log1p(-0.5 * w))
    out = a - 2.0 * b
    # a single friend never reports two prices; keep that term exactly zero
    return np.where(k <= 1, 0.0, out)


def tau_tilde(dist: DegreeDistribution, q):
    """Probability that a consumer's friends, each searching with
    probability ``q``, observed two different prices."""
    q = _check_unit("q", q)
    ks = dist.support
    tk = dist.mass[ks - 1]
    val = comparison_weight(ks[None, :], np.atleast_1d(q)[:, None]) @ tk
    val = np.maximum(val, 0.0)
    return _out(q, val.reshape(np.shape(q)))


def mean_degree(dist: DegreeDistribution) -> float:
    return float(np.dot(dist.degrees, dist.mass))
