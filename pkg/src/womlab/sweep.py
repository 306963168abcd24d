"""Parameter sweeps, figure presets and the CSV format they write."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import eq_asym
from .eq_baseline import rhs_ic, stable_equilibrium
from .errors import InvalidArgument, WomlabError
from .network import power_law
from .pricing import MarketParams

VARIABLES = ("gamma", "delta", "s", "kmax")
OUTPUTS = ("q", "e_price", "profit", "eta", "dispersion")
NA = "NA"


def fmt(x) -> str:
    """17 significant digits, ``NA`` for missing values."""
    if isinstance(x, str):
        return x
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return NA
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    steps: int
    v: float = 1.0
    s: float = 0.05
    delta: float = 0.9
    gamma: float = -1.0
    kmax: int = 100
    outputs: Tuple[str, ...] = OUTPUTS

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise InvalidArgument(f"sweep variable must be one of {VARIABLES}, got {self.variable!r}")
        if not self.lo < self.hi:
            raise InvalidArgument("sweep range needs lo < hi")
        if int(self.steps) < 2:
            raise InvalidArgument("sweep needs at least 2 steps")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise InvalidArgument(f"unknown outputs {bad}; choose from {OUTPUTS}")

    def values(self) -> np.ndarray:
        xs = np.linspace(self.lo, self.hi, int(self.steps))
        if self.variable == "kmax":
            xs = np.unique(np.rint(xs).astype(int))
        return xs


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    params: Dict[str, float]
    sweep: Optional[Tuple[str, float, float, int]] = None
    outputs: Tuple[str, ...] = OUTPUTS
    curve: Optional[str] = None  # "baseline" or "asym" benefit curve


_FIG1 = dict(v=1.0, s=0.05, delta=0.9, gamma=-1.0, kmax=100)
_FIG23 = dict(v=1.0, s=0.05, delta=0.9, gamma=-1.0, kmax=100)
_FIG456 = dict(v=1.0, s=0.05, delta=0.9, gamma=0.0, kmax=100)
_FIG7 = dict(v=1.0, s=0.05, delta=0.5, gamma=0.0, kmax=100)
_FIG8 = dict(v=1.0, s=0.025, delta=0.92, gamma=-2.5, kmax=5)

PRESETS: Dict[str, Preset] = {
    "fig1": Preset("fig1", "search benefit against q", _FIG1, curve="baseline"),
    "fig2": Preset("fig2", "share of searchers against gamma", _FIG23, ("gamma", -2.0, 2.0, 41), ("q",)),
    "fig3": Preset("fig3", "expected price against gamma", _FIG23, ("gamma", -2.0, 2.0, 41), ("e_price",)),
    "fig4": Preset("fig4", "share of searchers against delta", _FIG456, ("delta", 0.1, 0.94, 43), ("q",)),
    "fig5": Preset("fig5", "expected price against delta", _FIG456, ("delta", 0.1, 0.94, 43), ("e_price",)),
    "fig6": Preset("fig6", "firm profit against delta", _FIG456, ("delta", 0.1, 0.94, 43), ("profit",)),
    "fig7": Preset("fig7", "expected price against s", _FIG7, ("s", 0.0025, 0.3, 60), ("e_price",)),
    "fig8": Preset("fig8", "asymmetric search benefit against w", _FIG8, curve="asym"),
}


def preset_spec(name: str, **overrides) -> SweepSpec:
    pre = PRESETS[name]
    if pre.sweep is None:
        raise InvalidArgument(f"preset {name} is a benefit curve, not a parameter sweep")
    var, lo, hi, steps = pre.sweep
    kw = dict(pre.params)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepSpec(var, lo, hi, steps, outputs=pre.outputs,
                     **{k: kw[k] for k in ("v", "s", "delta", "gamma", "kmax")})


def _point(spec: SweepSpec, x) -> List:
    kw = dict(v=spec.v, s=spec.s, delta=spec.delta, gamma=spec.gamma, kmax=spec.kmax)
    kw[spec.variable] = int(x) if spec.variable == "kmax" else float(x)
    try:
        dist = power_law(kw["gamma"], int(kw["kmax"]))
        eq = stable_equilibrium(dist, MarketParams(kw["v"], kw["s"], kw["delta"]))
    except WomlabError:
        return [x] + [math.nan] * len(spec.outputs) + ["no-equilibrium"]
    vals = dict(q=eq.q, e_price=eq.law.e_p, profit=eq.profit, eta=eq.law.eta,
                dispersion=eq.law.dispersion)
    return [x] + [vals[o] for o in spec.outputs] + ["ok"]


def _threads() -> int:
    env = os.environ.get("WOMLAB_THREADS")
    return max(1, int(env)) if env else 1


def run_sweep(spec: SweepSpec) -> Tuple[List[str], List[List]]:
    """Stable-equilibrium outcomes at each grid value, in grid order."""
    xs = list(spec.values())
    n = _threads()
    if n == 1:
        rows = [_point(spec, x) for x in xs]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            rows = list(ex.map(lambda x: _point(spec, x), xs))
    return [spec.variable, *spec.outputs, "status"], rows


def benefit_rows(name: str, points: int = 201, **overrides) -> Tuple[List[str], List[List]]:
    """Benefit-of-search curve against the cost line for a curve preset."""
    pre = PRESETS[name]
    kw = dict(pre.params)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    dist = power_law(kw["gamma"], int(kw["kmax"]))
    cost = kw["s"] / kw["v"]
    if pre.curve == "baseline":
        q = np.linspace(1e-3, 1 - 1e-3, points)
        b = rhs_ic(dist, kw["delta"], q)
        return ["q", "benefit", "cost"], [[x, y, cost] for x, y in zip(q, b)]
    if pre.curve == "asym":
        per = max(2, points // max(1, len(dist.support)))
        rows = eq_asym.benefit_curve(dist, kw["delta"], per)
        return ["w", "benefit", "cost"], [[w, b, cost] for w, b, _, _ in rows]
    raise InvalidArgument(f"preset {name} has no benefit curve")


def read_table(path) -> Tuple[List[str], np.ndarray]:
    """Read a sweep CSV back; ``NA`` becomes NaN and text columns are dropped."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise ValueError(f"{path}: need at least two columns")
    if not body:
        raise ValueError(f"{path}: no data rows")
    keep = []
    for j, name in enumerate(header):
        col = []
        for r in body:
            if len(r) != len(header):
                raise ValueError(f"{path}: ragged row {r}")
            col.append(r[j])
        try:
            vals = [math.nan if c == NA else float(c) for c in col]
        except ValueError:
            if j == 0:
                raise ValueError(f"{path}: first column must be numeric")
            continue
        keep.append((name, vals))
    if len(keep) < 2:
        raise ValueError(f"{path}: no numeric output columns")
    return [k for k, _ in keep], np.array([v for _, v in keep]).T
