"""Command-line front end: ``womlab {solve,sweep,verify,plot,asym}``.

Exit codes: 0 success, 1 numerical failure or failed check, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import eq_asym, plotting, sweep
from .eq_baseline import solve_equilibria, stable_equilibrium
from .eq_variants import solve_full_diffusion
from .errors import InvalidArgument, NoEquilibriumError, WomlabError
from .network import DegreeDistribution, degenerate, power_law
from .pricing import MarketParams, firm_profit_baseline
from .simulate import SimConfig, verify

DEFAULTS = dict(v=1.0, s=0.05, delta=0.9, gamma=-1.0, kmax=100)
_FLOATS = ("v", "s", "delta", "gamma")


class UsageError(Exception):
    pass


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys mirror the long flags."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = val
    return out


def _settings(args) -> dict:
    """Merge defaults, preset, config file and flags, in increasing priority."""
    kw = dict(DEFAULTS)
    if getattr(args, "preset", None):
        kw.update(sweep.PRESETS[args.preset].params)
    if getattr(args, "config", None):
        kw.update(read_config(args.config))
    for key, val in vars(args).items():
        if val is not None and key not in ("func", "config", "preset"):
            kw[key] = val
    try:
        for key in _FLOATS:
            kw[key] = float(kw[key])
        kw["kmax"] = int(kw["kmax"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad numeric setting: {exc}")
    return kw


def _params(kw) -> MarketParams:
    try:
        return MarketParams(kw["v"], kw["s"], kw["delta"])
    except InvalidArgument as exc:
        raise UsageError(str(exc))


def _dist(kw) -> DegreeDistribution:
    try:
        if kw.get("dist_csv"):
            return DegreeDistribution.from_csv(Path(kw["dist_csv"]).read_text())
        if kw.get("regular"):
            return degenerate(kw["kmax"])
        return power_law(kw["gamma"], kw["kmax"])
    except (InvalidArgument, OSError, ValueError) as exc:
        raise UsageError(str(exc))


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise WomlabError(f"cannot write {path}: {exc}")


def cmd_solve(args) -> int:
    kw = _settings(args)
    params, dist = _params(kw), _dist(kw)
    header = ["q", "r", "p_lo", "e_p", "profit", "stable"]
    if kw.get("full_diffusion"):
        try:
            eqs = [solve_full_diffusion(params)]
        except NoEquilibriumError:
            eqs = []
    else:
        eqs = solve_equilibria(dist, params)
    if not eqs:
        print("NO-TRADE-ONLY")
        return 0
    rows = [[e.q, e.law.p_hi, e.law.p_lo, e.law.e_p, e.profit, e.stable] for e in eqs]
    print(sweep.write_table(header, rows), end="")
    if kw.get("out"):
        _write(kw["out"], sweep.write_table(header, rows))
    return 0


def cmd_sweep(args) -> int:
    kw = _settings(args)
    if args.preset and sweep.PRESETS[args.preset].curve:
        header, rows = sweep.benefit_rows(args.preset, **{k: kw[k] for k in DEFAULTS})
    else:
        try:
            if args.preset:
                spec = sweep.preset_spec(args.preset, **{k: kw[k] for k in DEFAULTS})
                if args.variable:
                    raise InvalidArgument("--variable cannot be combined with a sweep preset")
            else:
                if not args.variable or args.lo is None or args.hi is None:
                    raise InvalidArgument("sweep needs --preset or --variable with --lo and --hi")
                outputs = tuple(args.outputs.split(",")) if args.outputs else sweep.OUTPUTS
                spec = sweep.SweepSpec(args.variable, args.lo, args.hi, args.steps or 21,
                                       outputs=outputs, **{k: kw[k] for k in DEFAULTS})
        except InvalidArgument as exc:
            raise UsageError(str(exc))
        header, rows = sweep.run_sweep(spec)
    text = sweep.write_table(header, rows)
    _write(args.out, text)
    if not args.no_figure:
        fig = Path(args.out).with_suffix(".svg")
        plotting.plot_csv(args.out, fig)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_verify(args) -> int:
    kw = _settings(args)
    params, dist = _params(kw), _dist(kw)
    eq = stable_equilibrium(dist, params)
    q = eq.q + (args.q_offset or 0.0)
    if not 0 < q < 1:
        raise UsageError(f"offset search probability {q} is outside (0, 1)")
    reps = args.replications
    n_cons = max(1, -(-args.samples // reps))
    cfg = SimConfig(n_cons, reps, args.seed, params, dist, q, eq.law)
    report, checks = verify(cfg)
    print(report.to_csv(), end="")
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag} {c.name}: estimate={c.estimate:.6g} target={c.target:.6g} "
              f"stderr={c.stderr:.3g}")
    if args.out:
        _write(args.out, report.to_csv())
        _write(Path(args.out).with_suffix(".json"), report.to_json())
        grid = np.array([p.price for p in report.profit_at])
        analytic = firm_profit_baseline(dist, q, params.delta, eq.law, grid)
        plotting.plot_profit_check(report.profit_at, analytic, Path(args.out).with_suffix(".svg"))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_plot(args) -> int:
    try:
        plotting.plot_csv(args.csv, args.out)
    except (ValueError, OSError) as exc:
        raise UsageError(f"cannot plot {args.csv}: {exc}")
    print(f"wrote {args.out}")
    return 0


def cmd_asym(args) -> int:
    kw = _settings(args)
    params, dist = _params(kw), _dist(kw)
    eqs = eq_asym.solve_asym(dist, params)
    if not eqs:
        print("NO-TRADE-ONLY")
        return 0
    header = ["khat", "q", "w", "eta_hat", "r", "regime", "stable"]
    rows = [[e.khat, e.q, e.w, e.eta_hat, e.law.p_hi, e.regime, e.stable] for e in eqs]
    text = sweep.write_table(header, rows)
    print(text, end="")
    if kw.get("out"):
        _write(kw["out"], text)
    return 0


def _market_flags(p, preset_names):
    p.add_argument("--v", type=float, help="willingness to pay")
    p.add_argument("--s", type=float, help="search cost")
    p.add_argument("--delta", type=float, help="diffusion speed (second-period discount)")
    p.add_argument("--gamma", type=float, help="power-law exponent of the degree distribution")
    p.add_argument("--kmax", type=int, help="largest degree")
    p.add_argument("--regular", action="store_true", default=None,
                   help="every consumer has exactly kmax friends")
    p.add_argument("--dist-csv", help="degree distribution table with header k,t_k")
    p.add_argument("--preset", choices=preset_names)
    p.add_argument("--config", help="key = value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="womlab",
        description="Equilibrium solver for consumer search with word-of-mouth price information.",
        epilog="Exit codes: 0 success, 1 numerical failure or failed check, 2 bad input.")
    sub = parser.add_subparsers(dest="command", required=True)
    names = sorted(sweep.PRESETS)

    p = sub.add_parser("solve", help="all interior equilibria of the baseline model")
    _market_flags(p, names)
    p.add_argument("--full-diffusion", action="store_true", default=None,
                   help="solve the variant where information reaches everyone")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="stable-equilibrium outcomes over a parameter grid")
    _market_flags(p, names)
    p.add_argument("--variable", choices=sweep.VARIABLES)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--outputs", help="comma list from " + ",".join(sweep.OUTPUTS))
    p.add_argument("--out", required=True)
    p.add_argument("--no-figure", action="store_true", help="skip the SVG next to the CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="Monte Carlo check of the stable equilibrium")
    _market_flags(p, names)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=1_000_000, help="total consumer draws")
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--q-offset", type=float, default=0.0,
                   help="shift q away from equilibrium (negative control)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("csv")
    p.add_argument("out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("asym", help="equilibria when consumers know their own degree")
    _market_flags(p, names)
    p.add_argument("--out")
    p.set_defaults(func=cmd_asym)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NoEquilibriumError, WomlabError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
