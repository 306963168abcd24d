"""Matplotlib rendering of sweep tables and simulation profit curves."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sweep import read_table  # noqa: E402

_RC = {
    "svg.hashsalt": "womlab",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
_SIZE = (6.0, 4.0)


def _save(fig, out):
    fmt = str(out).rsplit(".", 1)[-1].lower()
    meta = {"Date": None} if fmt == "svg" else {}
    fig.savefig(out, format=fmt, metadata=meta)
    plt.close(fig)


def plot_table(header, data, out, title=None):
    """One line per output column against the first column."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=_SIZE)
        x = data[:, 0]
        for j, name in enumerate(header[1:], start=1):
            (line,) = ax.plot(x, data[:, j], label=name, lw=1.5)
            line.set_gid(f"series-{name}")
        ax.set_xlabel(header[0])
        ax.set_ylabel(header[1] if len(header) == 2 else "value")
        if len(header) > 2:
            ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, out)


def plot_csv(csv_path, out):
    header, data = read_table(csv_path)
    plot_table(header, data, out)


def plot_profit_check(points, analytic, out):
    """Simulated profit with 3-standard-error bars over the analytic curve."""
    price = np.array([p.price for p in points])
    prof = np.array([p.profit for p in points])
    err = 3 * np.array([p.stderr for p in points])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=_SIZE)
        (line,) = ax.plot(price, analytic, color="k", lw=1.0, label="analytic")
        line.set_gid("series-analytic")
        bars = ax.errorbar(price, prof, yerr=err, fmt="o", ms=3, capsize=2, label="simulated")
        bars[0].set_gid("series-simulated")
        ax.set_xlabel("price")
        ax.set_ylabel("profit per firm")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, out)
