"""Figures for the CLI report path (written next to the CSV output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

from .prime_sums import ResidualPoint  # noqa: E402


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamp/version metadata, so reruns give the same file
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_residuals(points: list[ResidualPoint], path: str | Path) -> Path:
    """Residual against x on a log axis, with both envelopes as a band."""
    xs = [p.x for p in points]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(xs, [p.residual for p in points], "o-", ms=3, lw=1, label="residual")
    for attr, style, name in (("korobov", "--", "Korobov envelope"), ("rh", ":", "RH envelope")):
        env = [getattr(p, attr) for p in points]
        line = ax.plot(xs, env, style, lw=1, label=name)[0]
        ax.plot(xs, [-v for v in env], style, lw=1, color=line.get_color())
    ax.axhline(0.0, color="0.5", lw=0.6)
    ax.set_xscale("log")
    ax.set_yscale("symlog", linthresh=_linthresh(points))
    ax.set_xlabel("x")
    ax.set_ylabel("empirical - main term")
    ax.set_title(points[0].statistic if points else "")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def _linthresh(points: list[ResidualPoint]) -> float:
    mags = [abs(v) for p in points for v in (p.residual, p.korobov, p.rh) if v and v == v]
    return 0.1 * min(mags) if mags else 1.0


def plot_simulation(rows: list[dict], path: str | Path) -> Path:
    """Per-seed residual of the Cramer-model product, colored by sign."""
    seeds = [str(r["seed"]) for r in rows]
    res = [r["residual"] for r in rows]
    colors = ["tab:red" if v > 0 else "tab:blue" for v in res]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.3 * len(rows) + 2), 3.6))
    ax.bar(seeds, res, color=colors)
    ax.axhline(0.0, color="0.3", lw=0.6)
    ax.set_xlabel("seed")
    ax.set_ylabel(r"$\sqrt{x}\,(\prod(1-1/c)^{-1} - e^\gamma \log x)$")
    ax.tick_params(axis="x", labelsize=7, rotation=90)
    return _save(fig, path)


def plot_abundant(rows: list[dict], path: str | Path) -> Path:
    """N/phi(N) and sigma(N)/N against e^gamma log log N."""
    ln = [r["log_n"] for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(ln, [r["ratio_phi"] for r in rows], "o-", ms=3, label=r"$N/\varphi(N)$")
    ax.plot(ln, [r["ratio_sigma"] for r in rows], "s-", ms=3, label=r"$\sigma(N)/N$")
    ax.plot(ln, [r["rhs_cor8"] for r in rows], "k--", lw=1, label=r"$e^\gamma \log\log N$")
    ax.set_xlabel("log N")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)
