"""Figure rendering for the report CSVs (PNG files next to the data).

Figures are a convenience view; the CSVs remain the authoritative output
and all cross-checks read those.  The Agg backend is forced so rendering
works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_REF_STYLE = dict(linestyle="--", linewidth=0.9, alpha=0.7)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def growth_figure(xs, sums, path, *, q: int, char_id: int) -> Path:
    xs = np.asarray(xs, dtype=float)
    ms = np.abs(np.asarray(sums, dtype=float))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    pos = ms >= 1
    ax.loglog(xs[pos], ms[pos], "o-", ms=3.5, lw=1.0, label="|partial sum|")
    anchor = ms[pos][-1] if pos.any() else 1.0
    x_end = xs[-1]
    for exp, lab in ((0.25, "x^(1/4)"), (1 / 3, "x^(1/3)"), (0.5, "x^(1/2)")):
        ax.loglog(xs, anchor * (xs / x_end) ** exp, label=lab, **_REF_STYLE)
    ax.set_xlabel("x")
    ax.set_ylabel("|sum of f(n), n <= x|")
    ax.set_title(f"growth of the partial sums (q={q}, char {char_id})")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def omega_figure(xs, ratios, analytic_constant, path, *, q: int) -> Path:
    xs = np.asarray(xs, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogx(xs, ratios, "o-", ms=3.5, lw=1.0, label="|partial sum| / x^(1/4)")
    ax.axhline(analytic_constant, color="crimson",
               label=f"lower-bound constant {analytic_constant:.4g}", **_REF_STYLE)
    ax.set_xlabel("x")
    ax.set_ylabel("ratio")
    ax.set_title(f"x^(1/4) ratio against the first-zero constant (q={q})")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def tail_figure(rows, path, *, q: int) -> Path:
    """rows: (sigma, m, abs_tail) triples, one line per sigma."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_sigma: dict[float, list[tuple[int, float]]] = {}
    for sigma, m, z in rows:
        by_sigma.setdefault(sigma, []).append((m, z))
    for sigma, pts in sorted(by_sigma.items()):
        ms = np.array([p[0] for p in pts], dtype=float)
        zs = np.array([p[1] for p in pts], dtype=float)
        (line,) = ax.loglog(ms, zs, "o-", ms=3.5, lw=1.0, label=f"sigma={sigma:g}")
        ref = zs[0] * (ms / ms[0]) ** (0.25 - sigma)
        ax.loglog(ms, ref, color=line.get_color(), **_REF_STYLE)
    ax.set_xlabel("truncation point M")
    ax.set_ylabel("|tail|")
    ax.set_title(f"truncation-tail decay vs the M^(1/4 - sigma) reference (q={q})")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def random_model_figure(xs, quantiles, path, *, trials: int) -> Path:
    """quantiles: map probability -> array of |sum|/sqrt(x) values over xs."""
    xs = np.asarray(xs, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for p in sorted(quantiles):
        ax.semilogx(xs, quantiles[p], "o-", ms=3, lw=1.0, label=f"q{int(100 * p):02d}")
    ax.set_xlabel("x")
    ax.set_ylabel("|partial sum| / sqrt(x)")
    ax.set_title(f"random multiplicative model, {trials} trials")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)
