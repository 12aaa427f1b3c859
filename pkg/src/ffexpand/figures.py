"""Matplotlib figure rendering for sweep reports.

Every sweep that writes delimited output can also render a figure next
to it (same stem, .png). Figures are a view of the CSV, never an input
to anything, and are excluded from the byte-determinism contract (the
CSV and JSON summaries carry that).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["spectrum_figure", "curve_sweep_figure", "incidence_figure",
           "expansion_figure"]

_DPI = 130


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def spectrum_figure(reports: list[dict], path: str) -> str:
    """Second-eigenvalue ratio and principal eigenvalue across q."""
    qs = [r["q"] for r in reports]
    ratios = [r["ratio_q56"] for r in reports]
    lam1 = [r["lambda1"] for r in reports]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(qs, ratios, "o-", color="tab:blue")
    ax1.set_xlabel("q")
    ax1.set_ylabel(r"$|\lambda_2| / q^{5/6}$")
    ax1.set_title("second eigenvalue ratio")
    ax2.plot(qs, lam1, "s-", color="tab:orange", label=r"$\lambda_1$")
    ax2.plot(qs, qs, "--", color="gray", label="q")
    ax2.set_xlabel("q")
    ax2.set_ylabel(r"$\lambda_1$")
    ax2.legend()
    ax2.set_title("principal eigenvalue vs q")
    return _save(fig, path)


def curve_sweep_figure(summaries: list[dict], records_by_q: dict, path: str) -> str:
    """Reducible fraction vs q, plus point-count histogram for the largest q."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    qs = [s["q"] for s in summaries]
    fractions = [s["fraction"] for s in summaries]
    ax1.plot(qs, fractions, "o-", color="tab:red", label="reducible fraction")
    ax1.plot(qs, [1.0 / q for q in qs], "--", color="gray", label="1/q")
    ax1.set_xlabel("q")
    ax1.set_ylabel("fraction")
    ax1.legend()
    ax1.set_title("reducibility locus density")
    q_big = max(records_by_q)
    counts = [r.N for r in records_by_q[q_big] if r.abs_irred]
    if counts:
        ax2.hist(counts, bins=range(min(counts), max(counts) + 2), color="tab:green",
                 align="left")
    ax2.axvline(q_big, color="black", linestyle="--", label="q")
    ax2.set_xlabel("points on curve")
    ax2.set_ylabel("curves")
    ax2.legend()
    ax2.set_title(f"point counts, absolutely irreducible, q = {q_big}")
    return _save(fig, path)


def incidence_figure(rows: list[dict], path: str) -> str:
    """Deviation ratio scatter per q with the per-q maximum highlighted."""
    fig, ax = plt.subplots(figsize=(6, 3.8))
    qs = sorted({r["q"] for r in rows})
    for q in qs:
        ratios = [r["ratio"] for r in rows if r["q"] == q]
        ax.plot([q] * len(ratios), ratios, ".", color="tab:blue", alpha=0.35)
        ax.plot([q], [max(ratios)], "_", color="tab:red", markersize=16, markeredgewidth=2)
    ax.axhline(1.0, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("q")
    ax.set_ylabel("deviation / error scale")
    ax.set_title("incidence deviation ratios (max per q marked)")
    return _save(fig, path)


def expansion_figure(rows: list[dict], path: str) -> str:
    """Missing values against set volume."""
    fig, ax = plt.subplots(figsize=(6, 3.8))
    vols = [r["sizes"][0] * r["sizes"][1] * r["sizes"][2] for r in rows]
    missing = [r["missing"] for r in rows]
    ax.plot(vols, missing, "o", color="tab:purple", alpha=0.6)
    ax.set_xscale("log")
    ax.set_xlabel("|X||Y||Z|")
    ax.set_ylabel("q - |P(X,Y,Z)|")
    ax.set_title("value-set deficit vs set volume")
    return _save(fig, path)
