"""Optional figure rendering for the report paths.

Every function takes rows already written to CSV and saves a PNG next to
them.  Import is deferred to call time so headless runs without the plot
flag never touch matplotlib.
"""

from __future__ import annotations

__all__ = ["plot_trajectory", "plot_slope_fit", "plot_ratio_sweep",
           "plot_covering"]


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_trajectory(rows, path):
    """Observable drift over time: mass and energy columns."""
    plt = _pyplot()
    ts = [r["t"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(ts, [r["mass"] for r in rows], label="mass")
    ax1.plot(ts, [r["H_total"] for r in rows], label="H")
    ax1.legend()
    ax1.set_ylabel("conserved quantities")
    for key in ("Hmod_total", "Hres"):
        if key in rows[0]:
            ax2.plot(ts, [r[key] for r in rows], label=key)
    ax2.legend()
    ax2.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_slope_fit(n_values, normalized, slope, intercept, path):
    """Log-log increments against the fitted power law."""
    import numpy as np
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(n_values, normalized, "o", label="measured")
    xs = np.array(n_values, dtype=float)
    ax.loglog(xs, np.exp(intercept) * xs ** slope, "--",
              label=f"fit: slope {slope:.3f}")
    ax.set_xlabel("N")
    ax.set_ylabel("normalized energy increment")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_ratio_sweep(rows, path, title):
    """Histogram of estimate ratios across a sweep."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.hist([r["ratio"] for r in rows], bins=40)
    ax.set_xlabel("left side / right side")
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_covering(rows, path):
    """Covering count ratios against the dyadic scale."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ns = sorted({r["N"] for r in rows})
    for n in ns:
        pts = [r["ratio"] for r in rows if r["N"] == n]
        ax.plot([n] * len(pts), pts, ".", alpha=0.5)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("N")
    ax.set_ylabel("count / (N^{3/2} L^{1/2})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
