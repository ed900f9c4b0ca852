"""Figure rendering for the CLI report paths.

Every renderer writes a PNG next to the delimited output it illustrates.
The Agg backend is forced so the CLI works headless, and PNG metadata is
stripped so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

_SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


def render_survival_overlay(series_list, path: str | Path, title: str = "") -> Path:
    """Empirical survival steps with the fitted parametric curves on top."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for series in series_list:
        t = [pt[0] for pt in series.points]
        s = [pt[1] for pt in series.points]
        if series.kind == "empirical":
            ax.step(t, s, where="post", color="black", lw=1.4, label=series.label)
        else:
            ax.plot(t, s, lw=1.2, label=series.label)
    ax.set_xlabel("time")
    ax.set_ylabel("survival probability")
    ax.set_ylim(0, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return Path(path)


def render_trace(chain, path: str | Path, title: str = "") -> Path:
    """Trace plus marginal histogram for each chain coordinate."""
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.0),
                             gridspec_kw={"width_ratios": [2.4, 1.0]})
    for row, (name, values) in enumerate((("beta", chain.beta), ("theta", chain.theta))):
        axes[row, 0].plot(values, lw=0.5, color="tab:blue")
        axes[row, 0].set_ylabel(name)
        axes[row, 1].hist(values, bins=40, color="tab:blue", alpha=0.75,
                          orientation="horizontal")
        axes[row, 1].set_yticks([])
    axes[1, 0].set_xlabel("retained draw")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return Path(path)


def render_fit_overview(dataset, survival_fn, hazard_fn, path: str | Path,
                        title: str = "") -> Path:
    """Fitted survival over the empirical steps, and the fitted hazard."""
    from .compare import empirical_survival

    t_max = float(dataset.times.max()) * 1.05
    grid = np.linspace(1e-9, t_max, 300)
    emp = empirical_survival(dataset)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.8))
    ax1.step([p[0] for p in emp.points], [p[1] for p in emp.points],
             where="post", color="black", lw=1.2, label="empirical")
    ax1.plot(grid, [survival_fn(t) for t in grid], color="tab:red", label="fitted")
    ax1.set_xlabel("time")
    ax1.set_ylabel("survival probability")
    ax1.legend(frameon=False)
    ax2.plot(grid, [hazard_fn(t) for t in grid], color="tab:red")
    ax2.set_xlabel("time")
    ax2.set_ylabel("hazard rate")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return Path(path)


def render_predictive(draws, path: str | Path, title: str = "") -> Path:
    """Histogram of posterior-predictive draws (clipped at the 99th
    percentile so the heavy tail does not flatten the plot)."""
    draws = np.asarray(draws, dtype=float)
    clip = float(np.quantile(draws, 0.99))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.hist(np.clip(draws, None, clip), bins=50, color="tab:green", alpha=0.8)
    ax.set_xlabel("predicted lifetime")
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return Path(path)


def render_sim_report(report, path: str | Path) -> Path:
    """Bias, MSE and coverage against sample size, per estimator."""
    n_values = list(report.scenario.n_values)
    fig, axes = plt.subplots(2, 3, figsize=(10.5, 6.0), sharex=True)
    for row, parameter in enumerate(("beta", "theta")):
        for col, metric in enumerate(("bias", "mse", "cp")):
            ax = axes[row, col]
            for est in ("MM", "MLE", "Bayes"):
                ys = []
                for n in n_values:
                    r = report.row(est, parameter, n)
                    val = getattr(r, metric)
                    ys.append(np.nan if val is None else
                              (100 * val if metric == "cp" else val))
                if not all(np.isnan(y) for y in ys):
                    ax.plot(n_values, ys, marker="o", ms=3, label=est)
            if metric == "cp":
                ax.axhline(100 * report.scenario.ci_level, color="gray",
                           lw=0.8, ls="--")
            ax.set_ylabel(f"{parameter} {metric}" + (" %" if metric == "cp" else ""))
            if row == 1:
                ax.set_xlabel("n")
    axes[0, 0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return Path(path)
