"""Headless matplotlib rendering of the curve and sweep reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_curve_figure(report, path: str) -> str:
    """Mean negative entropy (red) with the empirical 95% band (black)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    theta = report.theta_grid
    ax.plot(theta, [e.mean for e in report.estimates], color="red", lw=1.8,
            label="mean")
    ax.plot(theta, [e.lo95 for e in report.estimates], color="black", lw=0.9,
            label="95% range")
    ax.plot(theta, [e.hi95 for e in report.estimates], color="black", lw=0.9)
    ax.set_xlabel("dependence parameter")
    ax.set_ylabel("negative copula entropy (nats)")
    ax.set_title(report.family)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_sweep_figure(report, path: str) -> str:
    """Mean monotone fraction against the sample size."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(report.sample_sizes, report.mean_monotone_fraction,
            marker="o", color="tab:blue")
    ax.set_xscale("log")
    ax.set_xlabel("sample size")
    ax.set_ylabel("mean monotone fraction")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(report.family)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
