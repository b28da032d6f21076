"""Static SVG figures for the experiment artifacts.

matplotlib is imported lazily and pinned to the Agg backend; SVGs are
written without dates and with a fixed hash salt so identical runs emit
identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "save_figure",
    "trajectory_figure",
    "scaling_figure",
    "region_figure",
    "boundary_figure",
    "delay_figure",
]

_CLASS_COLORS = {
    "delayed": "#3b6fb6",
    "delayed_oscillatory": "#58a066",
    "early": "#c23b3b",
    "borderline": "#d9a441",
    None: "#d0d0d0",
}


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=True)
    matplotlib.rcParams["svg.hashsalt"] = "slowpass"
    import matplotlib.pyplot as plt

    return plt


def save_figure(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    _plt().close(fig)


def trajectory_figure(traj, report=None):
    """State versus slow time with the frozen branches overlaid."""
    from .dynamics import MapKind, stable_branch, unstable_branch
    from .bistable import cubic_equilibria

    plt = _plt()
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    t = traj.t
    ax.plot(t, traj.x, lw=0.9, color="#222222", label="trajectory")
    tt = np.linspace(t.min(), max(t.max(), 0.0), 600)
    if traj.kind == MapKind.QUADRATIC:
        ax.plot(tt, stable_branch(tt), lw=1.2, ls="--", color="#3b6fb6", label="stable branch")
        ax.plot(tt, unstable_branch(tt), lw=1.2, ls=":", color="#c23b3b", label="unstable branch")
    else:
        ups, uns, los = [], [], []
        for v in tt:
            eq = cubic_equilibria(float(v))
            ups.append(eq.upper if eq.upper is not None else math.nan)
            uns.append(eq.unstable if eq.unstable is not None else math.nan)
            los.append(eq.lower if eq.lower is not None else math.nan)
        ax.plot(tt, ups, lw=1.2, ls="--", color="#3b6fb6", label="stable branches")
        ax.plot(tt, los, lw=1.2, ls="--", color="#3b6fb6")
        ax.plot(tt, uns, lw=1.2, ls=":", color="#c23b3b", label="unstable branch")
    if report is not None and report.found:
        ax.plot([report.t_star], [report.x_star], "o", ms=6, color="#c23b3b", label="tipping point")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def scaling_figure(points, fit=None):
    """Tipping time against epsilon on log-log axes, with the fitted law."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    eps = np.array([p[0] for p in points])
    ts = np.array([p[1] for p in points])
    ax.loglog(eps, ts, "o", ms=5, color="#3b6fb6", label="tipping time")
    if fit is not None:
        grid = np.geomspace(eps.min(), eps.max(), 100)
        ax.loglog(
            grid,
            fit.C * grid ** fit.b,
            "-",
            lw=1.0,
            color="#c23b3b",
            label=f"fit: {fit.C:.4g} eps^{fit.b:.4g}",
        )
    ax.set_xlabel("epsilon")
    ax.set_ylabel("tipping time")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def region_figure(rmap):
    """Class-colored raster over the (epsilon, dt) grid."""
    from matplotlib.colors import ListedColormap

    plt = _plt()
    spec = rmap.spec
    eps = np.asarray(spec.eps_values)
    dts = np.asarray(spec.dt_values)
    order = [None, "delayed", "delayed_oscillatory", "early", "borderline"]
    code = {k: i for i, k in enumerate(order)}
    img = np.zeros((len(dts), len(eps)), dtype=int)
    for cell in rmap.cells:
        i = int(np.searchsorted(eps, cell.epsilon))
        j = int(np.searchsorted(dts, cell.dt))
        key = cell.category.value if cell.category is not None else None
        img[j, i] = code[key]
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    cmap = ListedColormap([_CLASS_COLORS[k] for k in order])
    if len(eps) > 1:
        eps_edges = np.sqrt(eps[:-1] * eps[1:])
        eps_edges = np.concatenate(
            [[eps[0] ** 2 / eps_edges[0]], eps_edges, [eps[-1] ** 2 / eps_edges[-1]]]
        )
    else:
        eps_edges = np.array([eps[0] * 0.9, eps[0] * 1.1])
    if len(dts) > 1:
        dt_edges = np.sqrt(dts[:-1] * dts[1:])
        dt_edges = np.concatenate(
            [[dts[0] ** 2 / dt_edges[0]], dt_edges, [dts[-1] ** 2 / dt_edges[-1]]]
        )
    else:
        dt_edges = np.array([dts[0] * 0.9, dts[0] * 1.1])
    ax.pcolormesh(eps_edges, dt_edges, img, cmap=cmap, vmin=0, vmax=len(order) - 1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("dt")
    fig.tight_layout()
    return fig


def boundary_figure(curves, fits=None):
    """Traced boundary points on log-log axes with their power-law fits."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    palette = ["#3b6fb6", "#c23b3b", "#58a066", "#d9a441", "#7a5fb5", "#4aa3a3", "#b05f8a"]
    for k, curve in enumerate(curves):
        if not curve.points:
            continue
        eps = np.array([p[0] for p in curve.points])
        dts = np.array([p[1] for p in curve.points])
        color = palette[k % len(palette)]
        label = f"m={curve.m} {curve.side.value}"
        ax.loglog(eps, dts, "o", ms=4, color=color, label=label)
        if fits:
            fit = fits.get((curve.m, curve.side)) if hasattr(fits, "get") else None
            if fit is not None:
                grid = np.geomspace(eps.min(), eps.max(), 50)
                ax.loglog(grid, fit.C * grid ** fit.b, "-", lw=0.8, color=color)
    ax.set_xlabel("epsilon")
    ax.set_ylabel("dt")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    return fig


def delay_figure(results, fit=None):
    """Switching delay against epsilon on log-log axes."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    pts = [(r.epsilon, r.delta_T) for r in results if r.switched and r.delta_T > 0.0]
    if pts:
        eps = np.array([p[0] for p in pts])
        dT = np.array([p[1] for p in pts])
        ax.loglog(eps, dT, "o", ms=5, color="#3b6fb6", label="switching delay")
        grid = np.geomspace(eps.min(), eps.max(), 50)
        if fit is not None:
            ax.loglog(
                grid,
                fit.C * grid ** fit.b,
                "-",
                lw=1.0,
                color="#c23b3b",
                label=f"fit: {fit.C:.4g} eps^{fit.b:.4g}",
            )
        ref = dT[0] / eps[0] ** (2.0 / 3.0)
        ax.loglog(grid, ref * grid ** (2.0 / 3.0), "--", lw=0.8, color="#888888",
                  label="slope 2/3 guide")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("delay past fold")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig
