"""Declarative figure recipes: scatter, heatmap, timeseries, dipoverlay.

A FigureRecipe is pure data; render() is deterministic given its inputs and
embeds the source manifest hash in the PNG metadata and the caption line.
Axis labels use the simulation units (E/eps_s, hbar*D_z/eps_s, t/tau_s,
lambda*tau_s).
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import column, manifest_hash, read_csv

#: fixed color range for Lyapunov heatmaps, matching the scan dynamic range
LAMBDA_COLOR_RANGE = (0.0, 1.8)


@dataclass
class FigureRecipe:
    kind: str                    # scatter | heatmap | timeseries | dipoverlay
    inputs: dict                 # role -> csv path
    output: str                  # image path
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("scatter", "heatmap", "timeseries", "dipoverlay"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def render(recipe: FigureRecipe) -> str:
    """Render the recipe to its output image; returns the output path."""
    fig, ax = plt.subplots(figsize=recipe.options.get("figsize", (5.2, 3.6)))
    src = recipe.inputs.get("data") or next(iter(recipe.inputs.values()))
    stamp = manifest_hash(src)
    _DISPATCH[recipe.kind](recipe, ax)
    opts = recipe.options
    if opts.get("logx"):
        ax.set_xscale("log")
    if opts.get("logy"):
        ax.set_yscale("log")
    ax.set_xlabel(opts.get("xlabel", ""))
    ax.set_ylabel(opts.get("ylabel", ""))
    if opts.get("title"):
        ax.set_title(opts["title"])
    for x in opts.get("vlines", ()):
        ax.axvline(x, color="k", ls="--", lw=0.8)
    for y in opts.get("hlines", ()):
        ax.axhline(y, color="k", ls="--", lw=0.8)
    if any(line.get_label() and not line.get_label().startswith("_")
           for line in ax.get_lines()):
        ax.legend(fontsize=8)
    fig.text(0.01, 0.005, f"manifest {stamp[:16]}", fontsize=5, alpha=0.6)
    fig.tight_layout()
    out = Path(recipe.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=opts.get("dpi", 160),
                metadata={"Source": f"manifest-sha256:{stamp}"})
    plt.close(fig)
    return str(out)


def _scatter(recipe, ax):
    path = recipe.inputs["data"]
    _, rows = read_csv(path)
    opts = recipe.options
    xcol = opts.get("x", "E0_over_eps")
    ycol = opts.get("y", "lambda_tau")
    from .io import require_columns
    require_columns(path, rows, [xcol, ycol])
    group = opts.get("group_by")
    if group:
        require_columns(path, rows, [group])
        for key in sorted({r[group] for r in rows}, key=str):
            sel = [r for r in rows if r[group] == key]
            ax.plot(column(sel, xcol), column(sel, ycol), "o", ms=3, alpha=0.75,
                    label=f"{group}={key}")
    else:
        ax.plot(column(rows, xcol), column(rows, ycol), "o", ms=3, alpha=0.75)


def _heatmap(recipe, ax):
    path = recipe.inputs["data"]
    _, rows = read_csv(path)
    opts = recipe.options
    xcol = opts.get("x", "amp_hbarD_over_eps")
    ycol = opts.get("y", "E0_over_eps")
    vcol = opts.get("value", "lambda_tau")
    from .io import require_columns
    require_columns(path, rows, [xcol, ycol, vcol])
    xs = np.array(sorted({r[xcol] for r in rows}))
    y = column(rows, ycol)
    edges = np.linspace(y.min(), y.max() + 1e-12, opts.get("y_bins", 40) + 1)
    grid = np.full((len(edges) - 1, len(xs)), np.nan)
    for j, xv in enumerate(xs):
        sel = [r for r in rows if r[xcol] == xv]
        ys = column(sel, ycol)
        vs = column(sel, vcol)
        idx = np.clip(np.digitize(ys, edges) - 1, 0, len(edges) - 2)
        for b in np.unique(idx):
            grid[b, j] = vs[idx == b].mean()
    vmin, vmax = opts.get("vrange", LAMBDA_COLOR_RANGE)
    # pad x edges geometrically for log grids, linearly otherwise
    if opts.get("logx") and np.all(xs > 0) and len(xs) > 1:
        xe = np.concatenate([[xs[0] * np.sqrt(xs[0] / xs[1])],
                             np.sqrt(xs[:-1] * xs[1:]),
                             [xs[-1] * np.sqrt(xs[-1] / xs[-2])]])
    else:
        mid = 0.5 * (xs[:-1] + xs[1:]) if len(xs) > 1 else np.array([])
        step = (xs[1] - xs[0]) if len(xs) > 1 else 1.0
        xe = np.concatenate([[xs[0] - step / 2], mid, [xs[-1] + step / 2]])
    pc = ax.pcolormesh(xe, edges, np.ma.masked_invalid(grid), vmin=vmin, vmax=vmax,
                       cmap=opts.get("cmap", "viridis"))
    ax.figure.colorbar(pc, ax=ax, label=opts.get("value_label", vcol))


def _timeseries(recipe, ax):
    opts = recipe.options
    xcol = opts.get("x", "t_over_tau_s")
    default_y = opts.get("y", "delta2")
    y_by_label = opts.get("y_by_label", {})
    from .io import require_columns
    for label, path in sorted(recipe.inputs.items()):
        ycol = y_by_label.get(label, default_y)
        _, rows = read_csv(path)
        require_columns(path, rows, [xcol, ycol])
        ax.plot(column(rows, xcol), column(rows, ycol), lw=1.0,
                label=label if label != "data" else None)


def _dipoverlay(recipe, ax):
    opts = recipe.options
    path = recipe.inputs["data"]
    _, rows = read_csv(path)
    xcol = opts.get("x", "amp_hbarD_over_eps")
    ycol = opts.get("y", "R")
    from .io import require_columns
    require_columns(path, rows, [xcol, ycol])
    group = opts.get("group_by")
    groups = sorted({r[group] for r in rows}, key=str) if group else [None]
    for key in groups:
        sel = [r for r in rows if group is None or r[group] == key]
        x = column(sel, xcol)
        y = column(sel, ycol)
        if opts.get("aggregate") == "mean":
            xu = np.unique(x)
            y = np.array([y[x == v].mean() for v in xu])
            x = xu
        order = np.argsort(x)
        ax.plot(x[order], y[order], "o-", ms=3,
                lw=1.0, label=None if key is None else f"{group}={key}")
    dips_path = recipe.inputs.get("dips")
    if dips_path:
        _, dip_rows = read_csv(dips_path)
        require_columns(dips_path, dip_rows, ["hbarD_over_eps"])
        for r in dip_rows:
            ax.axvline(r["hbarD_over_eps"], color="crimson", ls="--", lw=0.9)


_DISPATCH = {
    "scatter": _scatter,
    "heatmap": _heatmap,
    "timeseries": _timeseries,
    "dipoverlay": _dipoverlay,
}
