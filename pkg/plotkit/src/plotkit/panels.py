"""Figure panels over the simulator's CSV outputs.

Each panel kind consumes one documented CSV schema (see the simulator's
SCHEMAS.md) and renders a single image.  Reference guide lines are the
consecutive-gap-ratio limits 0.386 (Poisson) and 0.536 (Wigner-Dyson) and
the Gaussian normality ratio pi/2.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .io import SchemaError, Table, read_table  # noqa: E402

__all__ = ["R_POISSON", "R_WIGNER_DYSON", "GAMMA_GAUSSIAN", "PanelSpec",
           "load_spec", "render", "PANEL_KINDS"]

R_POISSON = 0.386
R_WIGNER_DYSON = 0.536
GAMMA_GAUSSIAN = math.pi / 2

_GUIDE_STYLE = dict(color="grey", linestyle="--", linewidth=1.0, zorder=1)


@dataclass
class PanelSpec:
    """One renderable panel: input CSVs, kind, scales, output image path."""

    kind: str
    inputs: list
    output: str
    x_scale: str = ""
    y_scale: str = ""
    title: str = ""

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise SchemaError(
                f"unknown panel kind {self.kind!r}; "
                f"known: {', '.join(sorted(PANEL_KINDS))}"
            )
        if not self.inputs:
            raise SchemaError(f"panel {self.kind!r} has no inputs")
        norm = []
        for item in self.inputs:
            if isinstance(item, str):
                item = {"path": item}
            if "path" not in item:
                raise SchemaError(f"input entry {item!r} has no 'path'")
            item.setdefault(
                "label", os.path.splitext(os.path.basename(item["path"]))[0]
            )
            norm.append(item)
        self.inputs = norm


def load_spec(path: str) -> list:
    """Parse a panel-spec file (JSON): one panel object, a list of panels,
    or {"panels": [...]}."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path} is not valid JSON: {err}") from None
    if isinstance(data, dict) and "panels" in data:
        data = data["panels"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SchemaError(f"{path}: expected a panel object or list")
    panels = []
    for entry in data:
        if not isinstance(entry, dict):
            raise SchemaError(f"{path}: panel entry {entry!r} is not an object")
        unknown = set(entry) - {"kind", "inputs", "output", "x_scale",
                                "y_scale", "title"}
        if unknown:
            raise SchemaError(
                f"{path}: unknown panel fields {sorted(unknown)}"
            )
        missing = {"kind", "inputs", "output"} - set(entry)
        if missing:
            raise SchemaError(
                f"{path}: panel entry missing fields {sorted(missing)}"
            )
        panels.append(PanelSpec(**entry))
    return panels


def _parameter_column(table: Table) -> str:
    for name in ("D_over_J", "g_cl_over_J"):
        if name in table.header:
            return name
    raise SchemaError(
        f"missing column 'D_over_J' (or 'g_cl_over_J') in {table.path} "
        f"(found {table.header})"
    )


def _mean_block(table: Table, value_names: tuple):
    """Rows with realization == 'mean' if present, else the average over
    realizations, keyed by the remaining coordinate columns."""
    real = table.text("realization")
    is_mean = [r == "mean" for r in real]
    if any(is_mean):
        keep = np.nonzero(is_mean)[0]
        return {name: table.floats(name)[keep] for name in value_names}
    # average over realizations at matched coordinates, preserving order
    return None


def _plot_r_vs_parameter(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("L", "r_mean", "r_stderr"))
        param = _parameter_column(table)
        x = table.floats(param)
        ax.errorbar(x, table.floats("r_mean"), yerr=table.floats("r_stderr"),
                    marker="o", capsize=3, label=item["label"])
        ax.set_xlabel(param.replace("_over_", "/"))
    ax.axhline(R_POISSON, **_GUIDE_STYLE)
    ax.axhline(R_WIGNER_DYSON, **_GUIDE_STYLE)
    ax.set_ylabel("mean gap ratio r")
    return "log", "linear"


def _plot_ee_vs_parameter(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("L", "S_mean", "S_over_SP",
                                          "Delta_S"))
        param = _parameter_column(table)
        x = table.floats(param)
        ax.errorbar(x, table.floats("S_over_SP"),
                    yerr=table.floats("Delta_S"),
                    marker="s", capsize=3, label=item["label"])
        ax.set_xlabel(param.replace("_over_", "/"))
    ax.axhline(1.0, **_GUIDE_STYLE)
    ax.set_ylabel("S / S_P")
    return "log", "linear"


def _plot_ee_trajectory(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("realization", "t", "S"))
        block = _mean_block(table, ("t", "S"))
        if block is None:
            t_all = table.floats("t")
            s_all = table.floats("S")
            t = np.unique(t_all)
            s = np.array([s_all[t_all == tv].mean() for tv in t])
        else:
            t, s = block["t"], block["S"]
        ax.plot(t, s, label=item["label"])
    ax.set_xlabel("t J")
    ax.set_ylabel("mean half-chain entropy S(t)")
    return "log", "linear"


def _plot_diagonal_scatter(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("realization", "eps", "O_label",
                                          "value"))
        ax.scatter(table.floats("eps"), table.floats("value"), s=4,
                   alpha=0.5, label=f"{item['label']} "
                                    f"({table.text('O_label')[0]})")
    ax.set_xlabel("energy density eps")
    ax.set_ylabel("diagonal element O_nn")
    return "linear", "linear"


def _plot_offdiag_binned(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("L_omega", "mean_abs2", "count"))
        ax.plot(table.floats("L_omega"), table.floats("mean_abs2"),
                marker=".", label=item["label"])
    ax.set_xlabel("L * omega")
    ax.set_ylabel("mean |O_nm|^2")
    return "log", "log"


def _plot_gamma_ratio(ax, spec):
    for item in spec.inputs:
        table = read_table(item["path"], ("L_omega", "gamma"))
        ax.plot(table.floats("L_omega"), table.floats("gamma"),
                marker=".", label=item["label"])
    ax.axhline(GAMMA_GAUSSIAN, **_GUIDE_STYLE)
    ax.set_xlabel("L * omega")
    ax.set_ylabel("Gamma_O")
    return "log", "linear"


def _occupation_grids(table: Table):
    real = table.text("realization")
    keep = (np.nonzero([r == "mean" for r in real])[0]
            if "mean" in real else np.arange(len(real)))
    t = table.floats("t")[keep]
    site = table.floats("site")[keep].astype(int)
    n_c = table.floats("n_c")[keep]
    n_a = table.floats("n_a")[keep]
    times = np.unique(t)
    sites = np.unique(site)
    shape = (len(sites), len(times))
    grid_c = np.zeros(shape)
    grid_a = np.zeros(shape)
    cnt = np.zeros(shape)
    ti = {v: i for i, v in enumerate(times)}
    si = {v: i for i, v in enumerate(sites)}
    for tv, sv, c, a in zip(t, site, n_c, n_a):
        grid_c[si[sv], ti[tv]] += c
        grid_a[si[sv], ti[tv]] += a
        cnt[si[sv], ti[tv]] += 1
    cnt[cnt == 0] = 1
    return times, sites, grid_c / cnt, grid_a / cnt


def _render_occupation_heatmap(spec):
    n = len(spec.inputs)
    fig, axes = plt.subplots(n, 2, figsize=(9, 2.6 * n), squeeze=False)
    for row, item in enumerate(spec.inputs):
        table = read_table(item["path"], ("realization", "t", "site",
                                          "n_c", "n_a"))
        times, sites, grid_c, grid_a = _occupation_grids(table)
        for col, (grid, name) in enumerate(((grid_c, "photons n_c"),
                                            (grid_a, "atoms n_a"))):
            ax = axes[row][col]
            im = ax.imshow(grid, aspect="auto", origin="lower",
                           extent=(-0.5, len(times) - 0.5,
                                   sites.min() - 0.5, sites.max() + 0.5),
                           cmap="viridis")
            ticks = np.linspace(0, len(times) - 1, min(6, len(times)),
                                dtype=int)
            ax.set_xticks(ticks)
            ax.set_xticklabels([f"{times[i]:g}" for i in ticks],
                               fontsize=7, rotation=30)
            ax.set_xlabel("t J")
            ax.set_ylabel("site")
            ax.set_title(f"{item['label']}: {name}", fontsize=9)
            fig.colorbar(im, ax=ax, shrink=0.85)
    if spec.title:
        fig.suptitle(spec.title)
    return fig


_LINE_PANELS = {
    "r-vs-parameter": _plot_r_vs_parameter,
    "ee-vs-parameter": _plot_ee_vs_parameter,
    "ee-trajectory": _plot_ee_trajectory,
    "diagonal-scatter": _plot_diagonal_scatter,
    "offdiag-binned": _plot_offdiag_binned,
    "gamma-ratio": _plot_gamma_ratio,
}

PANEL_KINDS = tuple(sorted(_LINE_PANELS)) + ("occupation-heatmap",)


def build_figure(spec: PanelSpec):
    """Validate inputs and build the matplotlib figure (not yet saved)."""
    if spec.kind == "occupation-heatmap":
        return _render_occupation_heatmap(spec)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    default_x, default_y = _LINE_PANELS[spec.kind](ax, spec)
    ax.set_xscale(spec.x_scale or default_x)
    ax.set_yscale(spec.y_scale or default_y)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: PanelSpec) -> str:
    """Render one panel to its output path.  All inputs are read and
    validated before the output file is created, so schema errors and empty
    inputs never leave a file behind."""
    fig = build_figure(spec)
    try:
        out_dir = os.path.dirname(os.path.abspath(spec.output))
        os.makedirs(out_dir, exist_ok=True)
        fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    return spec.output
