"""Figure builders over the harness CSV schema.

fields files: columns x[,y],rho,m1[,m2][,E],p,u[,v]; eoc files: n followed
by err_*/eoc_* pairs.  Images are written without timestamps so re-running
on the same input reproduces the same bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_SAVE = dict(dpi=120, metadata={"Software": "plotkit"})


class PlotkitError(RuntimeError):
    pass


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotkitError(f"{path} is empty") from None
        rows = [row for row in reader if row]
    if not rows:
        raise PlotkitError(f"{path} has a header but no data rows")
    data = np.array(rows, dtype=float)
    return {name: data[:, k] for k, name in enumerate(header)}


def _require(table: dict, column: str, path):
    if column not in table:
        raise PlotkitError(f"column {column!r} not in {path} "
                           f"(has {', '.join(table)})")
    return table[column]


def plot_profiles(fields_csv: Path, out_image: Path,
                  variables=("rho", "u"), reference_csv: Path | None = None,
                  initial_csv: Path | None = None) -> Path:
    """One panel per variable; overlays the reference curve when given."""
    table = read_csv(fields_csv)
    if "y" in table:
        raise PlotkitError("profiles plots are for 1D fields files")
    x = _require(table, "x", fields_csv)
    ref = read_csv(reference_csv) if reference_csv else None
    init = read_csv(initial_csv) if initial_csv else None

    fig, axes = plt.subplots(1, len(variables),
                             figsize=(4.2 * len(variables), 3.4))
    if len(variables) == 1:
        axes = [axes]
    for ax, var in zip(axes, variables):
        vals = _require(table, var, fields_csv)
        if init is not None:
            ax.plot(init["x"], _require(init, var, initial_csv), ":",
                    color="0.6", lw=1.0, label="initial")
        if ref is not None:
            ax.plot(ref["x"], _require(ref, var, reference_csv), "-",
                    color="k", lw=1.0, label="reference")
        ax.plot(x, vals, ".", color="tab:red", ms=3.0, label="run")
        ax.set_xlabel("x")
        ax.set_ylabel(var)
        ax.legend(fontsize=8)
    fig.tight_layout()
    out_image.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_image, **_SAVE)
    plt.close(fig)
    return out_image


def plot_eoc(eoc_csv: Path, out_image: Path) -> Path:
    """Log-log self-convergence error lines with a slope-2 guide."""
    table = read_csv(eoc_csv)
    n = _require(table, "n", eoc_csv)
    err_cols = [c for c in table if c.startswith("err_")]
    if not err_cols:
        raise PlotkitError(f"no err_* columns in {eoc_csv}")

    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    for col in err_cols:
        ax.loglog(n, table[col], "o-", ms=4, label=col.removeprefix("err_"))
    guide = table[err_cols[0]][0] * (n / n[0]) ** -2.0
    ax.loglog(n, guide, "--", color="0.5", lw=1.0, label="slope -2")
    ax.set_xlabel("N")
    ax.set_ylabel("relative L1 error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out_image.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_image, **_SAVE)
    plt.close(fig)
    return out_image


def _derived_field(table: dict, var: str, nx: int, ny: int, dx: float, dy: float):
    """Fields derived from the CSV columns: rho-dev, div, omega."""
    def grid(col):
        return table[col].reshape(nx, ny)

    if var == "rho-dev":
        rho = grid("rho")
        return rho - rho.mean(), "density deviation from mean"
    if var in ("div", "omega"):
        u, v = grid("u"), grid("v")
        dudx = (np.roll(u, -1, 0) - np.roll(u, 1, 0)) / (2 * dx)
        dudy = (np.roll(u, -1, 1) - np.roll(u, 1, 1)) / (2 * dy)
        dvdx = (np.roll(v, -1, 0) - np.roll(v, 1, 0)) / (2 * dx)
        dvdy = (np.roll(v, -1, 1) - np.roll(v, 1, 1)) / (2 * dy)
        if var == "div":
            return dudx + dvdy, "velocity divergence"
        return dvdx - dudy, "vorticity"
    raise PlotkitError(f"unknown derived variable {var!r}")


def plot_field2d(fields_csv: Path, out_image: Path, variable: str = "rho") -> Path:
    """Colormap of one (possibly derived) variable of a 2D fields file."""
    table = read_csv(fields_csv)
    if "y" not in table:
        raise PlotkitError("field2d plots need a 2D fields file")
    x = table["x"]
    y = table["y"]
    xs = np.unique(x)
    ys = np.unique(y)
    nx, ny = len(xs), len(ys)
    if nx * ny != len(x):
        raise PlotkitError("fields file is not a full tensor grid")
    dx = xs[1] - xs[0] if nx > 1 else 1.0
    dy = ys[1] - ys[0] if ny > 1 else 1.0

    if variable in table:
        field = table[variable].reshape(nx, ny)
        label = variable
    else:
        field, label = _derived_field(table, variable, nx, ny, dx, dy)

    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    im = ax.pcolormesh(xs, ys, field.T, shading="nearest", cmap="RdBu_r")
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    fig.tight_layout()
    out_image.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_image, **_SAVE)
    plt.close(fig)
    return out_image
