"""Delimited output and figure rendering for the CLI report path.

CSV files are the contract: a fixed header per command, numeric cells
formatted with 17 significant digits (doubles round-trip exactly), and
``#``-prefixed metadata lines carrying the tool version and the full
effective configuration plus its hash.  Figures are a convenience layer
rendered from the same rows.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import __version__
from .scenario_io import config_hash


def format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


def write_csv(path, header, rows, metadata):
    """Write rows with metadata comment lines; returns the config hash."""
    meta = {"tool": "nfcrb", "version": __version__}
    meta.update(metadata)
    digest = config_hash(meta)
    meta["config_hash"] = digest
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in meta.items():
            handle.write(f"# {key}={format_cell(value)}\n")
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(format_cell(cell) for cell in row) + "\n")
    return digest


def read_csv(path):
    """Read back a CSV written by :func:`write_csv`."""
    metadata, header, rows = {}, None, []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key] = value
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append(line.split(","))
    return metadata, header, rows


_CRB_STYLES = (
    ("crb_x_m2", "tab:blue", "x_C"),
    ("crb_y_m2", "tab:orange", "y_C"),
    ("crb_z_m2", "tab:green", "z_C"),
)


def plot_area_sweep(path, header, rows):
    """Log-log bounds versus surface area, one curve per coordinate.

    Rows may hold numbers or the strings read back from the CSV.
    """
    col = {name: i for i, name in enumerate(header)}
    area = [float(r[col["surface_area_m2"]]) for r in rows]
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for name, color, label in _CRB_STYLES:
        ax.loglog(area, [float(r[col[name]]) for r in rows],
                  color=color, label=f"CRB({label})")
        scalar_name = "scalar_" + name
        if scalar_name in col:
            ax.loglog(area, [float(r[col[scalar_name]]) for r in rows],
                      color=color, linestyle="--", marker="o", markersize=3,
                      linewidth=0.9, label=f"CRB({label}), scalar model")
    if "crb_x_asymptote_m2" in col:
        ax.axhline(float(rows[0][col["crb_x_asymptote_m2"]]), color="gray",
                   linestyle=":", label="CRB(x_C) large-surface limit")
    ax.set_xlabel(r"surface area $L^2$ (m$^2$)")
    ax.set_ylabel(r"CRB (m$^2$)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_distance_sweep(path, header, rows):
    """Semilog-y bounds versus source distance, grouped by wavelength."""
    col = {name: i for i, name in enumerate(header)}
    wavelengths = sorted({float(r[col["wavelength_m"]]) for r in rows})
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for lam in wavelengths:
        sub = [r for r in rows if float(r[col["wavelength_m"]]) == lam]
        dist = [float(r[col["distance_m"]]) for r in sub]
        for name, color, label in _CRB_STYLES:
            ax.semilogy(dist, [float(r[col[name]]) for r in sub], color=color,
                        linestyle="-" if lam == wavelengths[0] else "--",
                        label=f"CRB({label}), lambda={lam:g} m")
    ax.set_xlabel(r"source distance $x_C$ (m)")
    ax.set_ylabel(r"CRB (m$^2$)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_montecarlo(path, report):
    """Per-coordinate empirical MSE against the CRB."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    idx = range(3)
    labels = ["x_C", "y_C", "z_C"]
    ax.bar([i - 0.17 for i in idx], report.mse, width=0.34, label="empirical MSE")
    ax.bar([i + 0.17 for i in idx], report.crb, width=0.34, label="CRB")
    ax.set_yscale("log")
    ax.set_xticks(list(idx))
    ax.set_xticklabels(labels)
    ax.set_ylabel(r"squared error (m$^2$)")
    ax.set_title(f"{report.n_trials} trials, {report.n_failed} failed")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
