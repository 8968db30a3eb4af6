"""Matplotlib figures written next to the CSV outputs."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def plot_carpet(path: Path, x, ys, values, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    extent = [x[0] * 1e6, x[-1] * 1e6, ys[0] * 1e3, ys[-1] * 1e3]
    im = ax.imshow(values / values.max(), origin="lower", aspect="auto", extent=extent, cmap="magma")
    ax.set_xlabel(r"$x$ ($\mu$m)")
    ax.set_ylabel(r"$y$ (mm)")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label=r"$|\psi|^2$ / max")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def plot_fringe(path: Path, shifts, T, scan, pitch: float) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    u = np.linspace(0, pitch, 200)
    ax.plot(np.asarray(shifts) * 1e9, T, "o", label="pipeline")
    ax.plot(u * 1e9, scan.mean + scan.amplitude * np.cos(2 * np.pi * u / pitch + scan.phase), "-",
            label="first harmonic")
    ax.set_xlabel(r"$\Delta x_3$ (nm)")
    ax.set_ylabel("transmission")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def plot_visibility(path: Path, ratios, numerical=None, analytic=None, label: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if analytic is not None:
        ax.plot(ratios, analytic, "-", label="closed form")
    if numerical is not None:
        ax.plot(ratios, numerical, "o", ms=4, label="wave propagation")
    ax.axhline(0, color="0.6", lw=0.8)
    ax.set_xlabel(r"$d_p/\lambda_i$")
    ax.set_ylabel(r"$V$")
    if label:
        ax.set_title(label)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path
