"""Figure rendering for the report path.

Each helper writes one PNG next to the delimited output it illustrates.
Rendering is headless (Agg) and optional at the CLI level.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_state_surface(values: np.ndarray, x: np.ndarray, t: np.ndarray, path: Path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    mesh = ax.pcolormesh(t, x, values, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="y(x,t)")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_control_curve(t: np.ndarray, u: np.ndarray, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(t, u, lw=1.2)
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("y(1,t)")
    ax.set_title("Boundary control")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_kernel_curves(xi: np.ndarray, k_opt: np.ndarray, k_back: np.ndarray, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xi, k_opt, label="optimized quadratic kernel", lw=1.4)
    ax.plot(xi, k_back, "--", label="closed-form baseline kernel", lw=1.4)
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$k(\xi)$")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_charfun_curve(alphas: np.ndarray, values: np.ndarray, roots: np.ndarray, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(alphas, values, lw=1.0)
    ax.axhline(0.0, color="gray", lw=0.6)
    if roots.size:
        ax.plot(roots, np.zeros_like(roots), "o", ms=4, color="crimson", label="roots")
        ax.legend()
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel("characteristic function")
    ax.set_yscale("symlog")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_history_curves(iterations: np.ndarray, costs: np.ndarray, violations: np.ndarray, path: Path) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 5.6), sharex=True)
    ax1.plot(iterations, costs, lw=1.2)
    ax1.set_ylabel("cost")
    ax1.grid(True, alpha=0.3)
    ax2.semilogy(iterations, np.maximum(violations, 1e-16), lw=1.2, color="darkorange")
    ax2.set_ylabel("constraint violation")
    ax2.set_xlabel("iteration")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
