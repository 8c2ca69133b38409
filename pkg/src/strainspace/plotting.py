"""PNG figures written next to the CSV and JSON outputs of the command-line tool."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_ascent_traces(traces, path, reference: float | None = None, title: str = "") -> Path:
    """Objective against iteration for every restart."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for tr in traces:
            ax.plot(np.arange(len(tr.objective)), tr.objective, alpha=0.7)
        if reference is not None:
            ax.axhline(reference, color="k", ls="--", lw=0.8, label=f"{reference:g}")
            ax.legend(loc="lower right")
        ax.set_xlabel("iteration")
        ax.set_ylabel("objective")
        ax.set_title(title)
        return _save(fig, path)


def plot_energy_ledger(rows: list[dict], path, title: str = "") -> Path:
    """Kinetic energy, cumulative dissipation and the energy defect over time."""
    t = np.array([r["t"] for r in rows])
    with plt.rc_context(STYLE):
        fig, (ax, bx) = plt.subplots(1, 2, figsize=(8.0, 3.4))
        ax.plot(t, [r["kinetic"] for r in rows], label="kinetic")
        ax.plot(t, [r["dissipation_integral"] for r in rows], label="dissipation integral")
        ax.set_xlabel("t")
        ax.legend()
        defect = np.abs([r["energy_defect"] for r in rows])
        bx.semilogy(t, np.maximum(defect, 1e-300), label="|energy defect|")
        eq = [r.get("equivalence_residual") for r in rows]
        if any(e is not None and e == e for e in eq):
            bx.semilogy(t, np.maximum(np.asarray(eq, dtype=float), 1e-300), label="equivalence residual")
        bx.set_xlabel("t")
        bx.legend()
        fig.suptitle(title)
        return _save(fig, path)


def plot_part_norms(diagnostics: dict, path, title: str = "") -> Path:
    """Bar chart of the norms of the four orthogonal parts."""
    norms = diagnostics["norms"]
    names = [k for k in norms if k != "input"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(names, [norms[k] ** 2 for k in names])
        ax.axhline(norms["input"] ** 2, color="k", ls="--", lw=0.8, label="input")
        ax.set_ylabel("squared norm")
        ax.legend()
        ax.set_title(title)
        return _save(fig, path)


def plot_slice(values: np.ndarray, path, title: str = "") -> Path:
    """Colour map of a two-dimensional array (a slice of a scalar quantity)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(np.asarray(values).T, origin="lower", cmap="viridis")
        fig.colorbar(im, ax=ax)
        ax.set_title(title)
        return _save(fig, path)


def plot_verify_report(checks: list[dict], path) -> Path:
    """Residual against tolerance for each check on a log scale."""
    names = [c["identity_name"] for c in checks]
    res = np.maximum([c["residual"] for c in checks], 1e-18)
    tol = [c["tolerance"] for c in checks]
    colors = ["tab:green" if c["pass"] else "tab:red" for c in checks]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7.0, 0.25 * len(checks) + 1.2))
        y = np.arange(len(checks))
        ax.barh(y, res, color=colors)
        ax.scatter(tol, y, marker="|", color="k", s=80, label="tolerance")
        ax.set_xscale("log")
        ax.set_yticks(y, names)
        ax.set_xlabel("residual")
        ax.legend(loc="lower right")
        return _save(fig, path)


__all__ = ["plot_ascent_traces", "plot_energy_ledger", "plot_part_norms", "plot_slice", "plot_verify_report"]
