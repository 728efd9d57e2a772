"""Figures written next to the CSV outputs.

Figures are built with the object-oriented matplotlib API on the Agg
canvas, so nothing depends on pyplot's global state or on a display.  PNG
metadata is stripped so repeated runs produce identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}

_SAVE = {"format": "png", "metadata": {"Software": None}}


def _figure(width=6.4, height=4.0):
    return Figure(figsize=(width, height), layout="constrained")


def profiles(snapshots, grid, params, path):
    """Densities and potential at every snapshot time."""
    with matplotlib.rc_context(RC):
        fig = _figure(9.0, 3.2)
        axes = fig.subplots(1, 3)
        x = grid.nodes
        for s in snapshots:
            label = f"t = {s.t:.4g}"
            axes[0].plot(x, s.P, label=label)
            axes[1].plot(x, s.N, label=label)
            axes[2].plot(x, s.Psi, label=label)
        axes[0].axhline(params.Pm, color="k", ls=":", lw=0.8)
        axes[1].axhline(params.Nm, color="k", ls=":", lw=0.8)
        for ax, name in zip(axes, ("P (cations)", "N (electrons)", "Psi")):
            ax.set_xlabel("x")
            ax.set_title(name)
        axes[0].legend(loc="best")
        fig.savefig(path, **_SAVE)


def series(records, path):
    """Density extrema, boundary currents and stationarity against time."""
    t = [r.t for r in records]
    with matplotlib.rc_context(RC):
        fig = _figure(9.0, 3.2)
        ax0, ax1, ax2 = fig.subplots(1, 3)
        ax0.plot(t, [r.minP for r in records], label="min P")
        ax0.plot(t, [r.maxP for r in records], label="max P")
        ax0.plot(t, [r.minN for r in records], label="min N")
        ax0.plot(t, [r.maxN for r in records], label="max N")
        ax0.set_title("density bounds")
        ax0.legend(loc="best")
        for name in ("JP0", "JP1", "JN0", "JN1"):
            ax1.plot(t, [getattr(r, name) for r in records], label=name)
        ax1.set_title("boundary currents")
        ax1.legend(loc="best")
        stat = [max(r.stationarity, 1e-300) for r in records]
        ax2.semilogy(t, stat)
        ax2.set_title("max |u^{k+1} - u^k| / dt")
        for ax in (ax0, ax1, ax2):
            ax.set_xlabel("t")
        fig.savefig(path, **_SAVE)


def convergence(result, path, xlabel="dt"):
    with matplotlib.rc_context(RC):
        fig = _figure(4.5, 3.5)
        ax = fig.subplots()
        ax.loglog(result.steps, result.errors, "o-", label="observed")
        if result.order is not None:
            s0, e0 = result.steps[0], result.errors[0]
            ax.loglog(
                result.steps,
                [e0 * (s / s0) for s in result.steps],
                "k--",
                lw=0.8,
                label="slope 1",
            )
            ax.set_title(f"observed order {result.order:.3f}")
        else:
            ax.set_title("order indeterminate (errors at round-off)")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("L2 error at final time")
        ax.legend(loc="best")
        fig.savefig(path, **_SAVE)


def sweep(param, values, currents, path):
    """Final boundary currents against the swept parameter.

    ``currents`` maps a column name (``JP0``...) to a list aligned with
    ``values``; missing points are None.
    """
    with matplotlib.rc_context(RC):
        fig = _figure(5.0, 3.5)
        ax = fig.subplots()
        for name, ys in currents.items():
            pts = [(v, y) for v, y in zip(values, ys) if y is not None]
            if pts:
                ax.plot([v for v, _ in pts], [y for _, y in pts], "o-", label=name)
        ax.set_xlabel(param)
        ax.set_ylabel("final boundary current")
        ax.legend(loc="best")
        fig.savefig(path, **_SAVE)
