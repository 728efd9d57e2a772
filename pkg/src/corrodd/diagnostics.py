"""Norms, boundary currents, budgets and residuals of computed trajectories.

These turn the a priori estimates of the scheme into numbers that tests and
reports can compare across runs: density bounds, discrete L2(0,T;H1)
norms, time translates, weak-form residuals and observed convergence
orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from . import kinetics
from .discretization import Grid, bernoulli, poisson_source
from .params import ModelParams, Side, Species

USUAL = "usual"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step summary; ``k`` is the index of the new time level."""

    k: int
    t: float
    minP: float
    maxP: float
    minN: float
    maxN: float
    h1Psi: float
    h1P: float
    h1N: float
    JP0: float
    JP1: float
    JN0: float
    JN1: float
    massResP: float
    massResN: float
    stationarity: float

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)]

    def row(self) -> list:
        return [getattr(self, name) for name in self.columns()]


def trapezoid(values, g: Grid) -> float:
    return float(np.dot(g.weights, values))


def h1_norm_sq(f, g: Grid, variant: str = USUAL) -> float:
    """Squared discrete H1 norm.

    ``usual`` adds the trapezoidal L2 norm to the gradient term;
    ``boundary`` adds the squared end values instead.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (g.size,):
        raise ValueError(f"field has shape {f.shape}, expected ({g.size},)")
    grad = float(np.sum(np.diff(f) ** 2) / g.h)
    if variant == USUAL:
        return grad + trapezoid(f * f, g)
    if variant == BOUNDARY:
        return grad + float(f[0] ** 2 + f[-1] ** 2)
    raise ValueError(f"unknown H1 variant {variant!r}")


def boundary_currents(species: Species, u_new, Psi, p: ModelParams):
    """Currents ``J(0)`` and ``J(1)`` from the boundary reaction laws."""
    J0 = -kinetics.reaction_rate(p, species, Side.LEFT, u_new[0], Psi[0])
    J1 = kinetics.reaction_rate(p, species, Side.RIGHT, u_new[-1], Psi[-1])
    return float(J0), float(J1)


def mass_budget_residual(species, u_old, u_new, Psi, dt, p: ModelParams, g: Grid) -> float:
    """``eps sum_i w_i (u_new - u_old)_i / dt + J(1) - J(0)``; zero up to round-off."""
    J0, J1 = boundary_currents(species, u_new, Psi, p)
    storage = species.eps(p) * float(np.dot(g.weights, u_new - u_old)) / dt
    return storage + J1 - J0


def step_record(k, t, old, new, Psi_lagged, dt, p: ModelParams, g: Grid) -> DiagnosticsRecord:
    """Diagnostics of the step ``old -> new`` (states expose ``P``, ``N``, ``Psi``)."""
    JP0, JP1 = boundary_currents(Species.P, new.P, Psi_lagged, p)
    JN0, JN1 = boundary_currents(Species.N, new.N, Psi_lagged, p)
    stat = max(np.max(np.abs(new.P - old.P)), np.max(np.abs(new.N - old.N))) / dt
    return DiagnosticsRecord(
        k=k,
        t=t,
        minP=float(new.P.min()),
        maxP=float(new.P.max()),
        minN=float(new.N.min()),
        maxN=float(new.N.max()),
        h1Psi=h1_norm_sq(new.Psi, g),
        h1P=h1_norm_sq(new.P, g),
        h1N=h1_norm_sq(new.N, g),
        JP0=JP0,
        JP1=JP1,
        JN0=JN0,
        JN1=JN1,
        massResP=mass_budget_residual(Species.P, old.P, new.P, Psi_lagged, dt, p, g),
        massResN=mass_budget_residual(Species.N, old.N, new.N, Psi_lagged, dt, p, g),
        stationarity=float(stat),
    )


def _history(traj, which: str) -> np.ndarray:
    try:
        return {"P": traj.P, "N": traj.N, "Psi": traj.Psi}[which]
    except KeyError:
        raise ValueError(f"unknown field {which!r}") from None


def l2h1_norm(traj, which: str) -> float:
    """``(sum_{k>=1} dt ||u^k||_{H1}^2)^(1/2)`` of the piecewise-constant interpolant."""
    hist = _history(traj, which)
    total = sum(h1_norm_sq(u, traj.grid) for u in hist[1:])
    return math.sqrt(traj.dt * total)


def l2l2_time_translate(traj, which: str) -> float:
    """``(sum_k dt ||u^{k+1} - u^k||_{L2}^2)^(1/2)``."""
    hist = _history(traj, which)
    if len(hist) < 3:
        raise ValueError("time translates need a trajectory with at least 2 steps")
    diffs = np.diff(hist, axis=0)
    total = sum(trapezoid(d * d, traj.grid) for d in diffs)
    return math.sqrt(traj.dt * total)


def carrier_residuals(species, u_old, u_new, Psi, dt, p: ModelParams, g: Grid) -> np.ndarray:
    """Nodal residuals of the carrier balance tested against each hat function."""
    h = g.h
    s = species.z * np.diff(Psi)
    flux = (bernoulli(s) * u_new[:-1] - bernoulli(-s) * u_new[1:]) / h
    res = species.eps(p) * g.weights * (u_new - u_old) / dt
    res[:-1] += flux
    res[1:] -= flux
    res[0] += kinetics.reaction_rate(p, species, Side.LEFT, u_new[0], Psi[0])
    res[-1] += kinetics.reaction_rate(p, species, Side.RIGHT, u_new[-1], Psi[-1])
    return res


def poisson_residuals(P, N, Psi, p: ModelParams, g: Grid) -> np.ndarray:
    """Nodal residuals of the potential equation against each hat function."""
    lam2 = p.lambda2
    grad = lam2 * np.diff(Psi) / g.h
    res = np.zeros(g.size)
    res[:-1] -= grad
    res[1:] += grad
    res[0] += lam2 / p.alpha0 * (Psi[0] - p.dpsi0_pzc)
    res[-1] -= lam2 / p.alpha1 * (p.V - Psi[-1] - p.dpsi1_pzc)
    res -= g.weights * poisson_source(P, N, p)
    return res


def weak_residual(traj, which: str) -> float:
    """Largest nodal residual of the discrete weak form over the whole trajectory."""
    p, g = traj.params, traj.grid
    if which == "poisson":
        return max(
            float(np.max(np.abs(poisson_residuals(P, N, Psi, p, g))))
            for P, N, Psi in zip(traj.P, traj.N, traj.Psi)
        )
    species = {"carrier_P": Species.P, "carrier_N": Species.N}.get(which)
    if species is None:
        raise ValueError(f"unknown weak form {which!r}")
    hist = traj.P if species is Species.P else traj.N
    worst = 0.0
    for k in range(len(hist) - 1):
        r = carrier_residuals(species, hist[k], hist[k + 1], traj.Psi[k], traj.dt, p, g)
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def fit_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    x = np.log(np.asarray(steps, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True)
class ConvergenceResult:
    """Errors of a self-convergence study.

    ``order`` is None when every error sits at round-off level, in which
    case no slope can be fitted.
    """

    steps: tuple
    errors: tuple
    order: float | None
    noise_floor: float

    @property
    def indeterminate(self) -> bool:
        return self.order is None


def _final_l2_error(a, b, g: Grid) -> float:
    d = a - b
    return math.sqrt(trapezoid(d * d, g))


def _is_halving(values, rel=1e-9) -> bool:
    return all(abs(values[i + 1] - values[i] / 2.0) <= rel * values[i] for i in range(len(values) - 1))


def temporal_order(config, dts: Sequence[float], noise_floor: float = 1e-11) -> ConvergenceResult:
    """Observed order in time from runs at halving time steps.

    The reference solution is the Richardson extrapolation
    ``2 u(dt_min) - u(2 dt_min)`` of the two finest runs, and the error of
    every coarser run is the L2 distance of its final state (P, N stacked)
    to that reference.  The final time is ``config.T`` rounded up to a
    multiple of the largest step.
    """
    from .timeloop import n_steps, run_final

    dts = [float(d) for d in dts]
    if len(dts) < 3:
        raise ValueError("need at least three time steps")
    dts = sorted(dts, reverse=True)
    if not _is_halving(dts):
        raise ValueError(f"time steps must halve successively, got {dts}")
    # a common final time that every step size reaches exactly
    T = n_steps(config.T, dts[0]) * dts[0]
    finals = [run_final(config, dt=dt, T=T) for dt in dts]
    g = config.grid
    ref_P = 2.0 * finals[-1].P - finals[-2].P
    ref_N = 2.0 * finals[-1].N - finals[-2].N
    errors = [
        math.hypot(_final_l2_error(s.P, ref_P, g), _final_l2_error(s.N, ref_N, g)) for s in finals[:-1]
    ]
    steps = dts[:-1]
    if max(errors) <= noise_floor:
        order = None
    else:
        order = fit_order(steps, errors)
    return ConvergenceResult(tuple(steps), tuple(errors), order, noise_floor)


def spatial_order(config, Ms: Sequence[int], dt: float, noise_floor: float = 1e-11) -> ConvergenceResult:
    """Observed order in space from runs on nested grids at a fixed time step.

    Each coarser solution is compared, on its own nodes, with the
    second-order Richardson reference ``(4 u_fine - u_mid)/3`` built from the
    two finest grids.
    """
    from dataclasses import replace

    from .timeloop import run_final

    Ms = sorted(int(m) for m in Ms)
    if len(Ms) < 3 or any(Ms[i + 1] != 2 * Ms[i] for i in range(len(Ms) - 1)):
        raise ValueError(f"grid sizes must double successively, got {Ms}")
    finals = [run_final(replace(config, grid=Grid(m)), dt=dt) for m in Ms]

    def at_nodes(u, m):
        return u[:: (len(u) - 1) // m]

    fine, mid = finals[-1], finals[-2]
    errors = []
    for m, s in zip(Ms[:-1], finals[:-1]):
        g = Grid(m)
        ref_P = (4.0 * at_nodes(fine.P, m) - at_nodes(mid.P, m)) / 3.0
        ref_N = (4.0 * at_nodes(fine.N, m) - at_nodes(mid.N, m)) / 3.0
        errors.append(math.hypot(_final_l2_error(s.P, ref_P, g), _final_l2_error(s.N, ref_N, g)))
    steps = [1.0 / m for m in Ms[:-1]]
    order = None if max(errors) <= noise_floor else fit_order(steps, errors)
    return ConvergenceResult(tuple(steps), tuple(errors), order, noise_floor)
