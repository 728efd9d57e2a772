"""Semi-implicit time stepping of the coupled potential/carrier system.

Each step solves the potential from the current densities, then advances
both carriers with one linear implicit solve each, the potential frozen at
the old level.  The two carrier solves are independent of one another.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import diagnostics
from .discretization import Grid, solve_carrier, solve_poisson
from .errors import BoundViolationError, InitialDataError, TimeStepError
from .params import ModelParams, Species, require_admissible, tau_max

log = logging.getLogger(__name__)

BOUND_TOL = 1e-10
# slack when counting steps so that T = n*dt is not rounded up to n+1 steps
_STEP_SLACK = 1e-9


@dataclass(frozen=True)
class InitSpec:
    """Initial density: a constant, a CSV file of M+1 values, or explicit values."""

    constant: Optional[float] = None
    file: Optional[str] = None
    values: Optional[tuple] = None

    def __post_init__(self):
        given = [x is not None for x in (self.constant, self.file, self.values)]
        if sum(given) != 1:
            raise ValueError("exactly one of constant, file, values must be given")

    def resolve(self, g: Grid, base: Path | None = None) -> np.ndarray:
        if self.constant is not None:
            return np.full(g.size, float(self.constant))
        if self.values is not None:
            arr = np.asarray(self.values, dtype=float)
        else:
            path = Path(self.file)
            if base is not None and not path.is_absolute():
                path = base / path
            arr = _read_profile(path)
        if arr.shape != (g.size,):
            raise InitialDataError(f"initial profile has {arr.size} values, grid needs {g.size}")
        return arr


def _read_profile(path: Path) -> np.ndarray:
    vals = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        for tok in line.split(","):
            tok = tok.strip()
            if tok:
                try:
                    vals.append(float(tok))
                except ValueError:
                    continue  # header
    return np.asarray(vals, dtype=float)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one simulation.

    ``dt`` is either a positive number or the string ``"auto"`` (meaning
    ``safety * tau_max``).  ``unsafe_dt`` lifts the time-step bound and turns
    bound violations into warnings; ``unsafe_pzc`` lets the point-of-zero
    -charge drops leave their admissible intervals.
    """

    params: ModelParams = field(default_factory=ModelParams)
    grid: Grid = field(default_factory=Grid)
    dt: object = "auto"
    safety: float = 0.9
    T: float = 0.5
    # electroneutral start for the default parameters: 3*1.8 - 0.4 - 5 = 0
    init_P: InitSpec = field(default_factory=lambda: InitSpec(constant=1.8))
    init_N: InitSpec = field(default_factory=lambda: InitSpec(constant=0.4))
    snapshot_times: Optional[tuple] = None
    series: bool = True
    unsafe_dt: bool = False
    unsafe_pzc: bool = False
    base_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ValueError(f"final time must be >= 0, got {self.T!r}")
        if not 0 < self.safety <= 1:
            raise ValueError(f"safety factor must lie in (0, 1], got {self.safety!r}")
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ValueError(f"dt must be 'auto' or positive, got {self.dt!r}")

    def tau(self) -> float:
        return tau_max(self.params, allow_pzc=self.unsafe_pzc)

    def resolved_dt(self) -> float:
        if self.dt == "auto":
            return self.safety * self.tau()
        return float(self.dt)

    def resolved_snapshot_times(self) -> tuple:
        if self.snapshot_times is None:
            return (0.0,) if self.T == 0 else (0.0, float(self.T))
        return tuple(sorted(set(float(t) for t in self.snapshot_times)))


@dataclass
class SimState:
    k: int
    t: float
    P: np.ndarray
    N: np.ndarray
    Psi: np.ndarray


@dataclass
class Trajectory:
    """Snapshots at requested times, one diagnostics record per step, and the
    full history of every level (rows of ``P``, ``N``, ``Psi``)."""

    params: ModelParams
    grid: Grid
    dt: float
    snapshots: list
    diagnostics: list
    P: np.ndarray
    N: np.ndarray
    Psi: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.diagnostics)

    @property
    def final(self) -> SimState:
        k = self.steps
        return SimState(k, k * self.dt, self.P[-1], self.N[-1], self.Psi[-1])


def n_steps(T: float, dt: float) -> int:
    return max(0, math.ceil(T / dt - _STEP_SLACK))


def check_initial(P0, N0, p: ModelParams) -> None:
    for name, u, um in (("P", P0, p.Pm), ("N", N0, p.Nm)):
        if not np.all(np.isfinite(u)):
            i = int(np.flatnonzero(~np.isfinite(u))[0])
            raise InitialDataError(f"initial {name} is not finite at node {i}: {u[i]!r}")
        bad = np.flatnonzero((u < 0.0) | (u > um))
        if bad.size:
            i = int(bad[0])
            raise InitialDataError(
                f"initial {name} at node {i} is {u[i]!r}, outside [0, {um!r}]"
            )


def make_state(k: int, t: float, P, N, p: ModelParams, g: Grid) -> SimState:
    P = np.asarray(P, dtype=float)
    N = np.asarray(N, dtype=float)
    return SimState(k, t, P, N, solve_poisson(P, N, p, g))


def init(config: RunConfig) -> SimState:
    """Initial state with the potential solved from the initial densities."""
    p, g = config.params, config.grid
    require_admissible(p, allow_pzc=config.unsafe_pzc)
    base = Path(config.base_dir) if config.base_dir else None
    P0 = config.init_P.resolve(g, base)
    N0 = config.init_N.resolve(g, base)
    check_initial(P0, N0, p)
    return make_state(0, 0.0, P0, N0, p, g)


def check_dt(dt: float, p: ModelParams, unsafe: bool = False, allow_pzc: bool = False) -> None:
    if not dt > 0:
        raise TimeStepError(f"time step must be positive, got {dt!r}")
    if unsafe:
        return
    tau = tau_max(p, allow_pzc=allow_pzc)
    if dt > tau:
        raise TimeStepError(f"time step {dt!r} exceeds the bound tau = {tau!r}")


def advance(state: SimState, dt: float, p: ModelParams, g: Grid) -> SimState:
    """One step without any precondition check."""
    Psi = state.Psi  # potential of (P^k, N^k)
    P_new = solve_carrier(Species.P, state.P, Psi, dt, p, g)
    N_new = solve_carrier(Species.N, state.N, Psi, dt, p, g)
    k = state.k + 1
    return make_state(k, k * dt, P_new, N_new, p, g)


def step(
    state: SimState,
    dt: float,
    p: ModelParams,
    g: Grid,
    unsafe_dt: bool = False,
    allow_pzc: bool = False,
) -> SimState:
    """Advance ``state`` by one time step.

    The stored ``Psi`` of the returned state is recomputed from its own
    densities, so each state is self-consistent.
    """
    check_dt(dt, p, unsafe=unsafe_dt, allow_pzc=allow_pzc)
    return advance(state, dt, p, g)


def bound_violation(state: SimState, p: ModelParams, tol: float = BOUND_TOL) -> Optional[str]:
    msgs = []
    for name, u, um in (("P", state.P, p.Pm), ("N", state.N, p.Nm)):
        lo, hi = float(u.min()), float(u.max())
        if lo < -tol:
            msgs.append(f"min {name} = {lo!r} at node {int(u.argmin())}")
        if hi > um + tol:
            msgs.append(f"max {name} = {hi!r} > {um!r} at node {int(u.argmax())}")
    if not msgs:
        return None
    return f"step {state.k} (t = {state.t!r}): " + "; ".join(msgs)


def run(config: RunConfig, dt: Optional[float] = None, T: Optional[float] = None) -> Trajectory:
    """Run the simulation described by ``config``.

    ``dt`` and ``T`` override the configured values.  Raises
    :class:`BoundViolationError` on a density leaving its box unless
    ``config.unsafe_dt`` is set, in which case violations are collected in
    ``Trajectory.violations``.
    """
    p, g = config.params, config.grid
    dt = config.resolved_dt() if dt is None else float(dt)
    T = config.T if T is None else float(T)
    check_dt(dt, p, unsafe=config.unsafe_dt, allow_pzc=config.unsafe_pzc)

    state = init(config)
    K = n_steps(T, dt)
    wanted = list(config.resolved_snapshot_times()) if T == config.T else [0.0, T]
    wanted = [t for t in wanted if t <= K * dt + _STEP_SLACK * dt]
    snap_steps = sorted({n_steps(t, dt) for t in wanted})

    P_hist = np.empty((K + 1, g.size))
    N_hist = np.empty((K + 1, g.size))
    Psi_hist = np.empty((K + 1, g.size))
    P_hist[0], N_hist[0], Psi_hist[0] = state.P, state.N, state.Psi
    snapshots = [state] if 0 in snap_steps else []
    records = []
    violations = []

    for _ in range(K):
        new = advance(state, dt, p, g)
        rec = diagnostics.step_record(new.k, new.t, state, new, state.Psi, dt, p, g)
        records.append(rec)
        msg = bound_violation(new, p)
        if msg is not None:
            if not config.unsafe_dt:
                raise BoundViolationError("density bound violated at " + msg, new, rec)
            log.warning("density bound violated at %s", msg)
            violations.append(msg)
        P_hist[new.k], N_hist[new.k], Psi_hist[new.k] = new.P, new.N, new.Psi
        if new.k in snap_steps:
            snapshots.append(new)
        state = new

    return Trajectory(p, g, dt, snapshots, records, P_hist, N_hist, Psi_hist, violations)


def run_final(config: RunConfig, dt: float, T: Optional[float] = None) -> SimState:
    """Final state of a run, without storing snapshots."""
    cfg = replace(config, snapshot_times=(), series=False)
    return run(cfg, dt=dt, T=T).final


def fixed_point_config(um_fraction_P: float = 0.9) -> RunConfig:
    """Configuration whose initial state is an exact steady state.

    Densities are constant with ``3P - N + rho_hl = 0`` so the potential
    vanishes, and the kinetics are chosen so that every boundary reaction
    is at equilibrium at zero potential.
    """
    from .params import InterfaceKinetics, Side

    base = ModelParams()
    fP = um_fraction_P
    P0 = fP * base.Pm
    N0 = 3.0 * P0 + base.rho_hl
    fN = N0 / base.Nm
    if not 0 < fN < 1:
        raise ValueError("fraction leaves no admissible electron density")
    # gamma/beta at zero potential is m/(m+k) on side 0 and k/(m+k) on side 1;
    # the unit coefficients keep zero inside both pzc intervals
    rP, rN = fP / (1.0 - fP), fN / (1.0 - fN)
    kin = {
        (Species.P, Side.LEFT): InterfaceKinetics(m=rP, k=1.0),
        (Species.P, Side.RIGHT): InterfaceKinetics(m=1.0, k=rP),
        (Species.N, Side.LEFT): InterfaceKinetics(m=rN, k=1.0),
        (Species.N, Side.RIGHT): InterfaceKinetics(m=1.0, k=rN),
    }
    p = replace(base, kinetics=kin)
    return RunConfig(params=p, init_P=InitSpec(constant=P0), init_N=InitSpec(constant=N0))
