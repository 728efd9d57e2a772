"""Vertex-centred finite volumes on a uniform grid of (0, 1).

Node ``i`` sits at ``x_i = i h`` and owns the control volume
``[x_i - h/2, x_i + h/2]`` clipped to the domain, so the end nodes own half
cells.  Carrier fluxes between neighbouring nodes use the
Scharfetter-Gummel (exponential fitting) formula, which keeps every
assembled carrier matrix an M-matrix regardless of the time step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kinetics
from .errors import ExponentOverflowError, TimeStepError, ZeroPivotError
from .params import ModelParams, Side, Species

SERIES_CUTOFF = 1e-5


@dataclass(frozen=True)
class Grid:
    M: int = 100

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"grid needs an integer M >= 2, got {self.M!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.M + 1) / self.M

    @property
    def weights(self) -> np.ndarray:
        """Control-volume lengths (h/2 at the ends, h inside)."""
        w = np.full(self.M + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    @property
    def size(self) -> int:
        return self.M + 1


@dataclass
class TridiagonalSystem:
    """``sub[i]`` couples row ``i+1`` to column ``i``; ``sup[i]`` row ``i`` to column ``i+1``."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.sup) != n - 1 or len(self.rhs) != n:
            raise ValueError("inconsistent tridiagonal sizes")

    def matvec(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.sub * u[:-1]
        out[:-1] += self.sup * u[1:]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


def _check_field(name, values, g: Grid) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (g.size,):
        raise ValueError(f"{name} has shape {values.shape}, expected ({g.size},)")
    return values


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas algorithm: one forward elimination, one back substitution."""
    a, b, c, d = sys.sub, sys.diag, sys.sup, sys.rhs
    n = len(b)
    cp = np.empty(n - 1)
    dp = np.empty(n)
    piv = b[0]
    if piv == 0.0:
        raise ZeroPivotError(0)
    if n > 1:
        cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i - 1] * cp[i - 1]
        if piv == 0.0:
            raise ZeroPivotError(i)
        if i < n - 1:
            cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / piv
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def bernoulli(x):
    """``x / (exp(x) - 1)``, continued by 1 at the origin."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < SERIES_CUTOFF
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 + xs * xs / 12.0
    xl = x[~small]
    with np.errstate(over="ignore"):
        out[~small] = xl / np.expm1(xl)
    return float(out) if out.ndim == 0 else out


def _guard(arg):
    arg = np.asarray(arg, dtype=float)
    if arg.size and np.max(np.abs(arg)) > kinetics.EXP_GUARD:
        raise ExponentOverflowError(float(arg.flat[np.argmax(np.abs(arg))]))


def sg_flux(species: Species, u_left, u_right, dpsi, h: float):
    """Scharfetter-Gummel approximation of ``J = -u' - z u Psi'`` on one edge.

    ``dpsi`` is ``Psi_right - Psi_left``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    s = species.z * np.asarray(dpsi, dtype=float)
    _guard(s)
    return (bernoulli(s) * u_left - bernoulli(-s) * u_right) / h


def poisson_source(P, N, p: ModelParams):
    return 3.0 * np.asarray(P) - np.asarray(N) + p.rho_hl


def assemble_poisson(P, N, p: ModelParams, g: Grid) -> TridiagonalSystem:
    """Finite-volume system for ``-lambda2 Psi'' = 3P - N + rho_hl`` with Robin ends.

    Half-cell balances at the end nodes take the boundary flux from
    ``Psi'(0) = (Psi(0) - dpsi0)/alpha0`` and
    ``Psi'(1) = (V - dpsi1 - Psi(1))/alpha1``.
    """
    P = _check_field("P", P, g)
    N = _check_field("N", N, g)
    h, lam2 = g.h, p.lambda2
    n = g.size
    off = np.full(n - 1, -lam2 / h)
    diag = np.full(n, 2.0 * lam2 / h)
    diag[0] = lam2 / h + lam2 / p.alpha0
    diag[-1] = lam2 / h + lam2 / p.alpha1
    rhs = g.weights * poisson_source(P, N, p)
    rhs[0] += lam2 * p.dpsi0_pzc / p.alpha0
    rhs[-1] += lam2 * (p.V - p.dpsi1_pzc) / p.alpha1
    return TridiagonalSystem(off, diag, off.copy(), rhs)


def solve_poisson(P, N, p: ModelParams, g: Grid) -> np.ndarray:
    return solve_tridiagonal(assemble_poisson(P, N, p, g))


def assemble_carrier(
    species: Species, u_old, Psi, dt: float, p: ModelParams, g: Grid
) -> TridiagonalSystem:
    """Fully implicit step for one carrier with the potential frozen.

    Row ``i`` is ``eps w_i (u_i - u_old_i)/dt + J_{i+1/2} - J_{i-1/2} = 0``
    where the end fluxes ``J(0)``, ``J(1)`` come from the Butler-Volmer laws
    evaluated at ``Psi``.  Columns sum to the mass term plus the boundary
    ``beta``, so the matrix is a column diagonally dominant M-matrix.
    """
    if not dt > 0:
        raise TimeStepError(f"time step must be positive, got {dt!r}")
    u_old = _check_field("u_old", u_old, g)
    Psi = _check_field("Psi", Psi, g)
    h = g.h
    s = species.z * np.diff(Psi)
    _guard(s)
    bp = bernoulli(s) / h  # weight of the left node in J_{i+1/2}
    bm = bernoulli(-s) / h  # weight of the right node
    mass = species.eps(p) * g.weights / dt

    diag = mass.copy()
    diag[:-1] += bp
    diag[1:] += bm
    sup = -bm
    sub = -bp
    rhs = mass * u_old

    arg0 = kinetics.boundary_argument(p, Side.LEFT, Psi[0])
    arg1 = kinetics.boundary_argument(p, Side.RIGHT, Psi[-1])
    diag[0] += kinetics.beta(p, species, Side.LEFT, arg0)
    rhs[0] += kinetics.gamma(p, species, Side.LEFT, arg0)
    diag[-1] += kinetics.beta(p, species, Side.RIGHT, arg1)
    rhs[-1] += kinetics.gamma(p, species, Side.RIGHT, arg1)
    return TridiagonalSystem(sub, diag, sup, rhs)


def solve_carrier(species: Species, u_old, Psi, dt: float, p: ModelParams, g: Grid) -> np.ndarray:
    return solve_tridiagonal(assemble_carrier(species, u_old, Psi, dt, p, g))
