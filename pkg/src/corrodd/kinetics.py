"""Butler-Volmer boundary coefficients.

The boundary flux of a carrier ``u`` is affine in its boundary density::

    -J_u(0) = beta0(Psi(0)) u(0) - gamma0(Psi(0))
     J_u(1) = beta1(V - Psi(1)) u(1) - gamma1(V - Psi(1))

All functions accept scalars or numpy arrays for the potential argument.
"""

from __future__ import annotations

import numpy as np

from .errors import ExponentOverflowError
from .params import ModelParams, Side, Species

EXP_GUARD = 700.0
XI_WINDOW = (-50.0, 50.0)


def _exp(arg):
    arg = np.asarray(arg, dtype=float)
    if arg.size and np.max(np.abs(arg)) > EXP_GUARD:
        worst = arg.flat[np.argmax(np.abs(arg))]
        raise ExponentOverflowError(float(worst))
    return np.exp(arg)


def _scalar(x, value):
    return float(value) if np.ndim(x) == 0 else value


def beta(p: ModelParams, species: Species, side: Side, x):
    """``m exp(-z b x) + k exp(z a x)``; strictly positive."""
    kin = p.kin(species, side)
    z = species.z
    return _scalar(x, kin.m * _exp(-z * kin.b * np.asarray(x)) + kin.k * _exp(z * kin.a * np.asarray(x)))


def gamma(p: ModelParams, species: Species, side: Side, x):
    """Source coefficient: ``m u_max exp(-z b x)`` at side 0, ``k u_max exp(z a x)`` at side 1."""
    kin = p.kin(species, side)
    z = species.z
    um = species.umax(p)
    if Side(side) == Side.LEFT:
        val = kin.m * um * _exp(-z * kin.b * np.asarray(x))
    else:
        val = kin.k * um * _exp(z * kin.a * np.asarray(x))
    return _scalar(x, val)


def boundary_argument(p: ModelParams, side: Side, psi_boundary):
    """Potential argument of the kinetics: ``Psi(0)`` or ``V - Psi(1)``."""
    return psi_boundary if Side(side) == Side.LEFT else p.V - psi_boundary


def reaction_rate(p: ModelParams, species: Species, side: Side, u_boundary, psi_boundary):
    """Reaction rate ``beta(arg) u - gamma(arg)``.

    At side 0 this equals ``-J(0)``, at side 1 it equals ``J(1)``.
    """
    arg = boundary_argument(p, side, psi_boundary)
    return beta(p, species, side, arg) * u_boundary - gamma(p, species, side, arg)


def xi(p: ModelParams, species: Species, side: Side, x):
    """Auxiliary function whose nonpositivity drives the density bounds.

    Evaluated from its definition in terms of ``beta`` and ``gamma``; see
    :func:`xi_reduced` for the closed form after cancellation.
    """
    um = species.umax(p)
    z = species.z
    side = Side(side)
    x = np.asarray(x, dtype=float)
    lin = um * (z / p.alpha(side)) * (x - p.dpsi_pzc(side))
    sign = 1.0 if side == Side.LEFT else -1.0
    val = gamma(p, species, side, x) - um * beta(p, species, side, x) + sign * lin
    return _scalar(x, val)


def xi_reduced(p: ModelParams, species: Species, side: Side, x):
    um = species.umax(p)
    z = species.z
    kin = p.kin(species, side)
    side = Side(side)
    x = np.asarray(x, dtype=float)
    if side == Side.LEFT:
        val = um * (-kin.k * _exp(z * kin.a * x) + (z / p.alpha0) * (x - p.dpsi0_pzc))
    else:
        val = um * (-kin.m * _exp(-z * kin.b * x) - (z / p.alpha1) * (x - p.dpsi1_pzc))
    return _scalar(x, val)


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo, hi, xtol=1e-12, maxiter=200):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if hi - lo <= xtol * max(1.0, abs(lo) + abs(hi)):
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return max(fc, fd)


def xi_sup(p: ModelParams, species: Species, side: Side, samples: int = 20001) -> float:
    """Supremum of :func:`xi` over the potential window [-50, 50].

    A dense sample locates the maximum; golden-section search refines it
    inside the neighbouring sample cells.
    """
    lo, hi = XI_WINDOW
    xs = np.linspace(lo, hi, samples)
    vals = xi_reduced(p, species, side, xs)
    i = int(np.argmax(vals))
    best = float(vals[i])
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, samples - 1)]
    refined = _golden_max(lambda x: xi_reduced(p, species, side, x), a, b)
    return max(best, refined)
