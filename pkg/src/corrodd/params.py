"""Model constants and checks of the standing hypotheses.

All quantities are dimensionless.  Two carriers are modelled: the Fe(3+)
cations ``P`` (charge 3) and the electrons ``N`` (charge -1).  Each carrier
exchanges mass with the metal at ``x = 0`` and with the solution at
``x = 1`` through affine Butler-Volmer laws whose coefficients live in
:class:`InterfaceKinetics`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from typing import Mapping

from .errors import InadmissibleParamsError, NonFiniteParameterError

# tolerance on the electroneutrality relation 3 Pm - Nm + rho_hl = 0
NEUTRALITY_TOL = 1e-12


class Species(enum.Enum):
    P = "P"
    N = "N"

    @property
    def z(self) -> int:
        """Charge number of the carrier."""
        return 3 if self is Species.P else -1

    def eps(self, p: "ModelParams") -> float:
        """Coefficient in front of the time derivative."""
        return 1.0 if self is Species.P else p.epsilon

    def umax(self, p: "ModelParams") -> float:
        """Maximal density of the carrier."""
        return p.Pm if self is Species.P else p.Nm


class Side(enum.IntEnum):
    LEFT = 0  # metal/oxide interface, x = 0
    RIGHT = 1  # oxide/solution interface, x = 1


@dataclass(frozen=True)
class InterfaceKinetics:
    """Rate constants ``m, k`` and transfer coefficients ``a, b`` of one reaction."""

    m: float = 1.0
    k: float = 1.0
    a: float = 0.5
    b: float = 0.5


def _default_kinetics():
    return {(s, side): InterfaceKinetics() for s in Species for side in Side}


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless constants of the corrosion model.

    Defaults are the application values ``rho_hl = -5, Pm = 2, Nm = 1`` and
    a symmetric choice for everything else (``lambda2 = 1``,
    ``epsilon = 0.1``, unit capacitance lengths, zero applied potential and
    zero point-of-zero-charge drops, ``m = k = 1`` and ``a = b = 0.5``).
    """

    lambda2: float = 1.0
    epsilon: float = 0.1
    rho_hl: float = -5.0
    alpha0: float = 1.0
    alpha1: float = 1.0
    V: float = 0.0
    dpsi0_pzc: float = 0.0
    dpsi1_pzc: float = 0.0
    Pm: float = 2.0
    Nm: float = 1.0
    kinetics: Mapping = field(default_factory=_default_kinetics, compare=True)

    def kin(self, species: Species, side: Side) -> InterfaceKinetics:
        return self.kinetics[(species, Side(side))]

    def alpha(self, side: Side) -> float:
        return self.alpha0 if side == Side.LEFT else self.alpha1

    def dpsi_pzc(self, side: Side) -> float:
        return self.dpsi0_pzc if side == Side.LEFT else self.dpsi1_pzc

    def with_kinetics(self, species: Species, side: Side, **changes) -> "ModelParams":
        kin = dict(self.kinetics)
        kin[(species, Side(side))] = replace(kin[(species, Side(side))], **changes)
        return replace(self, kinetics=kin)

    def scalars(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "kinetics"}


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of :func:`check_admissibility`.

    ``interval0`` and ``interval1`` are the closed intervals that the two
    point-of-zero-charge drops must lie in.  An empty interval has its lower
    end above its upper end.
    """

    checks: tuple
    interval0: tuple
    interval1: tuple
    neutrality_residual: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def passed_except_pzc(self) -> bool:
        return all(c.passed for c in self.checks if not c.name.startswith("pzc"))

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
            "interval_side0": list(self.interval0),
            "interval_side1": list(self.interval1),
            "neutrality_residual": self.neutrality_residual,
        }

    def format(self) -> str:
        lines = ["admissibility report"]
        for c in self.checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        lo, hi = self.interval0
        lines.append(f"  side 0 pzc interval: [{lo:.10g}, {hi:.10g}]")
        lo, hi = self.interval1
        lines.append(f"  side 1 pzc interval: [{lo:.10g}, {hi:.10g}]")
        lines.append(f"  verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _threshold(coeff: float, rate: float, alpha: float, charge: int) -> float:
    """``(1 + log(coeff*rate*alpha)) / (|charge|*coeff)``; infinite limit at ``coeff = 0``."""
    if coeff == 0.0:
        return -math.inf
    return (1.0 + math.log(coeff * rate * alpha)) / (abs(charge) * coeff)


def pzc_intervals(p: ModelParams) -> tuple:
    """Admissible intervals for ``dpsi0_pzc`` and ``dpsi1_pzc``.

    Each end is where the supremum of the corresponding auxiliary function
    ``xi`` crosses zero; see :func:`corrodd.kinetics.xi_sup`.
    """
    P, N = Species.P, Species.N
    kP0, kN0 = p.kin(P, Side.LEFT), p.kin(N, Side.LEFT)
    kP1, kN1 = p.kin(P, Side.RIGHT), p.kin(N, Side.RIGHT)
    lo0 = -_threshold(kP0.a, kP0.k, p.alpha0, P.z)
    hi0 = _threshold(kN0.a, kN0.k, p.alpha0, N.z)
    lo1 = -_threshold(kN1.b, kN1.m, p.alpha1, N.z)
    hi1 = _threshold(kP1.b, kP1.m, p.alpha1, P.z)
    return (lo0, hi0), (lo1, hi1)


def _all_values(p: ModelParams):
    for name, value in p.scalars().items():
        yield name, value
    for (s, side), kin in p.kinetics.items():
        for f in fields(kin):
            yield f"kinetics.{s.value}.side{int(side)}.{f.name}", getattr(kin, f.name)


def check_admissibility(p: ModelParams) -> AdmissibilityReport:
    """Check the standing hypotheses on ``p``.

    Raises
    ------
    NonFiniteParameterError
        If any parameter is NaN or infinite.
    """
    bad = [name for name, v in _all_values(p) if not math.isfinite(v)]
    if bad:
        raise NonFiniteParameterError(f"non-finite parameter value(s): {', '.join(bad)}")

    checks = []
    positive = {
        "lambda2": p.lambda2,
        "epsilon": p.epsilon,
        "alpha0": p.alpha0,
        "alpha1": p.alpha1,
        "Pm": p.Pm,
        "Nm": p.Nm,
    }
    nonpos = [k for k, v in positive.items() if not v > 0]
    checks.append(
        HypothesisCheck(
            "positive-scalings",
            not nonpos,
            "all positive" if not nonpos else f"not positive: {', '.join(nonpos)}",
        )
    )

    rates = [
        f"{s.value}{int(side)}.{n}"
        for (s, side), kin in sorted(p.kinetics.items(), key=lambda it: (it[0][0].value, it[0][1]))
        for n in ("m", "k")
        if not getattr(kin, n) > 0
    ]
    checks.append(
        HypothesisCheck(
            "rate-constants",
            not rates,
            "m, k > 0 for all reactions" if not rates else f"not positive: {', '.join(rates)}",
        )
    )

    transfer = [
        f"{s.value}{int(side)}.{n}"
        for (s, side), kin in sorted(p.kinetics.items(), key=lambda it: (it[0][0].value, it[0][1]))
        for n in ("a", "b")
        if not 0.0 <= getattr(kin, n) <= 1.0
    ]
    checks.append(
        HypothesisCheck(
            "transfer-coefficients",
            not transfer,
            "a, b in [0, 1]" if not transfer else f"outside [0, 1]: {', '.join(transfer)}",
        )
    )

    residual = 3.0 * p.Pm - p.Nm + p.rho_hl
    checks.append(
        HypothesisCheck(
            "neutrality",
            abs(residual) <= NEUTRALITY_TOL,
            f"3*Pm - Nm + rho_hl = {residual:.3g}",
        )
    )

    if nonpos or rates or transfer:
        # the interval formulas need positive logs arguments
        nan = (math.nan, math.nan)
        checks.append(HypothesisCheck("pzc-interval side 0", False, "not evaluated"))
        checks.append(HypothesisCheck("pzc-interval side 1", False, "not evaluated"))
        return AdmissibilityReport(tuple(checks), nan, nan, residual)

    (lo0, hi0), (lo1, hi1) = pzc_intervals(p)
    for label, lo, hi, value in (
        ("pzc-interval side 0", lo0, hi0, p.dpsi0_pzc),
        ("pzc-interval side 1", lo1, hi1, p.dpsi1_pzc),
    ):
        ok = lo <= value <= hi
        checks.append(HypothesisCheck(label, ok, f"{value:.10g} in [{lo:.10g}, {hi:.10g}]"))
    return AdmissibilityReport(tuple(checks), (lo0, hi0), (lo1, hi1), residual)


def require_admissible(p: ModelParams, allow_pzc: bool = False) -> AdmissibilityReport:
    report = check_admissibility(p)
    ok = report.passed_except_pzc() if allow_pzc else report.passed
    if not ok:
        raise InadmissibleParamsError(
            "inadmissible parameters: " + ", ".join(report.failed()) + "\n" + report.format(),
            report,
        )
    return report


def tau_max(p: ModelParams, allow_pzc: bool = False) -> float:
    """Largest time step for which the densities stay in ``[0, u_max]``."""
    require_admissible(p, allow_pzc=allow_pzc)
    return p.lambda2 * min(1.0 / (9.0 * p.Pm), p.epsilon / p.Nm)
