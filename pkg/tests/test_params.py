import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrodd import kinetics
from corrodd.errors import InadmissibleParamsError, NonFiniteParameterError
from corrodd.params import (
    ModelParams,
    Side,
    Species,
    check_admissibility,
    pzc_intervals,
    require_admissible,
    tau_max,
)

from oracles import xi_threshold_bisect


def test_application_values_satisfy_neutrality():
    report = check_admissibility(ModelParams(rho_hl=-5, Pm=2, Nm=1))
    assert report.passed
    assert report.neutrality_residual == 0.0


def test_neutrality_violation_reported():
    report = check_admissibility(ModelParams(rho_hl=-4, Pm=2, Nm=1))
    assert not report.passed
    assert "neutrality" in report.failed()


def test_interval_endpoints_by_hand():
    (lo0, hi0), (lo1, hi1) = pzc_intervals(ModelParams())
    assert lo0 == pytest.approx(-(1 / 1.5) * (1 + math.log(0.5)), abs=1e-15)
    assert lo0 == pytest.approx(-0.204568, abs=1e-6)
    assert hi0 == pytest.approx(2 * (1 + math.log(0.5)), abs=1e-15)
    assert hi0 == pytest.approx(0.613706, abs=1e-6)
    # the defaults are symmetric between the two sides
    assert (lo1, hi1) == pytest.approx((-hi0, -lo0), abs=1e-15)
    assert lo0 < 0 < hi0 and lo1 < 0 < hi1


@pytest.mark.parametrize(
    "changes, expected",
    [({}, 1 / 18), ({"lambda2": 18.0, "epsilon": 1.0}, 1.0)],
)
def test_tau_examples(changes, expected):
    assert tau_max(replace(ModelParams(), **changes)) == pytest.approx(expected, rel=1e-15)


def test_tau_linear_in_lambda2():
    p = ModelParams()
    assert tau_max(replace(p, lambda2=2.0)) == 2.0 * tau_max(p)


def test_tau_rejects_inadmissible():
    with pytest.raises(InadmissibleParamsError) as exc:
        tau_max(ModelParams(rho_hl=-4))
    assert "neutrality" in exc.value.report.failed()


@pytest.mark.parametrize("field", ["lambda2", "V", "dpsi0_pzc", "rho_hl"])
@pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(field, value):
    with pytest.raises(NonFiniteParameterError, match=field):
        check_admissibility(replace(ModelParams(), **{field: value}))


def test_non_finite_kinetics_rejected():
    p = ModelParams().with_kinetics(Species.N, Side.RIGHT, a=math.nan)
    with pytest.raises(NonFiniteParameterError, match="kinetics.N.side1.a"):
        check_admissibility(p)


@pytest.mark.parametrize(
    "p, name",
    [
        (ModelParams(epsilon=0.0), "positive-scalings"),
        (ModelParams(alpha1=-1.0), "positive-scalings"),
        (ModelParams().with_kinetics(Species.P, Side.LEFT, m=0.0), "rate-constants"),
        (ModelParams().with_kinetics(Species.N, Side.LEFT, b=1.5), "transfer-coefficients"),
        (ModelParams(dpsi0_pzc=0.7), "pzc-interval side 0"),
        (ModelParams(dpsi1_pzc=-0.7), "pzc-interval side 1"),
    ],
)
def test_each_hypothesis_reported(p, name):
    failed = check_admissibility(p).failed()
    assert failed[0] == name
    # interval checks are skipped once their inputs are invalid
    assert all(f.startswith("pzc") for f in failed[1:])


def test_unsafe_pzc_lifts_only_interval_checks():
    p = ModelParams(dpsi0_pzc=5.0)
    with pytest.raises(InadmissibleParamsError):
        require_admissible(p)
    require_admissible(p, allow_pzc=True)
    with pytest.raises(InadmissibleParamsError):
        require_admissible(replace(p, rho_hl=-4.0), allow_pzc=True)


def test_report_is_pure():
    p = ModelParams(V=0.3, dpsi1_pzc=0.1)
    assert check_admissibility(p) == check_admissibility(p)
    assert check_admissibility(p).to_dict() == check_admissibility(p).to_dict()


def test_zero_transfer_coefficient_gives_empty_interval():
    p = ModelParams().with_kinetics(Species.P, Side.LEFT, a=0.0)
    (lo0, hi0), _ = pzc_intervals(p)
    assert lo0 == math.inf and lo0 > hi0
    assert not check_admissibility(p).passed


def _endpoint_by_root(p, species, side, guess):
    """Locate where sup xi changes sign by bisection on dpsi_pzc."""
    field = "dpsi0_pzc" if side == Side.LEFT else "dpsi1_pzc"

    def f(d):
        return kinetics.xi_sup(replace(p, **{field: d}), species, side)

    lo, hi = guess - 1.0, guess + 1.0
    assert f(lo) * f(hi) < 0
    return xi_threshold_bisect(f, lo, hi, tol=1e-11)


@pytest.mark.parametrize(
    "species, side, idx",
    [
        (Species.P, Side.LEFT, (0, 0)),
        (Species.N, Side.LEFT, (0, 1)),
        (Species.N, Side.RIGHT, (1, 0)),
        (Species.P, Side.RIGHT, (1, 1)),
    ],
)
def test_endpoints_match_xi_sign_change(species, side, idx):
    p = ModelParams().with_kinetics(species, side, a=0.3, b=0.7, m=1.4, k=0.8)
    closed = pzc_intervals(p)[idx[0]][idx[1]]
    assert _endpoint_by_root(p, species, side, closed) == pytest.approx(closed, abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(
    lam=st.floats(1e-3, 1e3),
    eps=st.floats(1e-3, 10.0),
    Pm=st.floats(0.1, 10.0),
    Nm=st.floats(0.1, 10.0),
)
def test_tau_positive_for_admissible(lam, eps, Pm, Nm):
    p = ModelParams(lambda2=lam, epsilon=eps, Pm=Pm, Nm=Nm, rho_hl=Nm - 3 * Pm)
    report = check_admissibility(p)
    if report.passed:
        assert tau_max(p) > 0
