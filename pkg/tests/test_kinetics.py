import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrodd import kinetics
from corrodd.errors import ExponentOverflowError
from corrodd.params import ModelParams, Side, Species, pzc_intervals

from conftest import random_admissible_params
from oracles import brute_sup

SIDES = list(Side)
SPECIES = list(Species)


@pytest.mark.parametrize("species", SPECIES)
@pytest.mark.parametrize("side", SIDES)
def test_beta_at_zero(species, side):
    p = ModelParams().with_kinetics(species, side, m=2.0, k=3.0)
    assert kinetics.beta(p, species, side, 0.0) == 5.0


def test_beta_hand_values():
    p = ModelParams().with_kinetics(Species.N, Side.LEFT, a=0.0, b=1.0)
    assert kinetics.beta(p, Species.N, Side.LEFT, math.log(2)) == pytest.approx(3.0, rel=1e-15)
    q = ModelParams()
    val = kinetics.beta(q, Species.P, Side.RIGHT, 1.0)
    assert val == pytest.approx(math.exp(-1.5) + math.exp(1.5), rel=1e-15)
    assert val == pytest.approx(4.704819, abs=5e-7)


def test_gamma_hand_values():
    p = ModelParams().with_kinetics(Species.N, Side.LEFT, m=0.7)
    assert kinetics.gamma(p, Species.N, Side.LEFT, 0.0) == pytest.approx(0.7 * p.Nm)
    assert kinetics.gamma(ModelParams(), Species.P, Side.RIGHT, 0.0) == 2.0
    q = ModelParams().with_kinetics(Species.N, Side.LEFT, b=1.0)
    assert kinetics.gamma(q, Species.N, Side.LEFT, math.log(3)) == pytest.approx(3.0, rel=1e-15)


def test_reaction_rate_examples():
    p = ModelParams()
    for side in SIDES:
        arg = 0.37
        psi = arg if side == Side.LEFT else p.V - arg
        u_eq = kinetics.gamma(p, Species.P, side, arg) / kinetics.beta(p, Species.P, side, arg)
        assert abs(kinetics.reaction_rate(p, Species.P, side, u_eq, psi)) <= 1e-14
    assert kinetics.reaction_rate(p, Species.P, Side.LEFT, p.Pm, 0.0) == pytest.approx(p.Pm)


def test_right_side_uses_drop_to_applied_potential():
    p = ModelParams(V=0.8)
    direct = kinetics.beta(p, Species.N, Side.RIGHT, 0.8 - 0.3) * 0.4 - kinetics.gamma(
        p, Species.N, Side.RIGHT, 0.5
    )
    assert kinetics.reaction_rate(p, Species.N, Side.RIGHT, 0.4, 0.3) == pytest.approx(direct, rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(
    s1=st.floats(-5, 5),
    s2=st.floats(-5, 5),
    s3=st.floats(-5, 5),
    psi=st.floats(-10, 10),
    species=st.sampled_from(SPECIES),
    side=st.sampled_from(SIDES),
)
def test_reaction_rate_affine_increasing(s1, s2, s3, psi, species, side):
    p = ModelParams()
    r = [kinetics.reaction_rate(p, species, side, s, psi) for s in (s1, s2, s3)]
    arg = kinetics.boundary_argument(p, side, psi)
    slope = kinetics.beta(p, species, side, arg)
    assert slope > 0
    scale = 1.0 + max(abs(v) for v in r)
    assert abs((r[1] - r[0]) - slope * (s2 - s1)) <= 1e-12 * scale
    # three-point collinearity
    assert abs((r[2] - r[0]) * (s2 - s1) - (r[1] - r[0]) * (s3 - s1)) <= 1e-12 * scale * (1 + abs(s3 - s1))


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-100, 100), species=st.sampled_from(SPECIES), side=st.sampled_from(SIDES))
def test_beta_gamma_positive(x, species, side):
    p = ModelParams()
    assert kinetics.beta(p, species, side, x) > 0
    assert kinetics.gamma(p, species, side, x) > 0


def test_overflow_guard_reports_argument():
    with pytest.raises(ExponentOverflowError) as exc:
        kinetics.beta(ModelParams(), Species.P, Side.LEFT, 500.0)
    assert abs(exc.value.argument) == pytest.approx(750.0)
    with pytest.raises(ExponentOverflowError):
        kinetics.gamma(ModelParams(), Species.N, Side.RIGHT, np.array([0.0, -1500.0]))


def test_array_arguments():
    xs = np.linspace(-2, 2, 7)
    vals = kinetics.beta(ModelParams(), Species.N, Side.LEFT, xs)
    assert vals.shape == xs.shape
    assert vals[3] == 2.0


def test_xi_forms_agree(rng):
    xs = np.linspace(-50, 50, 10_000)
    for _ in range(5):
        p = random_admissible_params(rng)
        for species in SPECIES:
            for side in SIDES:
                a = kinetics.xi(p, species, side, xs)
                b = kinetics.xi_reduced(p, species, side, xs)
                # relative to the magnitude of the cancelling terms
                scale = 1.0 + np.abs(species.umax(p) * kinetics.beta(p, species, side, xs))
                assert np.max(np.abs(a - b) / scale) <= 1e-12


def test_xi_nonpositive_under_interval_hypothesis(rng):
    xs = np.linspace(-50, 50, 10_000)
    for _ in range(20):
        p = random_admissible_params(rng)
        for species in SPECIES:
            for side in SIDES:
                assert np.max(kinetics.xi_reduced(p, species, side, xs)) <= 1e-10


def test_xi_at_pzc_values():
    p = ModelParams(dpsi0_pzc=0.1, dpsi1_pzc=-0.2)
    k0 = p.kin(Species.P, Side.LEFT)
    assert kinetics.xi(p, Species.P, Side.LEFT, 0.1) == pytest.approx(
        -p.Pm * k0.k * math.exp(3 * k0.a * 0.1), rel=1e-14
    )
    m1 = p.kin(Species.N, Side.RIGHT)
    assert kinetics.xi(p, Species.N, Side.RIGHT, -0.2) == pytest.approx(
        -p.Nm * m1.m * math.exp(-(-1) * m1.b * -0.2), rel=1e-14
    )


def test_xi_sup_attained_where_expected():
    (lo0, _), _ = pzc_intervals(ModelParams())
    p = ModelParams(dpsi0_pzc=lo0)
    x_star = -math.log(0.5 * 1.0 * 1.0) / 1.5
    assert abs(kinetics.xi_reduced(p, Species.P, Side.LEFT, x_star)) <= 1e-12
    assert abs(kinetics.xi_sup(p, Species.P, Side.LEFT)) <= 1e-8


def test_xi_sup_matches_brute_force(rng):
    for _ in range(3):
        p = random_admissible_params(rng)
        for species in SPECIES:
            for side in SIDES:
                brute = brute_sup(lambda x: kinetics.xi_reduced(p, species, side, x))
                assert kinetics.xi_sup(p, species, side) == pytest.approx(brute, abs=1e-8)


def test_xi_sup_sign():
    p = ModelParams()
    for species in SPECIES:
        for side in SIDES:
            assert kinetics.xi_sup(p, species, side) < 0
    assert kinetics.xi_sup(ModelParams(dpsi0_pzc=0.7), Species.N, Side.LEFT) > 0
