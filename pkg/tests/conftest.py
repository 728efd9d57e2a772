import numpy as np
import pytest
from dataclasses import replace

from corrodd.params import InterfaceKinetics, ModelParams, Side, Species, pzc_intervals


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_admissible_params(rng, V_range=0.0):
    """Kinetics with m, k in [0.5, 2], a, b in [0.1, 0.9] and pzc drops
    drawn inside their (nonempty) intervals."""
    while True:
        kin = {
            (s, side): InterfaceKinetics(
                m=rng.uniform(0.5, 2.0),
                k=rng.uniform(0.5, 2.0),
                a=rng.uniform(0.1, 0.9),
                b=rng.uniform(0.1, 0.9),
            )
            for s in Species
            for side in Side
        }
        p = ModelParams(kinetics=kin, V=rng.uniform(-V_range, V_range) if V_range else 0.0)
        (lo0, hi0), (lo1, hi1) = pzc_intervals(p)
        if lo0 < hi0 and lo1 < hi1:
            return replace(p, dpsi0_pzc=rng.uniform(lo0, hi0), dpsi1_pzc=rng.uniform(lo1, hi1))


_ACCEPTANCE = {}


@pytest.fixture
def verdict():
    """Record one acceptance line: ``verdict(n, ok, detail)``; asserts ``ok``."""

    def record(n, ok, detail):
        _ACCEPTANCE[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE[n])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
