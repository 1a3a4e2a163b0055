import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rcinv.systems import planar_example

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def planar():
    return planar_example()


@pytest.fixture(scope="session")
def planar_outer(planar):
    from rcinv.nullctrl import outer_approximation

    sys, cons = planar
    return outer_approximation(sys, cons, 4 / 3 ** 5, 2)


@pytest.fixture(scope="session")
def planar_inner(planar):
    from rcinv.invariance import inner_approximation

    sys, cons = planar
    return {rho: inner_approximation(sys, cons, rho) for rho in (1.0, 0.1)}


def random_points(rng, lo, hi, k):
    return rng.uniform(np.asarray(lo, float), np.asarray(hi, float), size=(k, len(lo)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for rec in sorted(results, key=lambda r: r["num"]):
        terminalreporter.write_line(mod.format_line(rec))
