import numpy as np
import pytest

from vortexflow import sphere
from vortexflow.energy import VortexConfiguration


def random_configuration(rng, npairs, max_x3=0.6, min_sep=0.05):
    """Alternating +/-1 vortices uniform on the sphere below ``max_x3``."""
    while True:
        P = sphere.sample_sphere(rng, 2 * npairs, max_x3)
        dist = np.linalg.norm(P[:, None] - P[None], axis=-1)
        np.fill_diagonal(dist, np.inf)
        if dist.min() > min_sep:
            return VortexConfiguration.from_sphere(P, np.tile([1, -1], npairs))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail):
    """Store one pass/fail line; printed at the end of the session."""
    line = "%s %s: %s" % ("PASS" if passed else "FAIL", label, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
