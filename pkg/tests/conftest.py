import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import levmirror as lm

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance results collected by test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def reference():
    return lm.SystemParams.reference()


@pytest.fixture(scope="session")
def blue(reference):
    return lm.linearize(reference, "blue")


@pytest.fixture(scope="session")
def red(reference):
    return lm.linearize(reference, "red")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_stable_points(n, seed=7, p_range=(6e-4, 0.1)):
    """``n`` (p_tilde, omega, model) triples on the stable blue branch with
    omega drawn log-uniformly over the default sweep bracket."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        p = float(np.exp(rng.uniform(np.log(p_range[0]), np.log(p_range[1]))))
        params = lm.SystemParams.reference(p_tilde=p)
        model = lm.linearize(params)
        if not lm.stability(model).stable:
            continue
        w = float(np.exp(rng.uniform(np.log(1e-2 * model.Omega_M), np.log(1e3 * model.g_C))))
        out.append((p, w, model))
    return out
