"""Shared models and the expensive PDE runs (session-scoped, computed once)."""
import time

import pytest

from kppfront.cross_section import LossSpec, ProfileSpec, ReactionSpec, build_model, constant_model
from kppfront.diagnostics import observe
from kppfront.front import solve_front
from kppfront.ivp import CylinderGrid, make_initial_profile, run

SHEAR_FLOW = ProfileSpec("cosine", 0.0, 2.0)
SHEAR_LOSS = ProfileSpec("cosine", 0.25, 0.25)
UNIT = ProfileSpec("constant", 1.0)

ACCEPTANCE_LINES = {}
TIMINGS = {}   # wall-clock seconds of the shared expensive runs


def shear_model(n_y=33):
    return build_model(1.0, n_y, SHEAR_FLOW, ReactionSpec("linear", UNIT),
                       LossSpec("linear", SHEAR_LOSS))


@pytest.fixture(scope="session")
def const_model():
    return constant_model(1.0, 0.25)


@pytest.fixture(scope="session")
def ext_model():
    return constant_model(1.0, 1.5)


@pytest.fixture(scope="session")
def shear():
    return shear_model()


@pytest.fixture(scope="session")
def propagation_run(const_model):
    grid = CylinderGrid.for_model(const_model)
    s0 = make_initial_profile(grid, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0)
    start = time.perf_counter()
    res = run(s0, const_model, 25.0, 0.5, observer=lambda s: observe(s, const_model),
              keep_snapshots=True)
    TIMINGS["propagation"] = time.perf_counter() - start
    return s0, res


@pytest.fixture(scope="session")
def extinction_run(ext_model):
    # small data keep the run in the linear regime, where sup T ~ e^{-mu(0) t}
    grid = CylinderGrid.for_model(ext_model)
    s0 = make_initial_profile(grid, 0.5, 1.0, 0.01, 0.01, 1e-3, 0.01)
    start = time.perf_counter()
    res = run(s0, ext_model, 15.0, 0.5, observer=lambda s: observe(s, ext_model),
              keep_snapshots=True)
    TIMINGS["extinction"] = time.perf_counter() - start
    return s0, res


_FRONTS = {}


@pytest.fixture(scope="session")
def front_at():
    """front_at(a, dx=0.1): converged constant-case front at c = 2 (cached)."""
    model = constant_model(1.0, 0.25)

    def get(a, dx=0.1):
        key = (float(a), float(dx))
        if key not in _FRONTS:
            start = time.perf_counter()
            _FRONTS[key] = solve_front(model, 2.0, a, dx=dx)
            TIMINGS[("front",) + key] = time.perf_counter() - start
        return _FRONTS[key]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
