import numpy as np
import pytest

from bimodule_toeplitz import BUILTIN_MODELS, build_bimodule, build_ladder, builtin_models

MODEL_NAMES = sorted(BUILTIN_MODELS)
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ladders():
    out = {}
    for name in MODEL_NAMES:
        spec = builtin_models(name)
        out[name] = build_ladder(build_bimodule(spec), spec.window)
    return out


@pytest.fixture(params=MODEL_NAMES)
def ladder(request, ladders):
    return ladders[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
