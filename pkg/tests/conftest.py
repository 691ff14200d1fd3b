import sys

import numpy as np
import pytest
from hypothesis import settings

from gausscat.scalar import ScalarKind

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

KINDS = list(ScalarKind)


@pytest.fixture(params=KINDS, ids=[k.value for k in KINDS])
def kind(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
