from functools import lru_cache

import pytest

from hrl import catalog
from hrl.region import Region
from hrl.zero_set import build_zero_set

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def unit_model(spec_id: str, resolution: int = 128):
    """Zero-set model of a catalog spec on the unit disc, shared across tests."""
    return build_zero_set(catalog.SPECS[spec_id], Region((0.0, 0.0), 1.0, resolution))


@pytest.fixture
def model():
    return unit_model


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
