from __future__ import annotations

from pathlib import Path

import pytest

from irrquiver.graph_core import attach_leg, complete_k_partite

DATA = Path(__file__).parent / "data"
SPECS = Path(__file__).parent.parent / "src" / "irrquiver" / "data"


@pytest.fixture
def triangle():
    return complete_k_partite([["1"], ["2"], ["3"]])


@pytest.fixture
def a2pp():
    """Triangle 2,3,4 with the foot 1 hanging from 2."""
    return attach_leg(complete_k_partite([["2"], ["3"], ["4"]]), "2", 1, ["1"])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(mod.RESULTS):
            terminalreporter.write_line(mod.RESULTS[n])
