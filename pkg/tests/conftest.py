import sys
from pathlib import Path

import pytest

from atomreach import TOTAL_ORDER, Theory
from atomreach.specfile import load

DEMOS = Path(__file__).resolve().parent.parent / "demos"
MONO_SPEC = DEMOS / "mono.spec"


@pytest.fixture(scope="session")
def mono_path():
    return str(MONO_SPEC)


@pytest.fixture(scope="session")
def mono_spec():
    return load(str(MONO_SPEC))


@pytest.fixture(scope="session")
def mono(mono_spec):
    return mono_spec.get_pds("Mono"), mono_spec.get_nfa("A")


@pytest.fixture(scope="session")
def to_theory():
    return Theory(TOTAL_ORDER)



def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
