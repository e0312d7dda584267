from __future__ import annotations

from pathlib import Path

import pytest

from skini import statements as st
from skini.dsl import parse_orchestration
from skini.machine import ReactiveMachine
from skini.score import load_score

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "skini" / "fixtures"

# filled by the @criterion decorator in test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line("  " + line)


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def machine_for(source: str, entry: str, **kwargs) -> ReactiveMachine:
    """Build a machine straight from DSL text (tests only)."""
    modules = parse_orchestration(source)
    program = st.elaborate(modules, entry)
    return ReactiveMachine(program, modules[entry].interface, **kwargs)


@pytest.fixture(scope="session")
def jazz_score():
    return load_score(fixture_path("jazz.json"))


@pytest.fixture(scope="session")
def chromatic_score():
    return load_score(fixture_path("chromatic.json"))


@pytest.fixture(scope="session")
def opus1_score():
    return load_score(fixture_path("opus1.json"))
