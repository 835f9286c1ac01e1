from __future__ import annotations

import pytest

from decent.evaluator import Interpreter
from decent.heap import Environment
from decent.ni.checker import evaluate_setup
from decent.syntax import desugar, parse_source

# acceptance results, filled in by test_acceptance.py and printed at the end
ACCEPTANCE_LINES = []


def evaluate(src, interp=None, env=None):
    interp = interp or Interpreter()
    env = env or Environment()
    return interp.run(desugar(parse_source(src), bound=env.names()), env)


@pytest.fixture
def interp():
    return Interpreter()


@pytest.fixture
def world():
    """An interpreter plus a small outside object graph."""
    it = Interpreter()
    env = evaluate_setup(
        it,
        "let o = new null; o.v = 0; let inner = new null; inner.n = 5; o.child = inner; "
        "o.inc = fun x => x + 1; undefined",
    )
    return it, env


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
