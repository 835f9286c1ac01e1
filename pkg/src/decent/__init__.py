"""An interpreter for a small JavaScript-like core calculus with sandboxes.

Sandboxed code sees outside objects only through proxies that redirect
writes into shadow objects, and every crossing is logged so it can later be
committed, rolled back or checked for conflicts.
"""

from decent.evaluator import DEFAULT_BUDGET, Interpreter
from decent.membrane import Conflict, Rule, Sandbox
from decent.repl import Session, run_transcript
from decent.syntax import desugar, parse_source, pretty_print

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BUDGET", "Interpreter", "Conflict", "Rule", "Sandbox", "Session", "run_transcript",
    "desugar", "parse_source", "pretty_print", "run_source",
]


def run_source(source, budget=DEFAULT_BUDGET):
    """Parse, desugar and evaluate a whole program; returns ``(value, interpreter)``."""
    interp = Interpreter(budget=budget)
    return interp.run(desugar(parse_source(source))), interp
