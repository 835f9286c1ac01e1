"""A smoke benchmark: a loop that crosses the membrane on every iteration.

The calculus has no conditional, so the loop branches by looking up a
function under the boolean key ``n < N``.  Each iteration writes two
properties of the outside object and calls one of its methods through the
proxy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from decent.evaluator import DEFAULT_BUDGET, Interpreter
from decent.membrane import Sandbox
from decent.ni.checker import evaluate_setup
from decent.syntax import desugar, parse_source

SETUP = "let o = new null; o.count = 0; o.total = 0; o.step = fun x => x * 2; undefined"

LOOP = """
let k = new null;
k.go = fun (n) => k[n < {n}](n);
k[true] = fun (n) => (g.count = n; g.total = g.total + g.step(n); k.go(n + 1));
k[false] = fun (n) => g.total;
k.go(0)
"""


@dataclass(frozen=True)
class BenchResult:
    iterations: int
    log_effects: bool
    steps: int
    effects: int
    seconds: float
    result: object

    def describe(self):
        mode = "on" if self.log_effects else "off"
        return (f"iterations={self.iterations} logging={mode} steps={self.steps} "
                f"effects={self.effects} seconds={self.seconds:.3f}")


def run_bench(iterations=10_000, log_effects=True, budget=DEFAULT_BUDGET):
    interp = Interpreter(budget=budget, log_effects=log_effects)
    env = evaluate_setup(interp, SETUP)
    sandbox = Sandbox(interp, env.lookup("o"))
    expr = desugar(parse_source(LOOP.format(n=iterations)), sandbox_global=sandbox.binder)
    start = time.perf_counter()
    result = sandbox.evaluate(expr)
    seconds = time.perf_counter() - start
    return BenchResult(iterations, log_effects, interp.steps, len(sandbox.log), seconds, result)
