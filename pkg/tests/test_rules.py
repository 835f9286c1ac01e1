from __future__ import annotations

import pytest

from rule_cases import CALCULUS_RULES, CASES, OUTWARD_RULES


@pytest.mark.parametrize("rule", CALCULUS_RULES + OUTWARD_RULES)
def test_rule(rule):
    CASES[rule]()


def test_every_rule_has_a_case():
    assert set(CASES) == set(CALCULUS_RULES) | set(OUTWARD_RULES)


def test_no_untested_rule_names_are_emitted():
    """Every rule name the evaluator can record is covered by a case."""
    import inspect
    import re

    from decent import evaluator

    emitted = set(re.findall(r'_tick\("([A-Za-z-]+)"\)', inspect.getsource(evaluator)))
    assert emitted <= set(CASES)
