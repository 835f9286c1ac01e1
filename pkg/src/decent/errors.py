"""Exception hierarchy shared by every layer of the interpreter."""

from __future__ import annotations


class DecentError(Exception):
    """Base class for all errors raised by this package."""


class LexError(DecentError):
    def __init__(self, position, message):
        self.position = position
        self.message = message
        line, col = position
        super().__init__(f"{line}:{col}: {message}")


class ParseError(DecentError):
    """Malformed token stream.

    ``at_eof`` is set when the input ended before the expression was complete;
    the REPL uses it to ask for a continuation line.
    """

    def __init__(self, position, expected, found="", at_eof=False):
        self.position = position
        self.expected = expected
        self.found = found
        self.at_eof = at_eof
        line, col = position
        detail = f"expected {expected}"
        if found:
            detail += f", found {found}"
        self.message = detail
        super().__init__(f"{line}:{col}: {detail}")


class DesugarError(DecentError):
    pass


class EvalError(DecentError):
    kind = "EvalError"

    def __init__(self, message, position=None):
        self.message = message
        self.position = position
        super().__init__(message)


class EvalTypeError(EvalError):
    kind = "TypeError"


class UnboundVariable(EvalError):
    kind = "UnboundVariable"

    def __init__(self, name, position=None):
        self.name = name
        super().__init__(f"unbound variable {name!r}", position)


class StepBudgetExceeded(EvalError):
    kind = "StepBudgetExceeded"

    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"step budget of {budget} rule applications exhausted")


class SandboxError(DecentError):
    pass


class StaleEffect(SandboxError):
    pass


class NotWrapped(SandboxError):
    pass


class NotConcluded(SandboxError):
    pass
