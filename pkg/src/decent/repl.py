"""Interactive session: top-level bindings, named sandboxes and meta-commands.

Lines starting with ``:`` are meta-commands::

    :sbx new <name> [global=<ident>]      :sbx call <name> <expr> <expr>
    :sbx load <name> <path>               :effects <name> [reads|writes] [of <expr>]
    :commit <name> [<seq>]                :rollback <name> [<seq>]
    :revert <name> <expr>                 :changes <name>
    :diffs <name>                         :conflicts <name> <name>
    :rule <name> commiton|rollbackon <expr> <expr>
    :rule <name> commit <expr> <propname> :stats <name>
    :quit

Any other line is an expression.  ``ident = expr`` binds silently, and so
does a property write; everything else prints its value.
"""

from __future__ import annotations

import textwrap
from dataclasses import dataclass, field
from pathlib import Path

from decent import membrane
from decent.errors import DecentError, LexError, ParseError
from decent.evaluator import DEFAULT_BUDGET, Interpreter
from decent.heap import Environment, Loc, Plain
from decent.render import render_value
from decent.syntax import desugar, parse_prefix, tokenize
from decent.syntax.lexer import EOF, IDENT, PUNCT
from decent.syntax.nodes import DotPut, Put
from decent.syntax.parser import parse

USAGE = textwrap.dedent(__doc__.split("::", 1)[1].split("Any other line", 1)[0]).strip("\n")


class UsageError(Exception):
    pass


class Quit(Exception):
    pass


@dataclass
class Session:
    budget: int = DEFAULT_BUDGET
    interp: Interpreter = None
    env: Environment = field(default_factory=Environment)
    sandboxes: dict = field(default_factory=dict)
    errors: int = 0
    syntax_errors: int = 0
    usage_errors: int = 0

    def __post_init__(self):
        if self.interp is None:
            self.interp = Interpreter(budget=self.budget)
        self._pending = []

    @property
    def pending(self):
        """True while an incomplete expression waits for more lines."""
        return bool(self._pending)

    @property
    def store(self):
        return self.interp.store

    # -- line handling -----------------------------------------------------

    def feed(self, line):
        """Consume one input line; returns the output lines it produced.

        An expression that is still incomplete at the end of the line is
        kept and continued by the next one.
        """
        if self._pending:
            self._pending.append(line)
            text = "\n".join(self._pending)
        else:
            if line.lstrip().startswith(":"):
                return self._guard(lambda: self.meta(line.strip()))
            text = line
        try:
            tokens = tokenize(text)
        except LexError as err:
            self._pending = []
            return self._report(err)
        if tokens[0].kind == EOF:
            self._pending = []
            return []
        try:
            out = self.expression(tokens)
        except ParseError as err:
            if err.at_eof:
                self._pending = [text]
                return []
            self._pending = []
            return self._report(err)
        except DecentError as err:
            self._pending = []
            return self._report(err)
        self._pending = []
        return out

    def finish(self):
        """Flush an unfinished expression at end of input."""
        if not self._pending:
            return []
        text = "\n".join(self._pending)
        self._pending = []
        return self._guard(lambda: self.expression(tokenize(text)))

    def _guard(self, thunk):
        try:
            return thunk()
        except Quit:
            raise
        except UsageError as err:
            self.usage_errors += 1
            return [f"usage: {err}"]
        except DecentError as err:
            return self._report(err)

    def _report(self, err):
        if isinstance(err, (LexError, ParseError)):
            self.syntax_errors += 1
            return [f"syntax error: {err}"]
        self.errors += 1
        kind = getattr(err, "kind", type(err).__name__)
        where = ""
        pos = getattr(err, "position", None)
        if pos is not None:
            where = f" at {pos[0]}:{pos[1]}"
        return [f"error: {kind}{where}: {err}"]

    # -- expressions -------------------------------------------------------

    def evaluate(self, expr):
        core = desugar(expr, bound=self.env.names())
        return self.interp.run(core, self.env)

    def expression(self, tokens):
        name = None
        if len(tokens) > 2 and tokens[0].kind == IDENT and tokens[1].is_(PUNCT, "="):
            name = tokens[0].lexeme
            tokens = tokens[2:]
        expr = parse(tokens)
        value = self.evaluate(expr)
        if name is not None:
            self.env = self.env.extend(name, value)
            return []
        if isinstance(expr, (Put, DotPut)):
            return []
        return [self.show(value)]

    def show(self, value):
        return render_value(self.store, value)

    def _exprs(self, text, count):
        tokens = tokenize(text)
        out = []
        i = 0
        for _ in range(count):
            if tokens[i].kind == EOF:
                raise UsageError(f"expected {count} expression(s)")
            expr, i = parse_prefix(tokens, i)
            out.append(expr)
        if tokens[i].kind != EOF:
            raise UsageError(f"unexpected {tokens[i].lexeme!r}")
        return out

    def _values(self, text, count):
        return [self.evaluate(e) for e in self._exprs(text, count)]

    # -- meta-commands -----------------------------------------------------

    def sandbox(self, name):
        try:
            return self.sandboxes[name]
        except KeyError:
            raise UsageError(f"no sandbox named {name!r}") from None

    def meta(self, line):
        verb, _, rest = line[1:].partition(" ")
        rest = rest.strip()
        handler = getattr(self, "_cmd_" + verb, None)
        if handler is None:
            raise UsageError(f"unknown command :{verb}\n{USAGE}")
        return handler(rest)

    def _cmd_quit(self, rest):
        raise Quit()

    def _cmd_sbx(self, rest):
        action, _, rest = rest.partition(" ")
        name, _, rest = rest.strip().partition(" ")
        rest = rest.strip()
        if not name:
            raise UsageError(":sbx new|call|load <name> ...")
        if action == "new":
            if name in self.sandboxes:
                raise UsageError(f"sandbox {name!r} already exists")
            if rest:
                if not rest.startswith("global="):
                    raise UsageError(":sbx new <name> [global=<ident>]")
                global_value = self.env.lookup(rest[len("global="):].strip())
            else:
                global_value = self.store.alloc(Plain())
            sbx = membrane.Sandbox(self.interp, global_value)
            self.sandboxes[name] = sbx
            return [f"{name} = {sbx.name}"]
        sbx = self.sandbox(name)
        if action == "call":
            fn, arg = self._values(rest, 2)
            return [self.show(sbx.call(fn, arg))]
        if action == "load":
            if not rest:
                raise UsageError(":sbx load <name> <path>")
            return [self.show(sbx.load(Path(rest).read_text(encoding="utf-8")))]
        raise UsageError(":sbx new|call|load <name> ...")

    def _cmd_effects(self, rest):
        name, _, rest = rest.partition(" ")
        sbx = self.sandbox(name)
        words = rest.split(None, 1)
        kinds = None
        if words and words[0] in ("reads", "writes"):
            kinds = ("has", "get") if words[0] == "reads" else ("set",)
            words = words[1:]
        target = None
        if words:
            of, _, text = " ".join(words).partition(" ")
            if of != "of":
                raise UsageError(":effects <name> [reads|writes] [of <expr>]")
            (target,) = self._values(text, 1)
        records = sbx.effects_of(target, kinds) if target is not None else sbx.effects_of(None, kinds)
        if target is not None and not isinstance(target, Loc):
            records = []
        return [membrane.format_effect(e) for e in records] or ["no effects"]

    def _select(self, sbx, rest):
        if not rest:
            return None
        try:
            seq = int(rest)
        except ValueError:
            raise UsageError(f"expected an effect number, got {rest!r}") from None
        for e in sbx.log:
            if e.seq == seq:
                return e
        raise UsageError(f"{sbx.name} has no effect ({seq})")

    def _cmd_commit(self, rest):
        name, _, rest = rest.partition(" ")
        sbx = self.sandbox(name)
        done = sbx.commit(self._select(sbx, rest.strip()))
        return [f"committed {len(done)} propert{'y' if len(done) == 1 else 'ies'}"]

    def _cmd_rollback(self, rest):
        name, _, rest = rest.partition(" ")
        sbx = self.sandbox(name)
        done = sbx.rollback(self._select(sbx, rest.strip()))
        return [f"rolled back {len(done)} write{'' if len(done) == 1 else 's'}"]

    def _cmd_revert(self, rest):
        name, _, rest = rest.partition(" ")
        sbx = self.sandbox(name)
        (target,) = self._values(rest, 1)
        done = sbx.revert_of(target)
        return [f"reverted {len(done)} shadow{'' if len(done) == 1 else 's'}"]

    def _describe_changes(self, changes, label):
        lines = []
        for c in changes:
            lines.append(
                f"{label} obj#{c.target.index}.{c.prop}: "
                f"{render_value(self.store, c.inside, 1, top=False)} vs "
                f"{render_value(self.store, c.outside, 1, top=False)}"
            )
        return lines

    def _cmd_changes(self, rest):
        sbx = self.sandbox(rest)
        return self._describe_changes(sbx.changes_of(), "change") or ["no changes"]

    def _cmd_diffs(self, rest):
        sbx = self.sandbox(rest)
        return self._describe_changes(sbx.differences_of(), "difference") or ["no differences"]

    def _cmd_conflicts(self, rest):
        names = rest.split()
        if len(names) != 2:
            raise UsageError(":conflicts <name> <name>")
        a, b = (self.sandbox(n) for n in names)
        return [str(c) for c in a.conflicts_with(b)] or ["no conflicts"]

    def _cmd_rule(self, rest):
        name, _, rest = rest.partition(" ")
        sbx = self.sandbox(name)
        kind, _, rest = rest.strip().partition(" ")
        if kind in ("commiton", "rollbackon"):
            target, predicate = self._values(rest, 2)
            rule = membrane.Rule(membrane.COMMIT_ON if kind == "commiton" else membrane.ROLLBACK_ON,
                                 target, predicate)
        elif kind == "commit":
            text, _, prop = rest.strip().rpartition(" ")
            if not text or not prop:
                raise UsageError(":rule <name> commit <expr> <propname>")
            (target,) = self._values(text, 1)
            rule = membrane.Rule(membrane.COMMIT_PROP, target, prop=prop)
        else:
            raise UsageError(":rule <name> commiton|rollbackon <expr> <expr> | :rule <name> commit <expr> <prop>")
        try:
            acted = sbx.apply_rule(rule)
        except ValueError as err:
            raise UsageError(str(err)) from None
        return [f"rule installed; applied to {len(acted)} effect{'' if len(acted) == 1 else 's'}"]

    def _cmd_stats(self, rest):
        s = self.sandbox(rest).stats()
        return [
            f"objects={s.objects_wrapped} effects={s.effects_total} reads={s.distinct_reads} "
            f"writes={s.distinct_writes} calls={s.distinct_calls}"
        ]


def run_transcript(session, lines, echo=False):
    """Feed ``lines`` to ``session`` and collect everything printed."""
    out = []
    for line in lines:
        if echo and line.strip():
            out.append(f"> {line}")
        try:
            out.extend(session.feed(line))
        except Quit:
            return out
    out.extend(session.finish())
    return out
