"""Command-line entry point: ``decent run | repl | ni | bench``.

Exit codes: 0 success, 1 runtime error, 2 lex/parse error,
3 noninterference violation found, 4 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from decent.bench import run_bench
from decent.errors import DecentError, DesugarError, EvalError, LexError, ParseError
from decent.evaluator import DEFAULT_BUDGET, Interpreter
from decent.ni.checker import FAIL, PASS, check_noninterference
from decent.ni.corpus import MUTATION_CORPUS
from decent.ni.generator import gen_triple
from decent.render import render_value
from decent.repl import Quit, Session
from decent.syntax import desugar, parse_source

EXIT_OK, EXIT_RUNTIME, EXIT_SYNTAX, EXIT_NI, EXIT_USAGE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def build_parser():
    parser = _Parser(prog="decent", description="Run, explore and check sandboxed programs.",
                     epilog=__doc__.split("\n\n", 1)[1].strip())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="evaluate a script and print its value")
    run.add_argument("file", type=Path)
    run.add_argument("--step-budget", type=_positive, default=DEFAULT_BUDGET)

    repl = sub.add_parser("repl", help="interactive session with sandbox meta-commands")
    repl.add_argument("file", nargs="?", type=Path, help="read the session from a file instead of stdin")
    repl.add_argument("--echo", action="store_true", help="echo each input line before its output")
    repl.add_argument("--step-budget", type=_positive, default=DEFAULT_BUDGET)

    ni = sub.add_parser("ni", help="run the noninterference suite")
    ni.add_argument("--seed", type=int, default=0, help="first generator seed (default 0)")
    ni.add_argument("--count", type=_positive, default=100, help="number of trials (default 100)")
    ni.add_argument("--size", type=_positive, default=30, help="generated program size (default 30)")
    ni.add_argument("--step-budget", type=_positive, default=DEFAULT_BUDGET)
    ni.add_argument("--no-membrane", action="store_true", help="disable wrapping (negative control)")
    ni.add_argument("--corpus", choices=["generated", "mutation"], default="generated",
                    help="random triples, or the hand-written mutation cases")

    bench = sub.add_parser("bench", help="time a membrane-crossing loop")
    bench.add_argument("--iterations", type=_positive, default=10_000)
    bench.add_argument("--step-budget", type=_positive, default=DEFAULT_BUDGET)
    return parser


def _diagnostic(path, err):
    pos = getattr(err, "position", None)
    where = f"{path}:{pos[0]}:{pos[1]}" if pos else str(path)
    kind = getattr(err, "kind", type(err).__name__)
    message = getattr(err, "message", str(err))
    return f"{where}: {kind}: {message}"


def cmd_run(args, out):
    try:
        source = args.file.read_text(encoding="utf-8")
    except OSError as err:
        print(f"decent: cannot read {args.file}: {err.strerror}", file=sys.stderr)
        return EXIT_USAGE
    interp = Interpreter(budget=args.step_budget)
    try:
        value = interp.run(desugar(parse_source(source)))
    except (LexError, ParseError) as err:
        print(_diagnostic(args.file, err), file=sys.stderr)
        return EXIT_SYNTAX
    except (EvalError, DesugarError) as err:
        print(_diagnostic(args.file, err), file=sys.stderr)
        return EXIT_RUNTIME
    print(render_value(interp.store, value), file=out)
    return EXIT_OK


def _session_status(session):
    if session.syntax_errors:
        return EXIT_SYNTAX
    if session.errors:
        return EXIT_RUNTIME
    if session.usage_errors:
        return EXIT_USAGE
    return EXIT_OK


def cmd_repl(args, out):
    session = Session(budget=args.step_budget)
    if args.file is not None:
        try:
            lines = args.file.read_text(encoding="utf-8").splitlines()
        except OSError as err:
            print(f"decent: cannot read {args.file}: {err.strerror}", file=sys.stderr)
            return EXIT_USAGE
        interactive = False
    else:
        interactive = sys.stdin.isatty()
        lines = sys.stdin
    try:
        for line in lines:
            line = line.rstrip("\n")
            if args.echo and line.strip():
                print(f"> {line}", file=out)
            for produced in session.feed(line):
                print(produced, file=out)
            if interactive:
                print("... " if session.pending else "decent> ", end="", file=out, flush=True)
        for produced in session.finish():
            print(produced, file=out)
    except Quit:
        pass
    return _session_status(session)


def _ni_trials(args):
    if args.corpus == "mutation":
        for case in MUTATION_CORPUS[: args.count]:
            yield case.name, case.check(membrane=not args.no_membrane)
        return
    for seed in range(args.seed, args.seed + args.count):
        setup, body, arg = gen_triple(seed, args.size)
        report = check_noninterference(setup, body, arg, args.step_budget, membrane=not args.no_membrane, seed=seed)
        yield f"seed {seed}", report


def cmd_ni(args, out):
    total = passed = errors = 0
    first = None
    for label, report in _ni_trials(args):
        total += 1
        if report.verdict == PASS:
            passed += 1
        elif report.verdict == FAIL:
            if first is None:
                first = (label, report)
        else:
            errors += 1
            print(f"{label}: harness error: {report.harness_error}", file=sys.stderr)
    print(f"{passed}/{total} pass", file=out)
    if first is not None:
        label, report = first
        print(f"first witness ({label}): {report.witness.describe()}", file=out)
        print(report.program_text, file=out)
        return EXIT_NI
    return EXIT_RUNTIME if errors else EXIT_OK


def cmd_bench(args, out):
    status = EXIT_OK
    for logging in (True, False):
        try:
            result = run_bench(args.iterations, log_effects=logging, budget=args.step_budget)
        except DecentError as err:
            print(f"bench: {err}", file=sys.stderr)
            status = EXIT_RUNTIME
            continue
        print(result.describe(), file=out)
    return status


COMMANDS = {"run": cmd_run, "repl": cmd_repl, "ni": cmd_ni, "bench": cmd_bench}


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args, out or sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
