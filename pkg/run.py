"""
Command-line entrypoint.
Parses a mu-regular expression and runs one verb on it: nullability, derivatives,
IPD listing, PDA build and export, matching, tracing, enumeration, grammar
translation, or the corpus check.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from check_corpus import check_corpus
from oracle.grammar import format_grammar, mu_to_grammar
from oracle.language import enumerate_words, member
from pderiv import __version__
from pderiv.derivative import EPSILON, pderiv, show_stack, sorted_stacks
from pderiv.errors import MuRegexError
from pderiv.ipd import classify, ipd, size_bound
from pderiv.nullability import null
from pderiv.pda import Verdict, accepts, build_nfa, build_pda, to_dot, trace
from pderiv.syntax import Expr, canonicalize, free_vars, parse, show

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2

_WORD_LETTERS = set("abcdefghijklmnopqrstuvwxyz")


def load_expression(source: str) -> Expr:
    """
    Parse and canonicalize an expression given inline or as `@path`.

    Raises:
        ValueError: free variables remain after canonicalization
    """
    if source.startswith("@"):
        path = Path(source[1:])
        if not path.exists():
            raise FileNotFoundError(f"Expression file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            source = f.read()

    expr = canonicalize(parse(source))
    free = free_vars(expr)
    if free:
        names = ", ".join(sorted(v.name for v in free))
        raise ValueError(f"expression has free variables: {names}")
    return expr


def check_word(word: str) -> str:
    if not set(word) <= _WORD_LETTERS:
        raise ValueError(f"words are strings of lowercase letters, got {word!r}")
    return word


def _show_word(word: str) -> str:
    return word if word else "ε"


def cmd_null(args) -> int:
    print("true" if null(load_expression(args.expr)) else "false")
    return EXIT_OK


def cmd_deriv(args) -> int:
    t = load_expression(args.expr)
    alpha = EPSILON if args.eps else args.sym
    for stack in sorted_stacks(pderiv(alpha, None, None, t)):
        print(show_stack(stack))
    return EXIT_OK


def cmd_ipd(args) -> int:
    t = load_expression(args.expr)
    gamma = ipd(t)
    for e in gamma:
        print(f"{classify(t, e).tag.value:<5} {show(e)}")
    if args.stats:
        print(f"|IPD| = {len(gamma)}")
        print(f"bound = {size_bound(t)}")
    return EXIT_OK


def cmd_pda(args) -> int:
    t = load_expression(args.expr)
    p = build_pda(t)
    print(f"Γ ({len(p.gamma)} symbols, Z0 = {p.z0}):")
    for i, e in enumerate(p.gamma):
        print(f"  {i}: {show(e)}")
    print(f"δ ({len(p.transitions)} transitions):")
    for tr in p.transitions:
        push = ", ".join(str(k) for k in tr.push)
        print(f"  {tr.symbol or 'ε'} / {tr.pop} → [{push}]")
    if args.dot:
        dot = to_dot(p)
        if args.dot == "-":
            print(dot, end="")
        else:
            with open(args.dot, "w", encoding="utf-8") as f:
                f.write(dot)
            print(f"DOT written: {args.dot}")
    return EXIT_OK


def cmd_nfa(args) -> int:
    nfa = build_nfa(load_expression(args.expr))
    index = {q: i for i, q in enumerate(nfa.states)}
    print(f"states ({len(nfa.states)}):")
    for i, q in enumerate(nfa.states):
        marker = " (final)" if q in nfa.finals else ""
        print(f"  {i}: {show(q)}{marker}")
    print(f"transitions ({len(nfa.transitions)}):")
    for source, a, target in nfa.transitions:
        print(f"  {index[source]} --{a}--> {index[target]}")
    return EXIT_OK


def cmd_match(args) -> int:
    t = load_expression(args.expr)
    accepted = accepts(build_pda(t), check_word(args.word))
    print("accept" if accepted else "reject")
    return EXIT_OK if accepted else EXIT_REJECT


def cmd_trace(args) -> int:
    t = load_expression(args.expr)
    p = build_pda(t)
    result = trace(p, check_word(args.word), args.budget)
    for config in result.path:
        stack = show_stack(tuple(p.gamma[k] for k in config.stack)) if config.stack else "[]"
        print(f"{stack} ⊢ {_show_word(config.remaining)}")
    print(f"{result.verdict.value} ({result.explored} configurations explored)")
    if result.verdict == Verdict.ACCEPT:
        return EXIT_OK
    return EXIT_REJECT if result.verdict == Verdict.REJECT else EXIT_ERROR


def cmd_enum(args) -> int:
    words = enumerate_words(load_expression(args.expr), args.maxlen)
    for w in words.sorted():
        print(_show_word(w))
    return EXIT_OK


def cmd_to_cfg(args) -> int:
    print(format_grammar(mu_to_grammar(load_expression(args.expr))), end="")
    return EXIT_OK


def cmd_oracle_match(args) -> int:
    accepted = member(load_expression(args.expr), check_word(args.word))
    print("accept" if accepted else "reject")
    return EXIT_OK if accepted else EXIT_REJECT


def cmd_check(args) -> int:
    return check_corpus(args.corpus, args.maxlen, args.properties, args.jobs, args.grammar)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run.py",
        description="Partial derivatives of mu-regular expressions and their pushdown automata.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log diagnostics to stderr")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, handler, help_text: str, with_expr: bool = True):
        sub = verbs.add_parser(name, help=help_text)
        if with_expr:
            sub.add_argument("expr", help="expression text, or @path to read it from a file")
        sub.set_defaults(handler=handler)
        return sub

    verb("null", cmd_null, "print whether the expression is nullable")

    deriv = verb("deriv", cmd_deriv, "print the partial derivative stacks")
    which = deriv.add_mutually_exclusive_group(required=True)
    which.add_argument("--sym", help="derive by this symbol")
    which.add_argument("--eps", action="store_true", help="spontaneous derivative")

    ipd_verb = verb("ipd", cmd_ipd, "list IPD(t) with the form of each element")
    ipd_verb.add_argument("--stats", action="store_true", help="print |IPD| and its size bound")

    pda = verb("pda", cmd_pda, "build the pushdown automaton")
    pda.add_argument("--dot", metavar="FILE", help="write DOT output to FILE ('-' for stdout)")

    verb("nfa", cmd_nfa, "build the Antimirov NFA of a plain regular expression")

    for name, handler, help_text in (
        ("match", cmd_match, "decide membership with the automaton"),
        ("oracle-match", cmd_oracle_match, "decide membership with the grammar oracle"),
    ):
        sub = verb(name, handler, help_text)
        sub.add_argument("word", help='word to test ("" for the empty word)')

    trace_verb = verb("trace", cmd_trace, "print an accepting run found by bounded search")
    trace_verb.add_argument("word", help='word to test ("" for the empty word)')
    trace_verb.add_argument("--budget", type=int, default=1000, help="maximum run length")

    enum = verb("enum", cmd_enum, "list the words of the language up to a length")
    enum.add_argument("--maxlen", type=int, default=4)

    verb("to-cfg", cmd_to_cfg, "print the equivalent context-free grammar")

    check = verb("check", cmd_check, "run the differential battery over a corpus", with_expr=False)
    check.add_argument("corpus", help="corpus file, one expression per line")
    check.add_argument("--maxlen", type=int, default=None, help="exhaustive word length")
    check.add_argument("--properties", action="store_true", help="also run the random properties")
    check.add_argument("--jobs", type=int, default=1, help="worker threads")
    check.add_argument("--grammar", action="append", default=[], metavar="FILE",
                       help="grammar file with a '# expr:' line, compared with the automaton (repeatable)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entrypoint; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.verb == "deriv" and args.sym is not None:
            if len(args.sym) != 1 or args.sym not in _WORD_LETTERS:
                raise ValueError(f"--sym takes one lowercase letter, got {args.sym!r}")
        return args.handler(args)
    except (MuRegexError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
