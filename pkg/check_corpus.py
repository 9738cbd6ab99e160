"""
Corpus check entrypoint.
Runs the differential battery over a corpus of expressions: derivative automaton
against the grammar oracle, NFA against PDA on plain expressions, IPD finiteness
and normal forms, guardedness, and the membership-rule oracle.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from oracle.grammar import Grammar, parse_grammar
from oracle.language import bounded_language, enumerate_words, member, words_upto
from oracle.membership import check_membership_rules
from oracle.recognizer import EarleyRecognizer
from pderiv.config import limit
from pderiv.derivative import EPSILON, antimirov_deriv, pderiv, show_stack
from pderiv.errors import MuRegexError
from pderiv.ipd import FormTag, StackForm, classify, ipd, size_bound, stack_form
from pderiv.nullability import null, nullability_fixpoint
from pderiv.pda import Verdict, accepts, accepts_bfs, build_nfa, build_pda, is_guarded, nfa_accepts
from pderiv.sampling import make_rng, random_expression, random_word, substitution_instance
from pderiv.syntax import (
    Expr, VarId, apply_subst, canonicalize, contains_mu, free_vars, mu, parse, show, symbols,
)

logger = logging.getLogger(__name__)

EXPR_MARK = "# expr:"


@dataclass
class CorpusEntry:
    line: int
    text: str
    expr: Expr


@dataclass
class CheckResult:
    expr: str
    check: str
    ok: bool
    detail: str

    def render(self) -> str:
        mark = "✓" if self.ok else "✗"
        return f"  {mark} [{self.expr}] {self.check}: {self.detail}"


def load_corpus(corpus_path: str) -> List[CorpusEntry]:
    """
    Read a corpus file: one expression per line, `#` starts a comment.

    Returns:
        Canonical closed expressions with their line numbers
    """
    path = Path(corpus_path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")

    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                expr = canonicalize(parse(text))
            except MuRegexError as e:
                raise ValueError(f"{path}:{number}: {e}") from e
            free = free_vars(expr)
            if free:
                names = ", ".join(sorted(v.name for v in free))
                raise ValueError(f"{path}:{number}: free variable {names} in {text!r}")
            entries.append(CorpusEntry(number, text, expr))
    return entries


@dataclass
class GrammarFile:
    path: str
    text: str
    expr: Expr
    grammar: Grammar


def load_grammar_file(grammar_path: str) -> GrammarFile:
    """
    Read a grammar in the `N -> body` line format, paired with an expression.

    The expression is named by a `# expr: <expression>` comment line, so the
    output of `to-cfg` becomes a grammar file once that line is added.

    Raises:
        FileNotFoundError: grammar file is missing
        ValueError: no expression line, or a malformed grammar or expression
    """
    path = Path(grammar_path)
    if not path.exists():
        raise FileNotFoundError(f"Grammar file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        content = f.read()

    lines = [line.strip() for line in content.splitlines()]
    source = next((line[len(EXPR_MARK):].strip() for line in lines if line.startswith(EXPR_MARK)), None)
    if not source:
        raise ValueError(f"{path}: no '{EXPR_MARK} <expression>' line")
    try:
        expr = canonicalize(parse(source))
        grammar = parse_grammar(content)
    except (MuRegexError, ValueError) as e:
        raise ValueError(f"{path}: {e}") from e
    free = free_vars(expr)
    if free:
        names = ", ".join(sorted(v.name for v in free))
        raise ValueError(f"{path}: free variable {names} in {source!r}")
    bad = sorted(a for a in grammar.terminals if len(a) != 1 or not "a" <= a <= "z")
    if bad:
        raise ValueError(f"{path}: terminals are single lowercase letters, got {bad[0]!r}")
    return GrammarFile(str(path), source, expr, grammar)


def word_length_for(t: Expr, max_len: Optional[int]) -> int:
    """Exhaustive word length: explicit override, else by alphabet size."""
    if max_len is not None:
        return max_len
    letters = len(symbols(t))
    if letters <= 1:
        return limit("check", "max_len_one_letter", 8)
    if letters == 2:
        return limit("check", "max_len", 6)
    return limit("check", "max_len_many_letters", 8)


def _show_word(word: str) -> str:
    return repr(word) if word else "ε"


class EntryChecker:
    """All checks for one closed expression."""

    def __init__(self, entry: CorpusEntry, max_len: Optional[int]):
        self.entry = entry
        self.max_len = max_len
        self.t = entry.expr
        self.length = word_length_for(self.t, max_len)
        self.words = words_upto(symbols(self.t), self.length)
        self.results: List[CheckResult] = []

    def report(self, check: str, ok: bool, detail: str):
        self.results.append(CheckResult(self.entry.text, check, ok, detail))

    def run(self) -> List[CheckResult]:
        try:
            gamma = ipd(self.t)
        except MuRegexError as e:
            self.report("ipd", False, str(e))
            return self.results

        self.check_ipd(gamma)
        self.check_forms(gamma)
        self.check_nullability()
        pda = build_pda(self.t)
        self.check_pda_oracle(pda)
        self.check_bfs(pda)
        if not contains_mu(self.t):
            self.check_nfa(pda)
            self.check_expansion()
        if is_guarded(self.t):
            self.check_guarded(pda)
        self.check_rules_oracle()
        return self.results

    def check_ipd(self, gamma):
        bound = size_bound(self.t)
        missing = [
            e for r in gamma for alpha in sorted(gamma.alphabet) + [EPSILON]
            for stack in pderiv(alpha, None, None, r) for e in stack if e not in gamma
        ]
        ok = len(gamma) <= bound and not missing
        detail = f"{len(gamma)} elements, bound {bound}"
        if missing:
            detail += f"; not closed, missing {show(missing[0])}"
        self.report("ipd", ok, detail)

    def check_forms(self, gamma):
        for e in gamma:
            if classify(self.t, e).tag == FormTag.OTHER:
                self.report("forms", False, f"element {show(e)} has neither form top nor rec")
                return
            for a in sorted(gamma.alphabet):
                for stack in pderiv(a, None, None, e):
                    if stack_form(self.t, stack) != StackForm.TOP_PLUS:
                        self.report("forms", False, f"∂_{a}({show(e)}) stack {show_stack(stack)} is not top+")
                        return
            for stack in pderiv(EPSILON, None, None, e):
                if stack_form(self.t, stack) != StackForm.REC_TOP_STAR:
                    self.report("forms", False, f"∂_ε({show(e)}) stack {show_stack(stack)} is not rec.top*")
                    return
        self.report("forms", True, f"{len(gamma)} elements top or rec")

    def check_nullability(self):
        derived = null(self.t)
        oracle = member(self.t, "")
        detail = f"null={derived} oracle={oracle}"
        self.report("nullability", derived == oracle, detail)

    def check_pda_oracle(self, pda):
        for w in self.words:
            automaton = accepts(pda, w)
            oracle = member(self.t, w)
            if automaton != oracle:
                self.report("pda-oracle", False, f"word {_show_word(w)}: pda={automaton} oracle={oracle}")
                return
        self.report("pda-oracle", True, f"{len(self.words)} words up to length {self.length}")

    def check_bfs(self, pda):
        unknown = 0
        for w in self.words:
            budget = (len(w) + 1) * len(pda.gamma) * limit("bfs", "frames_per_symbol", 4)
            verdict = accepts_bfs(pda, w, budget)
            if verdict == Verdict.UNKNOWN:
                unknown += 1
                continue
            exact = accepts(pda, w)
            if (verdict == Verdict.ACCEPT) != exact:
                self.report("bfs-sound", False, f"word {_show_word(w)}: bfs={verdict.value} exact={exact}")
                return
        self.report("bfs-sound", True, f"no contradiction, {unknown} unknown")

    def check_nfa(self, pda):
        nfa = build_nfa(self.t)
        length = self.max_len if self.max_len is not None else limit("check", "nfa_max_len", 8)
        words = words_upto(symbols(self.t), length)
        for w in words:
            by_nfa = nfa_accepts(nfa, w)
            by_pda = accepts(pda, w)
            if by_nfa != by_pda:
                self.report("nfa-agree", False, f"word {_show_word(w)}: nfa={by_nfa} pda={by_pda}")
                return
        self.report("nfa-agree", True, f"{len(nfa.states)} states, {len(words)} words")

    def check_expansion(self):
        window = self.max_len if self.max_len is not None else limit("check", "expansion_max_len", 7)
        for n in range(window + 1):
            expected = {""} if null(self.t) else set()
            if n > 0:
                for a in sorted(symbols(self.t)):
                    for d in antimirov_deriv(a, self.t):
                        expected |= {a + w for w in enumerate_words(d, n - 1).words}
            actual = set(enumerate_words(self.t, n).words)
            if actual != expected:
                diff = sorted(actual ^ expected, key=lambda w: (len(w), w))[0]
                self.report("expansion", False,
                            f"length {n}, word {_show_word(diff)}: enumerate={diff in actual} "
                            f"derivatives={diff in expected}")
                return
        self.report("expansion", True, f"up to length {window}")

    def check_guarded(self, pda):
        spontaneous = [tr for tr in pda.transitions if tr.spontaneous]
        if spontaneous:
            self.report("guarded", False, f"{len(spontaneous)} spontaneous transitions")
            return
        for w in self.words:
            budget = (len(w) + 1) * len(pda.gamma) * limit("bfs", "frames_per_symbol", 4)
            if accepts_bfs(pda, w, budget) == Verdict.UNKNOWN:
                self.report("guarded", False, f"word {_show_word(w)}: bfs=unknown at budget {budget}")
                return
        self.report("guarded", True, "no spontaneous transitions, bfs decisive")

    def check_rules_oracle(self):
        cap = min(self.length, limit("check", "rules_max_len", 5))
        for w in self.words:
            if len(w) > cap:
                break
            by_rules = check_membership_rules(self.t, w, max_len=cap)
            oracle = member(self.t, w)
            if by_rules != oracle:
                self.report("rules-oracle", False, f"word {_show_word(w)}: rules={by_rules} oracle={oracle}")
                return
        self.report("rules-oracle", True, f"words up to length {cap}")


def check_grammar_file(gf: GrammarFile, max_len: Optional[int]) -> CheckResult:
    """Compare an imported grammar with the automaton of its expression, word by word."""
    length = word_length_for(gf.expr, max_len)
    pda = build_pda(gf.expr)
    recognizer = EarleyRecognizer(gf.grammar)
    words = words_upto(symbols(gf.expr) | gf.grammar.terminals, length)
    for w in words:
        by_grammar = recognizer.recognize(w)
        by_pda = accepts(pda, w)
        if by_grammar != by_pda:
            return CheckResult(gf.text, "grammar-file", False,
                               f"{gf.path}, word {_show_word(w)}: grammar={by_grammar} pda={by_pda}")
    return CheckResult(gf.text, "grammar-file", True,
                       f"{gf.path}: {len(words)} words up to length {length}")


def check_properties(seed: Optional[int] = None) -> List[CheckResult]:
    """
    Randomised properties: one-step nullability fixpoint and monotonicity,
    language monotonicity, and the substitution lemma of the membership rules.
    """
    if seed is None:
        seed = limit("properties", "seed", 2024)
    rng = make_rng(seed)
    count = limit("properties", "random_expressions", 500)
    max_nodes = limit("properties", "max_nodes", 12)
    max_binders = limit("properties", "max_binders", 2)
    x = VarId("U", 0)

    results = []
    fixpoint_failures = []
    monotone_failures = []
    for _ in range(count):
        r = random_expression(rng, max_nodes, max_binders, free=[x])
        b0 = null(r, {x: False})
        if null(r, {x: b0}) != b0 or nullability_fixpoint(r, {}, x) != null(mu(x, r)):
            fixpoint_failures.append(r)
        for low in (False, True):
            for high in (False, True):
                if low <= high and null(r, {x: low}) > null(r, {x: high}):
                    monotone_failures.append(r)
    results.append(_property_result("null-fixpoint", count, fixpoint_failures))
    results.append(_property_result("null-monotone", count, monotone_failures))

    language_failures = []
    samples = max(1, count // 5)
    for _ in range(samples):
        r = random_expression(rng, max_nodes, max_binders, free=[x])
        small = frozenset(random_word(rng, "ab", 3) for _ in range(2))
        large = small | frozenset(random_word(rng, "ab", 3) for _ in range(3))
        if not bounded_language(r, {x: small}, 4) <= bounded_language(r, {x: large}, 4):
            language_failures.append(r)
    results.append(_property_result("lang-monotone", samples, language_failures))

    wanted = limit("properties", "substitution_samples", 200)
    found = 0
    lemma_failures = []
    candidates = words_upto("ab", 3)
    for _ in range(wanted * 10):
        if found >= wanted:
            break
        r, sigma = substitution_instance(rng)
        start = int(rng.integers(0, len(candidates)))
        rotated = candidates[start:] + candidates[:start]
        word = next((w for w in rotated if check_membership_rules(r, w, sigma)), None)
        if word is None:
            continue
        found += 1
        if not check_membership_rules(apply_subst(sigma, r), word):
            lemma_failures.append(r)
    results.append(_property_result("subst-lemma", found, lemma_failures))
    return results


def _property_result(name: str, samples: int, failures: List[Expr]) -> CheckResult:
    if failures:
        return CheckResult("random", name, False,
                           f"{len(failures)} of {samples} samples fail, e.g. {show(failures[0])}")
    return CheckResult("random", name, True, f"{samples} samples")


def _check_entry(entry: CorpusEntry, max_len: Optional[int]) -> List[CheckResult]:
    return EntryChecker(entry, max_len).run()


def check_corpus(corpus_path: str, max_len: Optional[int] = None, properties: bool = False,
                 jobs: int = 1, grammars: Sequence[str] = ()) -> int:
    """
    Run the battery over a corpus and print the report.

    Args:
        corpus_path: Corpus file
        max_len: Exhaustive word length for every entry (default by alphabet size)
        properties: Also run the randomised property checks
        jobs: Worker threads for corpus entries (reported in corpus order)
        grammars: Grammar files to compare with the automaton of their expression

    Returns:
        Exit code: 0 if everything passed, 1 otherwise
    """
    print("=" * 60)
    print("CORPUS CHECK")
    print("=" * 60)
    print(f"Corpus: {corpus_path}")
    print()

    steps = 3 if properties else 2
    print(f"[1/{steps}] Loading corpus...")
    entries = load_corpus(corpus_path)
    print(f"  ✓ {len(entries)} expressions")
    grammar_files = [load_grammar_file(path) for path in grammars]
    if grammar_files:
        print(f"  ✓ {len(grammar_files)} grammar files")

    print(f"\n[2/{steps}] Checking expressions...")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        per_entry = list(pool.map(lambda entry: _check_entry(entry, max_len), entries))
        grammar_results = list(pool.map(lambda gf: check_grammar_file(gf, max_len), grammar_files))

    failed = 0
    for results in per_entry:
        for result in results:
            print(result.render())
        if not all(result.ok for result in results):
            failed += 1
    for result in grammar_results:
        print(result.render())
        if not result.ok:
            failed += 1

    property_results = []
    if properties:
        print(f"\n[3/{steps}] Random properties...")
        property_results = check_properties()
        for result in property_results:
            print(result.render())

    checks = [r for results in per_entry for r in results] + grammar_results + property_results
    sizes = np.array([len(results) for results in per_entry]) if per_entry else np.zeros(0)

    print("\n" + "=" * 60)
    print(f"{len(entries) + len(grammar_files)} checked, {failed} failed")
    print("=" * 60)
    print(f"  Checks run: {len(checks)}")
    print(f"  Checks per expression: {sizes.mean():.1f}" if sizes.size else "  Checks per expression: 0")
    property_failed = sum(1 for r in property_results if not r.ok)
    if properties:
        print(f"  Property failures: {property_failed}")

    return 0 if failed == 0 and property_failed == 0 else 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Differential checks over a corpus of mu-regular expressions.")
    parser.add_argument("corpus", nargs="?", default=str(Path(__file__).parent / "corpus" / "default.txt"))
    parser.add_argument("--maxlen", type=int, default=None)
    parser.add_argument("--properties", action="store_true")
    parser.add_argument("--grammar", action="append", default=[], metavar="FILE")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        return check_corpus(args.corpus, args.maxlen, args.properties, args.jobs, args.grammar)
    except (MuRegexError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
