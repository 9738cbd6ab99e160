import pytest

from oracle.language import member, words_upto
from pderiv.errors import FragmentError
from pderiv.pda import (
    Config, Transition, Verdict, accepts, accepts_bfs, build_nfa, build_pda, frame_cap,
    is_guarded, nfa_accepts, pda_to_grammar, step, to_dot, trace,
)
from pderiv.syntax import canonicalize, cat, empty_set, empty_word, parse, star, sym

ONE = empty_word()


def _expr(text: str):
    return canonicalize(parse(text))


def test_build_pda_of_symbol() -> None:
    p = build_pda(sym("a"))
    assert p.gamma == (cat(ONE, sym("a")), ONE)
    assert p.z0 == 0
    assert p.transitions == (Transition("a", 0, (1,)), Transition("", 1, ()))
    assert p.transitions[1].is_pop


def test_build_pda_of_left_recursion(left_recursive) -> None:
    t = left_recursive
    p = build_pda(t)
    assert len(p.gamma) == 4
    index = {e: i for i, e in enumerate(p.gamma)}
    one, ta, one_a = index[ONE], index[cat(t, sym("a"))], index[cat(ONE, sym("a"))]
    assert Transition("", p.z0, (ta, one), True) in p.transitions
    assert Transition("a", ta, (one, one_a)) in p.transitions
    assert Transition("", one, ()) in p.transitions


def test_build_pda_of_empty_set() -> None:
    p = build_pda(empty_set())
    assert p.gamma == (cat(ONE, empty_set()),)
    assert p.transitions == ()
    assert not accepts(p, "")


def test_step() -> None:
    p = build_pda(sym("a"))
    assert step(p, Config((0,), "a")) == {Config((1,), "")}
    assert step(p, Config((0,), "b")) == frozenset()
    assert step(p, Config((1,), "ab")) == {Config((), "ab")}
    assert step(p, Config((), "a")) == frozenset()


def test_accepts_bfs() -> None:
    p = build_pda(sym("a"))
    assert accepts_bfs(p, "a", 100) == Verdict.ACCEPT
    assert accepts_bfs(p, "b", 100) == Verdict.REJECT


def test_accepts_bfs_through_left_recursion(left_recursive) -> None:
    assert accepts_bfs(build_pda(left_recursive), "aa", 10000) == Verdict.ACCEPT


def test_accepts_bfs_left_recursion_rejection_is_unknown(left_recursive) -> None:
    p = build_pda(left_recursive)
    assert accepts_bfs(p, "b", 50) == Verdict.UNKNOWN


def test_trace_path_runs_from_start_to_acceptance(anbn) -> None:
    p = build_pda(anbn)
    result = trace(p, "ab", 100)
    assert result.verdict == Verdict.ACCEPT
    assert result.path[0] == Config((p.z0,), "ab")
    assert result.path[-1].accepting
    for before, after in zip(result.path, result.path[1:]):
        assert after in step(p, before)


def test_trace_budget_zero_is_unknown_for_nonempty_search() -> None:
    p = build_pda(sym("a"))
    assert trace(p, "a", 0).verdict == Verdict.UNKNOWN
    with pytest.raises(ValueError):
        trace(p, "a", -1)


def test_frame_cap() -> None:
    p = build_pda(sym("a"))
    assert frame_cap(p, "") == 16
    assert frame_cap(p, "aa") == 2 * 2 * 4 + 16


@pytest.mark.parametrize("text, word, expected", [
    ("mu X. 1 + a X b", "aabb", True),
    ("mu X. 1 + a X b", "abb", False),
    ("1", "", True),
    ("mu X. 1 + X a", "aaa", True),
    ("mu X. a + a X a + b X b + b", "abba", False),
    ("mu X. a + a X a + b X b + b", "abbba", True),
    ("mu X. X", "", False),
])
def test_accepts(text, word, expected) -> None:
    assert accepts(build_pda(_expr(text)), word) is expected


def test_accepts_agrees_with_oracle(corpus_entries) -> None:
    for entry in corpus_entries:
        p = build_pda(entry.expr)
        for w in words_upto(p.alphabet, 4):
            assert accepts(p, w) == member(entry.expr, w), (entry.text, w)


def test_pda_to_grammar_of_symbol() -> None:
    g = pda_to_grammar(build_pda(sym("a")))
    assert g.start == "N0"
    assert set(g.productions) == {("N0", ("a", "N1")), ("N1", ())}


def test_pda_to_grammar_of_empty_set() -> None:
    g = pda_to_grammar(build_pda(empty_set()))
    assert g.nonterminals == ("N0",)
    assert g.productions == ()


def test_is_guarded() -> None:
    assert is_guarded(_expr("a*"))
    assert is_guarded(_expr("mu X. 1 + a X"))
    assert is_guarded(_expr("mu X. 1 + a X b X"))
    assert not is_guarded(_expr("mu X. 1 + X a"))
    assert not is_guarded(_expr("mu X. X"))
    assert not is_guarded(_expr("mu X. 1 + (1 + a) X"))


def test_guarded_expressions_have_no_spontaneous_transitions(corpus_entries) -> None:
    for entry in corpus_entries:
        if is_guarded(entry.expr):
            assert not any(tr.spontaneous for tr in build_pda(entry.expr).transitions), entry.text


def test_build_nfa() -> None:
    a = sym("a")
    nfa = build_nfa(a)
    assert nfa.states == (a, ONE)
    assert nfa.finals == {ONE}
    assert nfa_accepts(nfa, "a")
    assert not nfa_accepts(nfa, "")
    assert not nfa_accepts(nfa, "aa")


def test_build_nfa_of_star() -> None:
    r = star(sym("a"))
    nfa = build_nfa(r)
    assert set(nfa.states) == {r, cat(ONE, r)}
    assert nfa.finals == set(nfa.states)
    assert all(nfa_accepts(nfa, "a" * n) for n in range(5))


def test_build_nfa_of_pairs() -> None:
    nfa = build_nfa(_expr("(ab)*"))
    for w in ("", "ab", "abab"):
        assert nfa_accepts(nfa, w)
    for w in ("a", "ba", "aba"):
        assert not nfa_accepts(nfa, w)


def test_build_nfa_rejects_binders(left_recursive) -> None:
    with pytest.raises(FragmentError):
        build_nfa(left_recursive)


def test_to_dot_of_empty_set() -> None:
    dot = to_dot(build_pda(empty_set()))
    assert "g0 [" in dot
    assert "->" not in dot


def test_to_dot_of_symbol() -> None:
    dot = to_dot(build_pda(sym("a")))
    assert dot.count("->") == 1
    assert "g0 -> g1" in dot
    assert "a / 0 → [1]" in dot
    assert "ε / pop" in dot
    assert "bold" in dot


def test_to_dot_is_deterministic(anbn) -> None:
    assert to_dot(build_pda(anbn)) == to_dot(build_pda(anbn))


def test_to_dot_dashes_spontaneous_edges(left_recursive) -> None:
    assert "dashed" in to_dot(build_pda(left_recursive))
