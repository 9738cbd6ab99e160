import pytest

from pderiv.derivative import EPSILON, pderiv
from pderiv.errors import CapExceededError, UnboundVariableError
from pderiv.ipd import FormTag, StackForm, classify, ipd, size_bound, stack_form
from pderiv.syntax import VarId, canonicalize, cat, empty_set, empty_word, parse, sym, var

ONE = empty_word()


def _expr(text: str):
    return canonicalize(parse(text))


def test_ipd_of_symbol() -> None:
    a = sym("a")
    assert ipd(a).elements == (cat(ONE, a), ONE)


def test_ipd_of_left_recursion(left_recursive) -> None:
    t = left_recursive
    a = sym("a")
    gamma = ipd(t)
    assert gamma.elements == (cat(ONE, t), ONE, cat(t, a), cat(ONE, a))
    assert gamma.alphabet == {"a"}
    assert gamma.index(cat(t, a)) == 2
    assert cat(ONE, a) in gamma
    assert a not in gamma


def test_ipd_of_empty_set() -> None:
    assert ipd(empty_set()).elements == (cat(ONE, empty_set()),)


def test_ipd_is_closed_under_derivatives(corpus_entries) -> None:
    for entry in corpus_entries:
        gamma = ipd(entry.expr)
        assert len(gamma) <= size_bound(entry.expr)
        for r in gamma:
            for alpha in sorted(gamma.alphabet) + [EPSILON]:
                for stack in pderiv(alpha, None, None, r):
                    assert all(e in gamma for e in stack), entry.text


def test_ipd_cap(left_recursive) -> None:
    with pytest.raises(CapExceededError):
        ipd(left_recursive, max_elements=2)


def test_ipd_requires_closed_expression() -> None:
    with pytest.raises(UnboundVariableError):
        ipd(var(VarId("X", 0)))


def test_size_bound() -> None:
    assert size_bound(sym("a")) == 2
    assert size_bound(_expr("mu X. X")) == 2 * 2 ** 2


def test_classify_bare_top(left_recursive) -> None:
    form = classify(left_recursive, ONE)
    assert form.tag == FormTag.TOP
    assert form.addresses == ()


def test_classify_rec_witness(left_recursive) -> None:
    t = left_recursive
    form = classify(t, cat(t, sym("a")))
    assert form.tag == FormTag.REC
    assert form.head is t
    assert form.head_address == ()
    assert form.addresses == ((1, 2, 2),)


def test_classify_top_witness(left_recursive) -> None:
    form = classify(left_recursive, cat(ONE, sym("a")))
    assert form.tag == FormTag.TOP
    assert form.addresses == ((1, 2, 2),)


def test_classify_unrelated_expression_is_other(left_recursive) -> None:
    assert classify(left_recursive, sym("b")).tag == FormTag.OTHER


def test_classify_star_derivative_needs_descendants_first_order() -> None:
    t = _expr("(ab)*")
    e = cat(cat(ONE, sym("b")), t)
    form = classify(t, e)
    assert form.tag == FormTag.TOP
    assert form.addresses == ((1, 2), ())
    assert classify(t, e, ancestors_first=True).tag == FormTag.OTHER


def test_every_ipd_element_has_a_form(corpus_entries) -> None:
    for entry in corpus_entries:
        for e in ipd(entry.expr):
            assert classify(entry.expr, e).tag != FormTag.OTHER, (entry.text, str(e))


def test_stack_forms(left_recursive) -> None:
    t = left_recursive
    ta = cat(t, sym("a"))
    assert stack_form(t, (ONE, ONE)) == StackForm.TOP_PLUS
    assert stack_form(t, (ta, ONE)) == StackForm.REC_TOP_STAR
    assert stack_form(t, (ta, ta)) == StackForm.OTHER
    assert stack_form(t, ()) == StackForm.OTHER


def test_derivative_stacks_have_expected_forms(corpus_entries) -> None:
    for entry in corpus_entries:
        t = entry.expr
        gamma = ipd(t)
        for e in gamma:
            for a in sorted(gamma.alphabet):
                for stack in pderiv(a, None, None, e):
                    assert stack_form(t, stack) == StackForm.TOP_PLUS
            for stack in pderiv(EPSILON, None, None, e):
                assert stack_form(t, stack) == StackForm.REC_TOP_STAR
