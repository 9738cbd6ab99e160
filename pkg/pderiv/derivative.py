"""
Derivative module.
Stack algebra, Antimirov derivatives for plain regular expressions, and
stack-valued derivatives for mu-regular expressions.
"""

import logging
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from pderiv.errors import FragmentError
from pderiv.nullability import null
from pderiv.syntax import (
    ALT, CAT, EMPTY_SET, EMPTY_WORD, MU, STAR, SYM, VAR,
    Expr, Subst, VarId, apply_subst, cat, empty_word, show,
)

logger = logging.getLogger(__name__)

# index 0 is the top of the stack, the last element its bottom
Stack = Tuple[Expr, ...]
DerivSet = FrozenSet[Stack]

EPSILON = ""


def stack_concat(stack: Stack, b: Expr) -> Stack:
    """Concatenate b onto the bottom element of a non-empty stack."""
    if not stack:
        raise ValueError("stack_concat needs a non-empty stack")
    return stack[:-1] + (cat(stack[-1], b),)


def set_concat(stacks: Iterable[Stack], b: Expr) -> DerivSet:
    return frozenset(stack_concat(s, b) for s in stacks)


def set_push(stacks: Iterable[Stack], below: Stack) -> DerivSet:
    """Place `below` under every stack of the set."""
    return frozenset(s + tuple(below) for s in stacks)


def sorted_stacks(stacks: Iterable[Stack]) -> List[Stack]:
    """Canonical order: shorter stacks first, then by interned ids top to bottom."""
    return sorted(stacks, key=lambda s: (len(s), tuple(e.uid for e in s)))


def show_stack(stack: Stack) -> str:
    return "[" + ", ".join(show(e) for e in stack) + "]"


def antimirov_deriv(a: str, r: Expr) -> FrozenSet[Expr]:
    """
    Antimirov partial derivative of a mu-free expression by the symbol a.

    Results are kept unsimplified, e.g. the derivative of a* by a is {1·a*}.

    Args:
        a: Alphabet symbol
        r: Expression without binders or variables

    Returns:
        Set of expressions whose union denotes the left quotient of r by a
    """
    kind = r.kind
    if kind in (EMPTY_SET, EMPTY_WORD):
        return frozenset()
    if kind == SYM:
        return frozenset([empty_word()]) if r.letter == a else frozenset()
    if kind == ALT:
        return antimirov_deriv(a, r.left) | antimirov_deriv(a, r.right)
    if kind == CAT:
        result = frozenset(cat(d, r.right) for d in antimirov_deriv(a, r.left))
        if null(r.left):
            result = result | antimirov_deriv(a, r.right)
        return result
    if kind == STAR:
        return frozenset(cat(d, r) for d in antimirov_deriv(a, r.body))
    raise FragmentError(f"antimirov_deriv is defined for plain regular expressions, got {show(r)}")


def antimirov_deriv_word(word: str, r: Expr) -> FrozenSet[Expr]:
    """Derivative by a word: the empty word gives {r}, longer words derive letter by letter."""
    current = frozenset([r])
    for a in word:
        current = frozenset(d for e in current for d in antimirov_deriv(a, e))
    return current


def pderiv(alpha: str, sigma: Optional[Subst], env: Optional[Mapping[VarId, bool]], r: Expr) -> DerivSet:
    """
    Partial derivative of r by a symbol or, for alpha == "", the spontaneous derivative.

    The substitution defers the unfolding of recursion variables: a variable
    is only replaced by its binder where that is safe (behind a symbol or in
    a concatenation tail), and a variable reached in head position yields a
    stack only for the spontaneous derivative. Deriving a binder pushes a
    fresh bottom frame holding 1.

    Args:
        alpha: Alphabet symbol, or "" for the spontaneous derivative
        sigma: Order-closed substitution covering the free variables of r
        env: Nullability of the free variables of r
        r: Order-respecting expression

    Returns:
        Set of non-empty stacks of closed expressions
    """
    sigma = dict(sigma or {})
    env = dict(env or {})
    if not sigma and not env:
        return _pderiv_closed(alpha, r)
    return _pderiv(alpha, sigma, env, r)


@lru_cache(maxsize=65536)
def _pderiv_closed(alpha: str, r: Expr) -> DerivSet:
    return _pderiv(alpha, {}, {}, r)


def _pderiv(alpha: str, sigma: Dict[VarId, Expr], env: Dict[VarId, bool], r: Expr) -> DerivSet:
    kind = r.kind
    if kind in (EMPTY_SET, EMPTY_WORD):
        return frozenset()
    if kind == SYM:
        if alpha and alpha == r.letter:
            return frozenset([(empty_word(),)])
        return frozenset()
    if kind == ALT:
        return _pderiv(alpha, sigma, env, r.left) | _pderiv(alpha, sigma, env, r.right)
    if kind == CAT:
        result = set_concat(_pderiv(alpha, sigma, env, r.left), apply_subst(sigma, r.right))
        if null(r.left, env):
            result = result | _pderiv(alpha, sigma, env, r.right)
        return result
    if kind == STAR:
        return set_concat(_pderiv(alpha, sigma, env, r.body), apply_subst(sigma, r))
    if kind == MU:
        x = r.var
        inner_sigma = {**sigma, x: r}
        inner_env = {**env, x: null(r.body, {**env, x: False})}
        return set_push(_pderiv(alpha, inner_sigma, inner_env, r.body), (empty_word(),))
    # variable
    if alpha == EPSILON:
        return frozenset([(apply_subst(sigma, r),)])
    return frozenset()


def closure(a: str, stack: Stack, eps_budget: int) -> Tuple[DerivSet, bool]:
    """
    Derivation closure of a stack by a, with a bounded number of spontaneous steps.

    Stacks reachable by at most eps_budget spontaneous steps on the top are
    explored breadth first; each contributes the a-derivative of its top.

    Args:
        a: Alphabet symbol
        stack: Non-empty stack of closed expressions
        eps_budget: Maximum number of spontaneous steps

    Returns:
        (stacks, exhausted) where exhausted is True iff unexplored spontaneous
        steps remained when the budget ran out
    """
    if not stack:
        raise ValueError("closure needs a non-empty stack")
    if eps_budget < 0:
        raise ValueError("eps_budget must be >= 0")

    stack = tuple(stack)
    result = set()
    visited = {stack}
    frontier = [stack]
    for level in range(eps_budget + 1):
        following = []
        for current in frontier:
            top, rest = current[0], current[1:]
            result.update(set_push(pderiv(a, None, None, top), rest))
            for spontaneous in sorted_stacks(pderiv(EPSILON, None, None, top)):
                successor = spontaneous + rest
                if successor not in visited:
                    visited.add(successor)
                    following.append(successor)
        if not following:
            return frozenset(result), False
        if level == eps_budget:
            logger.debug("closure budget %d reached with %d pending stacks", eps_budget, len(following))
            return frozenset(result), True
        frontier = following
    return frozenset(result), False
