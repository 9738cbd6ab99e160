"""
Iterated partial derivatives module.
Builds the finite set IPD(t) and classifies its elements into the top and rec normal forms.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from pderiv.config import limit
from pderiv.derivative import EPSILON, pderiv, sorted_stacks
from pderiv.errors import CapExceededError, UnboundVariableError
from pderiv.syntax import (
    CAT, MU, VAR, Address, Expr, apply_subst, address_map, cat, empty_word,
    free_vars, mu_subterms, node_count, show, strictly_before, symbols, unfolding_subst,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IpdSet:
    """
    Iterated partial derivatives of `origin`.

    `elements` are in first-discovery order, starting with 1·origin; that
    order is the pushdown alphabet order of the automaton.
    """
    origin: Expr
    elements: Tuple[Expr, ...]
    alphabet: FrozenSet[str]
    _positions: Dict[Expr, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._positions.update({e: i for i, e in enumerate(self.elements)})

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Expr]:
        return iter(self.elements)

    def __contains__(self, e: Expr) -> bool:
        return e in self._positions

    def index(self, e: Expr) -> int:
        return self._positions[e]


def require_closed(t: Expr, operation: str):
    free = free_vars(t)
    if free:
        name = min(free, key=lambda v: v.name).name
        raise UnboundVariableError(name, f"the closed expression given to {operation}")


def ipd(t: Expr, max_elements: Optional[int] = None) -> IpdSet:
    """
    Compute IPD(t) by worklist fixpoint.

    Starts from 1·t and adds every element of every stack of the symbol
    derivatives (over the symbols of t) and the spontaneous derivative of
    each member, until nothing new appears.

    Args:
        t: Closed canonical expression
        max_elements: Safety cap (default from the limits profile)

    Returns:
        IpdSet in discovery order
    """
    require_closed(t, "ipd")
    if max_elements is None:
        max_elements = limit("ipd", "max_elements", 100000)

    alphabet = symbols(t)
    derivers = sorted(alphabet) + [EPSILON]
    seed = cat(empty_word(), t)
    elements = [seed]
    seen = {seed}
    worklist = deque([seed])

    while worklist:
        r = worklist.popleft()
        for alpha in derivers:
            for stack in sorted_stacks(pderiv(alpha, None, None, r)):
                for e in stack:
                    if e in seen:
                        continue
                    seen.add(e)
                    elements.append(e)
                    worklist.append(e)
                    if len(elements) > max_elements:
                        raise CapExceededError(
                            f"IPD of {show(t)} exceeded {max_elements} elements; "
                            "the set is finite, so this indicates a bug"
                        )

    logger.debug("IPD of %s has %d elements", show(t), len(elements))
    return IpdSet(origin=t, elements=tuple(elements), alphabet=alphabet)


def size_bound(t: Expr) -> int:
    """Loose upper bound on |IPD(t)|: (mu-subterms + 1) * 2^(node count)."""
    return (len(mu_subterms(t)) + 1) * 2 ** node_count(t)


class FormTag(str, Enum):
    TOP = "top"
    REC = "rec"
    OTHER = "other"


class StackForm(str, Enum):
    TOP_PLUS = "top+"
    REC_TOP_STAR = "rec.top*"
    OTHER = "other"


@dataclass(frozen=True)
class Form:
    """
    Normal form of an expression with respect to t.

    For TOP the head is 1 and `head_address` is None; for REC the head is
    the mu-subterm of t at `head_address`. `addresses` is the t-sorted
    vector, as addresses of t.
    """
    tag: FormTag
    head: Optional[Expr] = None
    head_address: Optional[Address] = None
    addresses: Tuple[Address, ...] = ()


OTHER = Form(FormTag.OTHER)


class _FormIndex:
    """Closed images of all subterms of t under its unfolding substitution."""

    def __init__(self, t: Expr, ancestors_first: bool):
        self.ancestors_first = ancestors_first
        self.subterm_at = address_map(t)
        sigma = unfolding_subst(t)

        self.addresses_of: Dict[Expr, List[Address]] = {}
        for w, sub in self.subterm_at.items():
            image = apply_subst(sigma, sub)
            self.addresses_of.setdefault(image, []).append(w)
        for found in self.addresses_of.values():
            found.sort()

        self.occurrences: Dict = {}
        for w, sub in self.subterm_at.items():
            if sub.kind == VAR:
                self.occurrences.setdefault(sub.var, []).append(w)

        self.memo: Dict[Tuple[int, Optional[Address]], Optional[Form]] = {}

    def before(self, w1: Address, bound: Optional[Address]) -> bool:
        return bound is None or strictly_before(w1, bound, self.ancestors_first)

    def head(self, e: Expr, bound: Optional[Address]) -> Optional[Form]:
        if e is empty_word():
            return Form(FormTag.TOP, e, None, ())
        for m in self.addresses_of.get(e, ()):
            binder = self.subterm_at[m]
            if binder.kind != MU:
                continue
            witnesses = [m] + self.occurrences.get(binder.var, [])
            if bound is None or any(self.before(w, bound) for w in witnesses):
                return Form(FormTag.REC, binder, m, ())
        return None

    def decompose(self, e: Expr, bound: Optional[Address]) -> Optional[Form]:
        key = (e.uid, bound)
        if key in self.memo:
            return self.memo[key]

        found = self.head(e, bound)
        if found is None and e.kind == CAT:
            for w in self.addresses_of.get(e.right, ()):
                if not self.before(w, bound):
                    continue
                prefix = self.decompose(e.left, w)
                if prefix is not None:
                    found = Form(prefix.tag, prefix.head, prefix.head_address, prefix.addresses + (w,))
                    break

        self.memo[key] = found
        return found


@lru_cache(maxsize=256)
def _form_index(t: Expr, ancestors_first: bool) -> _FormIndex:
    return _FormIndex(t, ancestors_first)


def classify(t: Expr, e: Expr, ancestors_first: bool = False) -> Form:
    """
    Decompose e as the unfolding of h·s1·...·sk with h either 1 or a mu-subterm of t.

    The factors s_i are matched right to left against closed images of the
    subterms of t, with addresses strictly increasing. A rec head mu x.s also
    needs the binder itself or an occurrence of x strictly before the first
    factor. Addresses are compared descendants first unless ancestors_first
    is set.

    Args:
        t: Closed canonical expression
        e: Closed expression to classify
        ancestors_first: Compare addresses with the ancestors-first order

    Returns:
        Form with its witness, or the OTHER form
    """
    require_closed(t, "classify")
    index = _form_index(t, ancestors_first)
    found = index.decompose(e, None)
    return found if found is not None else OTHER


def stack_form(t: Expr, stack: Sequence[Expr], ancestors_first: bool = False) -> StackForm:
    """top+ if every element is top; rec.top* if the first is rec and the rest are top."""
    if not stack:
        return StackForm.OTHER
    tags = [classify(t, e, ancestors_first).tag for e in stack]
    if all(tag == FormTag.TOP for tag in tags):
        return StackForm.TOP_PLUS
    if tags[0] == FormTag.REC and all(tag == FormTag.TOP for tag in tags[1:]):
        return StackForm.REC_TOP_STAR
    return StackForm.OTHER
