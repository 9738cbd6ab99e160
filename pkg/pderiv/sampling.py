"""
Random sampling module.
Seeded generators for expressions, words and substitution instances used by the property checks.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pderiv.syntax import (
    Expr, VarId, alt, cat, empty_set, empty_word, mu, star, sym, var,
)

DEFAULT_LETTERS = "ab"


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(seed)


class ExpressionSampler:
    """
    Draws random order-respecting expressions of an exact node count.

    Free variables get the smallest indices, binders are numbered in
    preorder after them, so sampled expressions are already canonical.
    """

    def __init__(self, rng: np.random.Generator, letters: str = DEFAULT_LETTERS,
                 free: Sequence[VarId] = (), first_index: Optional[int] = None):
        self.rng = rng
        self.letters = letters
        self.free = list(free)
        self.first_index = len(self.free) if first_index is None else first_index

    def sample(self, max_nodes: int, max_binders: int) -> Expr:
        size = int(self.rng.integers(1, max_nodes + 1))
        self.next_index = self.first_index
        self.binders_left = max_binders
        return self._build(size, list(self.free))

    def _choice(self, options: List[str]) -> str:
        return options[int(self.rng.integers(0, len(options)))]

    def _leaf(self, scope: List[VarId]) -> Expr:
        options = ["empty_set", "empty_word", "sym", "sym"]
        if scope:
            options += ["var", "var"]
        kind = self._choice(options)
        if kind == "empty_set":
            return empty_set()
        if kind == "empty_word":
            return empty_word()
        if kind == "sym":
            return sym(self._choice(list(self.letters)))
        return var(scope[int(self.rng.integers(0, len(scope)))])

    def _build(self, size: int, scope: List[VarId]) -> Expr:
        if size == 1:
            return self._leaf(scope)
        options = ["star"]
        if self.binders_left > 0:
            options += ["mu", "mu"]
        if size >= 3:
            options += ["alt", "cat", "cat"]
        kind = self._choice(options)
        if kind == "star":
            return star(self._build(size - 1, scope))
        if kind == "mu":
            self.binders_left -= 1
            binder = VarId(f"X{self.next_index}", self.next_index)
            self.next_index += 1
            return mu(binder, self._build(size - 1, scope + [binder]))
        left_size = int(self.rng.integers(1, size - 1))
        left = self._build(left_size, scope)
        right = self._build(size - 1 - left_size, scope)
        return alt(left, right) if kind == "alt" else cat(left, right)


def random_expression(rng: np.random.Generator, max_nodes: int = 12, max_binders: int = 2,
                      letters: str = DEFAULT_LETTERS, free: Sequence[VarId] = (),
                      first_index: Optional[int] = None) -> Expr:
    """One random expression with at most max_nodes nodes and max_binders binders."""
    return ExpressionSampler(rng, letters, free, first_index).sample(max_nodes, max_binders)


def random_word(rng: np.random.Generator, letters: str, max_len: int) -> str:
    length = int(rng.integers(0, max_len + 1))
    return "".join(letters[int(i)] for i in rng.integers(0, len(letters), size=length))


def substitution_instance(rng: np.random.Generator, max_nodes: int = 8, max_binders: int = 1,
                          letters: str = DEFAULT_LETTERS) -> Tuple[Expr, Dict[VarId, Expr]]:
    """
    A random expression over free variables U ≺ V and an order-closed substitution for them.

    U maps to mu U.s with only U free in s; V maps to mu V.s' with U and V
    possibly free in s'.
    """
    u = VarId("U", 0)
    v = VarId("V", 1)
    sigma = {
        u: mu(u, random_expression(rng, max_nodes, max_binders, letters, [u], 2)),
        v: mu(v, random_expression(rng, max_nodes, max_binders, letters, [u, v], 2)),
    }
    r = random_expression(rng, max_nodes, max_binders, letters, [u, v])
    return r, sigma
