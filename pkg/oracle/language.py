"""
Language module.
Ground-truth membership through the grammar translation, and bounded enumeration from the language definition.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional

from oracle.grammar import mu_to_grammar
from oracle.recognizer import EarleyRecognizer
from pderiv.config import limit
from pderiv.errors import CapExceededError, UnboundVariableError
from pderiv.syntax import (
    ALT, CAT, EMPTY_SET, EMPTY_WORD, MU, STAR, SYM, Expr, VarId, free_vars,
)

LanguageEnv = Mapping[VarId, FrozenSet[str]]


@dataclass(frozen=True)
class WordSet:
    """Finite window L ∩ Σ^{≤max_len} of a language."""
    words: FrozenSet[str]
    max_len: int

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    def sorted(self) -> List[str]:
        return sorted(self.words, key=lambda w: (len(w), w))


@lru_cache(maxsize=1024)
def _recognizer(r: Expr) -> EarleyRecognizer:
    return EarleyRecognizer(mu_to_grammar(r))


def member(r: Expr, word: str) -> bool:
    """
    Decide w ∈ L(r) for a closed expression.

    Computed as Earley recognition on mu_to_grammar(r); no derivatives involved.
    """
    return _recognizer(r).recognize(word)


def _concat(left: FrozenSet[str], right: FrozenSet[str], max_len: int) -> FrozenSet[str]:
    by_length: Dict[int, List[str]] = {}
    for v in right:
        by_length.setdefault(len(v), []).append(v)
    result = set()
    for u in left:
        for length in range(max_len - len(u) + 1):
            for v in by_length.get(length, ()):
                result.add(u + v)
    return frozenset(result)


def bounded_language(r: Expr, env: Optional[LanguageEnv], max_len: int) -> FrozenSet[str]:
    """
    Words of length at most max_len in Lang(r, env).

    Binders and stars are least fixed points, computed by Kleene iteration;
    truncation to max_len keeps every iterate finite.

    Args:
        r: Expression whose free variables are covered by env
        env: Variable -> set of words
        max_len: Length bound

    Returns:
        Lang(r, env) ∩ Σ^{≤max_len}
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    return _bounded(r, dict(env or {}), max_len)


def _bounded(r: Expr, env: Dict[VarId, FrozenSet[str]], max_len: int) -> FrozenSet[str]:
    kind = r.kind
    if kind == EMPTY_SET:
        return frozenset()
    if kind == EMPTY_WORD:
        return frozenset([""])
    if kind == SYM:
        return frozenset([r.letter]) if max_len >= 1 else frozenset()
    if kind == ALT:
        return _bounded(r.left, env, max_len) | _bounded(r.right, env, max_len)
    if kind == CAT:
        left = _bounded(r.left, env, max_len)
        if not left:
            return frozenset()
        return _concat(left, _bounded(r.right, env, max_len), max_len)
    if kind == STAR:
        body = _bounded(r.body, env, max_len) - {""}
        current = frozenset([""])
        while True:
            following = current | _concat(body, current, max_len)
            if following == current:
                return current
            current = following
    if kind == MU:
        current = frozenset()
        while True:
            following = _bounded(r.body, {**env, r.var: current}, max_len)
            if following == current:
                return current
            current = following
    if r.var not in env:
        raise UnboundVariableError(r.var.name, "language environment")
    return frozenset(w for w in env[r.var] if len(w) <= max_len)


def enumerate_words(r: Expr, max_len: int) -> WordSet:
    """
    Exactly L(r) ∩ Σ(r)^{≤max_len}.

    Args:
        r: Closed expression
        max_len: Length bound, at most the configured cap

    Returns:
        WordSet for the window
    """
    cap = limit("oracle", "enumerate_max_len", 10)
    if max_len > cap:
        raise CapExceededError(f"enumeration length {max_len} exceeds the cap of {cap}")
    free = free_vars(r)
    if free:
        raise UnboundVariableError(min(v.name for v in free), "enumerate")
    return WordSet(bounded_language(r, None, max_len), max_len)


def words_upto(alphabet: Iterable[str], max_len: int) -> List[str]:
    """All words over the alphabet up to max_len, shortest first, then lexicographic."""
    letters = sorted(set(alphabet))
    words = [""]
    for length in range(1, max_len + 1):
        words.extend("".join(p) for p in product(letters, repeat=length))
    return words
