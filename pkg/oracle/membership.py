"""
Membership rules module.
Proof search over the inductive membership judgement σ ⊢ w ∈ r, and its lifting to stacks and sets of stacks.
"""

import logging
from collections import deque
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pderiv.config import limit
from pderiv.errors import CapExceededError, UnboundVariableError
from pderiv.syntax import (
    ALT, CAT, EMPTY_WORD, MU, STAR, SYM, VAR, Expr, VarId,
)

logger = logging.getLogger(__name__)

SigmaKey = Tuple[Tuple[int, str, int], ...]
Judgement = Tuple[int, int, int, SigmaKey]


def _sigma_key(sigma: Mapping[VarId, Expr]) -> SigmaKey:
    return tuple(sorted((-1 if x.index is None else x.index, x.name, image.uid)
                        for x, image in sigma.items()))


class RuleProver:
    """
    Decides judgements σ ⊢ w[i:j] ∈ r for one word.

    Judgements reachable from a goal are discovered first, each with the
    premise lists of the rules that could conclude it. Proving then runs in
    rounds: round k adds exactly the judgements whose smallest proof has
    depth k, and stops when a round adds nothing. Left recursion through a
    binder and its variable therefore cannot loop.
    """

    def __init__(self, word: str):
        self.word = word
        self.nodes: Dict[int, Expr] = {}
        self.sigmas: Dict[SigmaKey, Dict[VarId, Expr]] = {}
        self.rules: Dict[Judgement, List[Tuple[Judgement, ...]]] = {}
        self.proven = set()

    def judgement(self, r: Expr, i: int, j: int, sigma: Mapping[VarId, Expr]) -> Judgement:
        key = _sigma_key(sigma)
        self.sigmas.setdefault(key, dict(sigma))
        self.nodes[r.uid] = r
        return (r.uid, i, j, key)

    def premises(self, goal: Judgement) -> List[Tuple[Judgement, ...]]:
        uid, i, j, key = goal
        r = self.nodes[uid]
        sigma = self.sigmas[key]
        kind = r.kind
        if kind == EMPTY_WORD:
            return [()] if i == j else []
        if kind == SYM:
            return [()] if j == i + 1 and self.word[i] == r.letter else []
        if kind == ALT:
            return [(self.judgement(r.left, i, j, sigma),), (self.judgement(r.right, i, j, sigma),)]
        if kind == CAT:
            return [(self.judgement(r.left, i, k, sigma), self.judgement(r.right, k, j, sigma))
                    for k in range(i, j + 1)]
        if kind == STAR:
            rules = [()] if i == j else []
            # a non-empty first piece suffices
            rules.extend((self.judgement(r.body, i, k, sigma), self.judgement(r, k, j, sigma))
                         for k in range(i + 1, j + 1))
            return rules
        if kind == MU:
            return [(self.judgement(r.body, i, j, {**sigma, r.var: r}),)]
        if kind == VAR:
            if r.var not in sigma:
                raise UnboundVariableError(r.var.name, "membership substitution")
            return [(self.judgement(sigma[r.var], i, j, sigma),)]
        return []

    def discover(self, goal: Judgement):
        queue = deque([goal])
        while queue:
            current = queue.popleft()
            if current in self.rules:
                continue
            self.rules[current] = self.premises(current)
            for rule in self.rules[current]:
                for premise in rule:
                    if premise not in self.rules:
                        queue.append(premise)

    def prove(self, r: Expr, i: int, j: int, sigma: Optional[Mapping[VarId, Expr]] = None) -> bool:
        goal = self.judgement(r, i, j, sigma or {})
        if goal in self.proven:
            return True
        self.discover(goal)

        rounds = 0
        while True:
            added = [
                current for current, rules in self.rules.items()
                if current not in self.proven
                and any(all(p in self.proven for p in rule) for rule in rules)
            ]
            if not added:
                break
            self.proven.update(added)
            rounds += 1
        logger.debug("membership proof search: %d judgements, %d rounds", len(self.rules), rounds)
        return goal in self.proven


def _check_length(word: str, max_len: Optional[int]):
    cap = max_len if max_len is not None else limit("oracle", "rules_max_len", 6)
    if len(word) > cap:
        raise CapExceededError(f"word of length {len(word)} exceeds the membership-rule cap of {cap}")


def check_membership_rules(r: Expr, word: str, sigma: Optional[Mapping[VarId, Expr]] = None,
                           max_len: Optional[int] = None) -> bool:
    """
    Decide σ ⊢ word ∈ r by proof search over the membership rules.

    A variable x is proven through σ(x) under the same σ; for σ(x) = mu x.s
    this is the variable rule, since σ[mu x.s / x] = σ.

    Args:
        r: Expression whose free variables are in the domain of sigma
        word: Word, no longer than the configured cap
        sigma: Order-closed substitution (default empty)
        max_len: Override of the length cap

    Returns:
        True iff the judgement is derivable
    """
    _check_length(word, max_len)
    return RuleProver(word).prove(r, 0, len(word), sigma)


def stack_member(stack: Sequence[Expr], word: str, max_len: Optional[int] = None) -> bool:
    """∅ ⊢ word ∈ [r1, ..., rn]: the word splits into consecutive pieces, piece k in rk."""
    _check_length(word, max_len)
    prover = RuleProver(word)
    reachable = {0}
    for r in stack:
        reachable = {j for i in reachable for j in range(i, len(word) + 1) if prover.prove(r, i, j)}
        if not reachable:
            return False
    return len(word) in reachable


def set_member(stacks: Iterable[Sequence[Expr]], word: str, max_len: Optional[int] = None) -> bool:
    """∅ ⊢ word ∈ R: some stack of R derives the word."""
    return any(stack_member(stack, word, max_len) for stack in stacks)
