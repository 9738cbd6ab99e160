"""
Pushdown automaton module.
Builds the single-state PDA over IPD(t), runs bounded searches over its configurations,
decides acceptance through an equivalent grammar, and builds the Antimirov NFA for plain expressions.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

import graphviz

from oracle.grammar import Grammar, Production
from oracle.recognizer import EarleyRecognizer
from pderiv.config import limit
from pderiv.derivative import EPSILON, antimirov_deriv, pderiv, sorted_stacks
from pderiv.errors import FragmentError
from pderiv.ipd import ipd
from pderiv.nullability import null
from pderiv.syntax import (
    CAT, MU, VAR, Expr, VarId, contains_mu, free_vars, show, symbols,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transition:
    """
    One transition of the single state.

    `symbol` is "" for ε. `push` lists Γ indices, first element on top.
    `spontaneous` marks transitions from the spontaneous derivative (as
    opposed to the ε-pops of nullable symbols).
    """
    symbol: str
    pop: int
    push: Tuple[int, ...]
    spontaneous: bool = False

    @property
    def is_pop(self) -> bool:
        return not self.symbol and not self.push and not self.spontaneous


@dataclass(frozen=True)
class Pda:
    """Single-state PDA accepting by empty stack; Γ in IPD discovery order."""
    gamma: Tuple[Expr, ...]
    transitions: Tuple[Transition, ...]
    z0: int
    alphabet: FrozenSet[str]
    _by_pop: Dict[int, List[Transition]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for i in range(len(self.gamma)):
            self._by_pop[i] = []
        for transition in self.transitions:
            self._by_pop[transition.pop].append(transition)

    def transitions_from(self, symbol_index: int) -> List[Transition]:
        return self._by_pop.get(symbol_index, [])


class Config(NamedTuple):
    """PDA configuration: stack of Γ indices (top first) and the unread input."""
    stack: Tuple[int, ...]
    remaining: str

    @property
    def accepting(self) -> bool:
        return not self.stack and not self.remaining


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNKNOWN = "unknown"


def build_pda(t: Expr) -> Pda:
    """
    Build the PDA of a closed canonical expression.

    Γ = IPD(t) and Z0 = 1·t. Each a-derivative stack of s gives a transition
    reading a, each spontaneous-derivative stack an ε-transition, and every
    nullable s an ε-transition popping it.

    Args:
        t: Closed canonical expression

    Returns:
        Pda
    """
    gamma_set = ipd(t)
    gamma = gamma_set.elements
    letters = sorted(gamma_set.alphabet)

    transitions: List[Transition] = []
    for i, s in enumerate(gamma):
        for a in letters:
            for stack in sorted_stacks(pderiv(a, None, None, s)):
                transitions.append(Transition(a, i, tuple(gamma_set.index(e) for e in stack)))
        for stack in sorted_stacks(pderiv(EPSILON, None, None, s)):
            transitions.append(Transition(EPSILON, i, tuple(gamma_set.index(e) for e in stack), True))
        if null(s):
            transitions.append(Transition(EPSILON, i, ()))

    logger.debug("PDA of %s: |Γ| = %d, %d transitions", show(t), len(gamma), len(transitions))
    return Pda(gamma=gamma, transitions=tuple(transitions), z0=gamma_set.index(gamma[0]),
               alphabet=gamma_set.alphabet)


def step(p: Pda, c: Config) -> FrozenSet[Config]:
    """All one-step successors of a configuration."""
    if not c.stack:
        return frozenset()
    top, rest = c.stack[0], c.stack[1:]
    successors = set()
    for transition in p.transitions_from(top):
        if not transition.symbol:
            successors.add(Config(transition.push + rest, c.remaining))
        elif c.remaining[:1] == transition.symbol:
            successors.add(Config(transition.push + rest, c.remaining[1:]))
    return frozenset(successors)


def _config_order(c: Config):
    return (len(c.stack), c.stack, len(c.remaining))


def frame_cap(p: Pda, word: str) -> int:
    per_symbol = limit("bfs", "frames_per_symbol", 4)
    slack = limit("bfs", "frame_slack", 16)
    return len(word) * len(p.gamma) * per_symbol + slack


@dataclass
class SearchResult:
    verdict: Verdict
    path: List[Config]
    explored: int


def trace(p: Pda, word: str, step_budget: int) -> SearchResult:
    """
    Breadth-first search of the configurations reachable from ([Z0], word).

    `step_budget` bounds the length of every explored run. Stacks taller than
    the frame cap are not explored; if any was cut off, a search that finds
    nothing reports UNKNOWN instead of REJECT.

    Args:
        p: Automaton
        word: Input word
        step_budget: Maximum number of steps along a run

    Returns:
        SearchResult with the accepting path (start to end) when accepted
    """
    if step_budget < 0:
        raise ValueError("step_budget must be >= 0")

    cap = frame_cap(p, word)
    start = Config((p.z0,), word)
    parents: Dict[Tuple[Tuple[int, ...], int], Optional[Config]] = {(start.stack, len(word)): None}
    frontier = [start]
    truncated = False

    def path_to(end: Config, before: Config) -> List[Config]:
        path = [end, before]
        current = parents[(before.stack, len(before.remaining))]
        while current is not None:
            path.append(current)
            current = parents[(current.stack, len(current.remaining))]
        return list(reversed(path))

    for _ in range(step_budget):
        if not frontier:
            break
        following = []
        for c in frontier:
            for successor in sorted(step(p, c), key=_config_order):
                if successor.accepting:
                    return SearchResult(Verdict.ACCEPT, path_to(successor, c), len(parents))
                if len(successor.stack) > cap:
                    truncated = True
                    continue
                key = (successor.stack, len(successor.remaining))
                if key not in parents:
                    parents[key] = c
                    following.append(successor)
        frontier = following

    if frontier or truncated:
        logger.debug("BFS on %r gave up after %d configurations", word, len(parents))
        return SearchResult(Verdict.UNKNOWN, [], len(parents))
    return SearchResult(Verdict.REJECT, [], len(parents))


def accepts_bfs(p: Pda, word: str, step_budget: int) -> Verdict:
    """Bounded search for an accepting run; UNKNOWN when the budget or frame cap interfered."""
    return trace(p, word, step_budget).verdict


def pda_to_grammar(p: Pda) -> Grammar:
    """
    Grammar with one nonterminal N<i> per Γ symbol.

    A transition popping s, reading α and pushing s1 ... sk gives
    N_s -> α N_s1 ... N_sk; a pop of a nullable s gives N_s -> ε.
    """
    names = tuple(f"N{i}" for i in range(len(p.gamma)))
    productions: List[Production] = []
    for transition in p.transitions:
        body = ((transition.symbol,) if transition.symbol else ()) + tuple(names[k] for k in transition.push)
        production = Production(names[transition.pop], body)
        if production not in productions:
            productions.append(production)
    start = names[p.z0]
    ordered = (start,) + tuple(n for n in names if n != start)
    return Grammar(ordered, p.alphabet, tuple(productions), start)


@lru_cache(maxsize=256)
def _grammar_recognizer(p: Pda) -> EarleyRecognizer:
    return EarleyRecognizer(pda_to_grammar(p))


def accepts(p: Pda, word: str) -> bool:
    """Exact acceptance, decided by Earley recognition on pda_to_grammar(p)."""
    return _grammar_recognizer(p).recognize(word)


def is_guarded(t: Expr) -> bool:
    """
    Whether every variable occurrence is guarded.

    An occurrence is guarded when, below its binder, it lies in the right
    operand of a concatenation whose left operand is not nullable. Guarded
    expressions have no spontaneous transitions.
    """
    def walk(e: Expr, env: Dict[VarId, bool], bound: FrozenSet[VarId], guarded: FrozenSet[VarId]) -> bool:
        if e.kind == VAR:
            return e.var in guarded
        if e.kind == MU:
            inner_env = {**env, e.var: null(e.body, {**env, e.var: False})}
            return walk(e.body, inner_env, bound | {e.var}, guarded - {e.var})
        if e.kind == CAT:
            if not walk(e.left, env, bound, guarded):
                return False
            right_guarded = guarded if null(e.left, env) else bound
            return walk(e.right, env, bound, right_guarded)
        return all(walk(child, env, bound, guarded) for child in e.children)

    free = {v: False for v in free_vars(t)}
    return walk(t, free, frozenset(free), frozenset())


@dataclass(frozen=True)
class Nfa:
    states: Tuple[Expr, ...]
    transitions: Tuple[Tuple[Expr, str, Expr], ...]
    start: Expr
    finals: FrozenSet[Expr]


def build_nfa(r: Expr) -> Nfa:
    """
    NFA whose states are the iterated Antimirov derivatives of r.

    Args:
        r: Closed expression without binders or variables

    Returns:
        Nfa with the nullable states final
    """
    if contains_mu(r):
        raise FragmentError(f"build_nfa needs a plain regular expression, got {show(r)}")

    letters = sorted(symbols(r))
    states = [r]
    seen = {r}
    transitions = []
    queue = deque([r])
    while queue:
        q = queue.popleft()
        for a in letters:
            for target in sorted(antimirov_deriv(a, q), key=lambda e: e.uid):
                transitions.append((q, a, target))
                if target not in seen:
                    seen.add(target)
                    states.append(target)
                    queue.append(target)

    finals = frozenset(q for q in states if null(q))
    return Nfa(tuple(states), tuple(transitions), r, finals)


def nfa_accepts(nfa: Nfa, word: str) -> bool:
    current = {nfa.start}
    for a in word:
        current = {target for source, letter, target in nfa.transitions
                   if source in current and letter == a}
        if not current:
            return False
    return bool(current & nfa.finals)


def to_dot(p: Pda) -> str:
    """
    DOT source of the automaton: one box per Γ symbol, Z0 in bold.

    Nullable symbols get a double border and an `ε / pop` label; every other
    transition is an edge to the new top labelled `α / pop → [push]`.
    """
    g = graphviz.Digraph("pda")
    g.attr(rankdir="LR")
    g.attr("node", shape="box", fontname="monospace")

    for i, e in enumerate(p.gamma):
        attrs = {}
        if i == p.z0:
            attrs["style"] = "bold"
        if any(tr.pop == i and tr.is_pop for tr in p.transitions):
            attrs["peripheries"] = "2"
            attrs["xlabel"] = "ε / pop"
        g.node(f"g{i}", label=f"{i}: {show(e)}", **attrs)

    for transition in p.transitions:
        if not transition.push:
            continue
        label = (f"{transition.symbol or 'ε'} / {transition.pop} → "
                 f"[{', '.join(str(k) for k in transition.push)}]")
        style = "dashed" if transition.spontaneous else "solid"
        g.edge(f"g{transition.pop}", f"g{transition.push[0]}", label=label, style=style)

    return g.source
