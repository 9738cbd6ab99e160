"""
Grammar module.
Context-free grammars, their line format, and the structural translation of mu-regular expressions.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

from pderiv.errors import UnboundVariableError
from pderiv.syntax import (
    ALT, CAT, EMPTY_SET, EMPTY_WORD, MU, STAR, SYM, VAR, Expr, VarId, free_vars, symbols,
)

EPS_MARK = "%eps"
START_MARK = "# start:"


class Production(NamedTuple):
    head: str
    body: Tuple[str, ...]


@dataclass(frozen=True)
class Grammar:
    """
    Context-free grammar.

    Nonterminals are uppercase-initial names, terminals single lowercase
    letters. `nonterminals` keeps declaration order, start first.
    """
    nonterminals: Tuple[str, ...]
    terminals: FrozenSet[str]
    productions: Tuple[Production, ...]
    start: str

    def __post_init__(self):
        declared = set(self.nonterminals)
        if self.start not in declared:
            raise ValueError(f"start symbol {self.start} is not declared")
        for head, body in self.productions:
            if head not in declared:
                raise ValueError(f"production head {head} is not declared")
            for item in body:
                if item not in declared and item not in self.terminals:
                    raise ValueError(f"symbol {item!r} in a production of {head} is not declared")

    def is_nonterminal(self, item: str) -> bool:
        return item[:1].isupper()

    def rules_for(self, head: str) -> List[Tuple[str, ...]]:
        return [body for h, body in self.productions if h == head]


def format_grammar(g: Grammar) -> str:
    """One `N -> body` line per production, `%eps` for an empty body."""
    lines = [f"{START_MARK} {g.start}"]
    for head in g.nonterminals:
        for body in g.rules_for(head):
            lines.append(f"{head} -> {' '.join(body) if body else EPS_MARK}")
    return "\n".join(lines) + "\n"


def parse_grammar(text: str, start: Optional[str] = None) -> Grammar:
    """
    Read the line format written by format_grammar.

    `#` starts a comment; a `# start: N` comment names the start symbol,
    otherwise it is the head of the first production.
    """
    nonterminals: List[str] = []
    terminals = set()
    productions: List[Production] = []

    def declare(name: str):
        if name not in nonterminals:
            nonterminals.append(name)

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(START_MARK):
            start = start or line[len(START_MARK):].strip()
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ValueError(f"line {number}: expected 'N -> body', got {raw!r}")
        head, body_text = (part.strip() for part in line.split("->", 1))
        if not head[:1].isupper() or " " in head:
            raise ValueError(f"line {number}: production head must be one nonterminal, got {head!r}")
        declare(head)
        body = tuple(item for item in body_text.split() if item != EPS_MARK)
        for item in body:
            if item[:1].isupper():
                declare(item)
            else:
                terminals.add(item)
        productions.append(Production(head, body))

    if start is None:
        if not productions:
            raise ValueError("grammar has no productions and no start symbol")
        start = productions[0].head
    if start in nonterminals:
        nonterminals.remove(start)
    nonterminals.insert(0, start)
    return Grammar(tuple(nonterminals), frozenset(terminals), tuple(productions), start)


class _Translator:
    """Flattens expressions into lists of alternative bodies, allocating nonterminals on demand."""

    def __init__(self):
        self.nonterminals: List[str] = ["S"]
        self.productions: List[Production] = []
        self.binders: Dict[VarId, str] = {}
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        name = f"N{self.counter}"
        self.nonterminals.append(name)
        return name

    def define(self, head: str, alternatives: List[Tuple[str, ...]]):
        for body in alternatives:
            self.productions.append(Production(head, body))

    def single(self, alternatives: List[Tuple[str, ...]]) -> Tuple[str, ...]:
        if len(alternatives) == 1:
            return alternatives[0]
        name = self.fresh()
        self.define(name, alternatives)
        return (name,)

    def alternatives(self, e: Expr) -> List[Tuple[str, ...]]:
        kind = e.kind
        if kind == EMPTY_SET:
            return []
        if kind == EMPTY_WORD:
            return [()]
        if kind == SYM:
            return [(e.letter,)]
        if kind == ALT:
            merged = self.alternatives(e.left)
            for body in self.alternatives(e.right):
                if body not in merged:
                    merged.append(body)
            return merged
        if kind == CAT:
            left = self.alternatives(e.left)
            right = self.alternatives(e.right)
            if not left or not right:
                return []
            return [self.single(left) + self.single(right)]
        if kind == STAR:
            name = self.fresh()
            body = self.alternatives(e.body)
            self.define(name, [()])
            if body:
                self.define(name, [self.single(body) + (name,)])
            return [(name,)]
        if kind == MU:
            name = f"N_{e.var.name}"
            self.binders[e.var] = name
            self.nonterminals.append(name)
            self.define(name, self.alternatives(e.body))
            return [(name,)]
        if e.var not in self.binders:
            raise UnboundVariableError(e.var.name, "mu_to_grammar")
        return [(self.binders[e.var],)]


def mu_to_grammar(r: Expr) -> Grammar:
    """
    Translate a closed mu-regular expression into an equivalent grammar.

    Each binder becomes a nonterminal N_x shared with its variable, a star
    gets N -> ε | body N, alternatives become separate productions and
    concatenations are inlined where their operands have one alternative.

    Args:
        r: Closed canonical expression

    Returns:
        Grammar with start symbol S and L(grammar) = L(r)
    """
    free = free_vars(r)
    if free:
        raise UnboundVariableError(min(v.name for v in free), "mu_to_grammar")

    translator = _Translator()
    translator.define("S", translator.alternatives(r))
    # start productions first
    ordered = sorted(translator.productions, key=lambda p: p.head != "S")
    return Grammar(
        nonterminals=tuple(translator.nonterminals),
        terminals=symbols(r),
        productions=tuple(ordered),
        start="S",
    )
