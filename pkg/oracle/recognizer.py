"""
Chart recognizer module.
Earley recognition for arbitrary context-free grammars, including ε-productions and left recursion.
"""

from typing import Dict, FrozenSet, List, NamedTuple, Set, Tuple

from oracle.grammar import Grammar


class EarleyItem(NamedTuple):
    head: str
    body: Tuple[str, ...]
    dot: int
    origin: int

    def next_symbol(self):
        return self.body[self.dot] if self.dot < len(self.body) else None

    def advance(self) -> "EarleyItem":
        return EarleyItem(self.head, self.body, self.dot + 1, self.origin)


def nullable_nonterminals(g: Grammar) -> FrozenSet[str]:
    """Nonterminals deriving the empty word (iterated to a fixpoint)."""
    nullable: Set[str] = set()
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in nullable and all(item in nullable for item in body):
                nullable.add(head)
                changed = True
    return frozenset(nullable)


class EarleyRecognizer:
    """
    Earley recognizer for one grammar.

    Prediction of a nullable nonterminal also moves the dot over it, so
    completions of empty constituents are never missed.
    """

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.nullable = nullable_nonterminals(grammar)
        self.rules: Dict[str, List[Tuple[str, ...]]] = {name: [] for name in grammar.nonterminals}
        for head, body in grammar.productions:
            self.rules[head].append(body)

    def recognize(self, word: str) -> bool:
        n = len(word)
        chart: List[Set[EarleyItem]] = [set() for _ in range(n + 1)]
        start = self.grammar.start

        for i in range(n + 1):
            agenda: List[EarleyItem] = []

            def add(item: EarleyItem):
                if item not in chart[i]:
                    chart[i].add(item)
                    agenda.append(item)

            if i == 0:
                for body in self.rules[start]:
                    add(EarleyItem(start, body, 0, 0))
            else:
                for item in chart[i]:
                    agenda.append(item)

            while agenda:
                item = agenda.pop()
                symbol = item.next_symbol()
                if symbol is None:
                    self.complete(item, chart, add)
                elif symbol in self.rules:
                    self.predict(symbol, item, i, add)
                elif i < n and word[i] == symbol:
                    chart[i + 1].add(item.advance())

        return any(
            item.head == start and item.origin == 0 and item.next_symbol() is None
            for item in chart[n]
        )

    def predict(self, symbol: str, item: EarleyItem, i: int, add):
        for body in self.rules[symbol]:
            add(EarleyItem(symbol, body, 0, i))
        if symbol in self.nullable:
            add(item.advance())

    def complete(self, item: EarleyItem, chart: List[Set[EarleyItem]], add):
        for waiting in list(chart[item.origin]):
            if waiting.next_symbol() == item.head:
                add(waiting.advance())


def recognize(g: Grammar, word: str) -> bool:
    """
    Decide membership of a word in the language of g.

    Args:
        g: Any context-free grammar
        word: Word over the terminals (symbols outside them are rejected)

    Returns:
        True iff g derives the word
    """
    return EarleyRecognizer(g).recognize(word)
