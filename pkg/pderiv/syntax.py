"""
Expression syntax module.
Interned AST, parser and printer, variable ordering, substitutions and subterm addressing.
"""

import re
import threading
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from pderiv.errors import ExprSyntaxError, SubstitutionError

EMPTY_SET = "empty_set"
EMPTY_WORD = "empty_word"
SYM = "sym"
ALT = "alt"
CAT = "cat"
STAR = "star"
VAR = "var"
MU = "mu"

Address = Tuple[int, ...]


@dataclass(frozen=True)
class VarId:
    """
    Recursion variable.

    `name` is what the printer shows; `index` is the binder's preorder
    position assigned by canonicalize and defines the order of variables.
    """
    name: str
    index: Optional[int] = None

    def __str__(self):
        return self.name


Subst = Dict[VarId, "Expr"]


class Expr:
    """
    Interned mu-regular expression node.

    Nodes are created only through the constructor functions below, so two
    structurally equal expressions are the same object and identity is
    equality. `uid` is the creation order of the node.
    """

    __slots__ = ("kind", "children", "letter", "var", "uid", "_free")

    def __init__(self, kind: str, children: Tuple["Expr", ...], letter: Optional[str],
                 var: Optional[VarId], uid: int):
        self.kind = kind
        self.children = children
        self.letter = letter
        self.var = var
        self.uid = uid
        self._free = None

    @property
    def left(self) -> "Expr":
        return self.children[0]

    @property
    def right(self) -> "Expr":
        return self.children[1]

    @property
    def body(self) -> "Expr":
        return self.children[0]

    def __repr__(self):
        return f"Expr({show(self)!r})"

    def __str__(self):
        return show(self)


# Process-wide and never pruned: every node built, sampled ones included, lives until exit.
_TABLE: Dict[tuple, Expr] = {}
_TABLE_LOCK = threading.Lock()


def _intern(kind: str, children: Tuple[Expr, ...] = (), letter: Optional[str] = None,
            var: Optional[VarId] = None) -> Expr:
    key = (kind, letter, var, tuple(c.uid for c in children))
    node = _TABLE.get(key)
    if node is not None:
        return node
    with _TABLE_LOCK:
        node = _TABLE.get(key)
        if node is None:
            node = Expr(kind, children, letter, var, len(_TABLE))
            _TABLE[key] = node
        return node


def empty_set() -> Expr:
    return _intern(EMPTY_SET)


def empty_word() -> Expr:
    return _intern(EMPTY_WORD)


def sym(letter: str) -> Expr:
    if len(letter) != 1 or not ("a" <= letter <= "z"):
        raise ValueError(f"Alphabet symbols are single lowercase ASCII letters, got {letter!r}")
    return _intern(SYM, letter=letter)


def alt(left: Expr, right: Expr) -> Expr:
    return _intern(ALT, (left, right))


def cat(left: Expr, right: Expr) -> Expr:
    return _intern(CAT, (left, right))


def star(body: Expr) -> Expr:
    return _intern(STAR, (body,))


def var(v: VarId) -> Expr:
    return _intern(VAR, var=v)


def mu(v: VarId, body: Expr) -> Expr:
    return _intern(MU, (body,), var=v)


_MU_RE = re.compile(r"(?:mu|μ)\s+([A-Z][A-Z0-9_]*)\s*\.")
_MU_HEAD_RE = re.compile(r"(?:mu|μ)\s+([A-Z][A-Z0-9_]*)\s*")
_VAR_RE = re.compile(r"[A-Z][A-Z0-9_]*")
_PUNCT = {"+": "PLUS", "*": "STAR", "(": "LPAREN", ")": "RPAREN", "·": "DOT",
          "0": "ZERO", "1": "ONE"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _position(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        match = _MU_RE.match(text, pos)
        if match:
            tokens.append(_Token("MU", match.group(1), pos))
            pos = match.end()
            continue
        match = _MU_HEAD_RE.match(text, pos)
        if match:
            line, column = _position(text, match.end())
            raise ExprSyntaxError(f"expected '.' after 'mu {match.group(1)}'", line, column)
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, pos))
            pos += 1
            continue
        if "a" <= ch <= "z":
            tokens.append(_Token("SYM", ch, pos))
            pos += 1
            continue
        match = _VAR_RE.match(text, pos)
        if match:
            tokens.append(_Token("VAR", match.group(0), pos))
            pos = match.end()
            continue
        line, column = _position(text, pos)
        raise ExprSyntaxError(f"unexpected character {ch!r}", line, column)
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


_ATOM_START = {"ZERO", "ONE", "SYM", "VAR", "LPAREN"}


class _Parser:
    """Recursive descent over the token list; precedence * > · > +, mu lowest."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str, token: _Token):
        line, column = _position(self.text, token.offset)
        raise ExprSyntaxError(message, line, column)

    def parse(self) -> Expr:
        result = self.parse_alt()
        token = self.peek()
        if token.kind != "EOF":
            self.fail(f"unexpected {token.text!r}", token)
        return result

    def parse_alt(self) -> Expr:
        left = self.parse_cat()
        while self.peek().kind == "PLUS":
            self.advance()
            left = alt(left, self.parse_cat())
        return left

    def parse_cat(self) -> Expr:
        factors = []
        while True:
            token = self.peek()
            if token.kind == "MU":
                factors.append(self.parse_mu())
                break
            if token.kind not in _ATOM_START:
                break
            factors.append(self.parse_postfix())
            if self.peek().kind == "DOT":
                dot = self.advance()
                if self.peek().kind not in _ATOM_START | {"MU"}:
                    self.fail("expected an expression after '·'", dot)
        if not factors:
            token = self.peek()
            self.fail("expected an expression" if token.kind != "EOF" else "unexpected end of input",
                      token)
        result = factors[0]
        for factor in factors[1:]:
            result = cat(result, factor)
        return result

    def parse_mu(self) -> Expr:
        token = self.advance()
        return mu(VarId(token.text), self.parse_alt())

    def parse_postfix(self) -> Expr:
        result = self.parse_atom()
        while self.peek().kind == "STAR":
            self.advance()
            result = star(result)
        return result

    def parse_atom(self) -> Expr:
        token = self.advance()
        if token.kind == "ZERO":
            return empty_set()
        if token.kind == "ONE":
            return empty_word()
        if token.kind == "SYM":
            return sym(token.text)
        if token.kind == "VAR":
            return var(VarId(token.text))
        if token.kind == "LPAREN":
            inner = self.parse_alt()
            closing = self.peek()
            if closing.kind != "RPAREN":
                self.fail("expected ')'", closing)
            self.advance()
            return inner
        self.fail(f"unexpected {token.text or 'end of input'!r}", token)


def parse(text: str) -> Expr:
    """
    Parse the concrete syntax into an AST.

    Lowercase letters are symbols, uppercase identifiers are variables,
    `0` is the empty set, `1` the empty word, `+` union, juxtaposition or `·`
    concatenation, postfix `*` star and `mu X. r` binds to the end of its scope.

    Args:
        text: Expression text

    Returns:
        The (not yet canonicalized) expression
    """
    return _Parser(text).parse()


_PREC_ALT = 1
_PREC_CAT = 2
_PREC_STAR = 3


def show(e: Expr) -> str:
    """Print an expression in the concrete syntax accepted by parse."""
    return _show(e, 0)


def _needs_dot(left: str, right: str) -> bool:
    return left in ("0", "1") or right in ("0", "1") or left.endswith(")") or right.startswith("(")


def _show(e: Expr, ctx: int) -> str:
    kind = e.kind
    if kind == EMPTY_SET:
        return "0"
    if kind == EMPTY_WORD:
        return "1"
    if kind == SYM:
        return e.letter
    if kind == VAR:
        return e.var.name
    if kind == STAR:
        return _show(e.body, _PREC_STAR) + "*"
    if kind == CAT:
        left = _show(e.left, _PREC_CAT)
        right = _show(e.right, _PREC_CAT + 1)
        text = left + ("·" if _needs_dot(left, right) else " ") + right
        return f"({text})" if ctx > _PREC_CAT else text
    if kind == ALT:
        text = f"{_show(e.left, _PREC_ALT)} + {_show(e.right, _PREC_ALT + 1)}"
        return f"({text})" if ctx > _PREC_ALT else text
    text = f"mu {e.var.name}. {_show(e.body, 0)}"
    return f"({text})" if ctx > 0 else text


def free_vars(e: Expr) -> FrozenSet[VarId]:
    """Variables with no enclosing binder of the same id (cached per node)."""
    if e._free is not None:
        return e._free
    if e.kind == VAR:
        result = frozenset([e.var])
    elif e.kind == MU:
        result = free_vars(e.body) - {e.var}
    else:
        result = frozenset()
        for child in e.children:
            result = result | free_vars(child)
    e._free = result
    return result


def symbols(e: Expr) -> FrozenSet[str]:
    """The alphabet Σ(e): symbols occurring in e."""
    found = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node.kind == SYM:
            found.add(node.letter)
        stack.extend(node.children)
    return frozenset(found)


def node_count(e: Expr) -> int:
    return 1 + sum(node_count(child) for child in e.children)


def subterms(e: Expr) -> Iterable[Expr]:
    """Subterm occurrences in preorder."""
    yield e
    for child in e.children:
        yield from subterms(child)


def mu_subterms(e: Expr) -> List[Expr]:
    return [node for node in subterms(e) if node.kind == MU]


def contains_mu(e: Expr) -> bool:
    return any(node.kind in (MU, VAR) for node in subterms(e))


def _collect(e: Expr, bound: Tuple[str, ...], binders: List[str], free: set):
    if e.kind == VAR:
        if e.var.name not in bound:
            free.add(e.var.name)
        return
    if e.kind == MU:
        binders.append(e.var.name)
        _collect(e.body, bound + (e.var.name,), binders, free)
        return
    for child in e.children:
        _collect(child, bound, binders, free)


def _rebuild(e: Expr, scope: Dict[str, VarId], ids) -> Expr:
    kind = e.kind
    if kind == VAR:
        return var(scope[e.var.name])
    if kind == MU:
        vid = next(ids)
        return mu(vid, _rebuild(e.body, {**scope, e.var.name: vid}, ids))
    if kind == ALT:
        left = _rebuild(e.left, scope, ids)
        return alt(left, _rebuild(e.right, scope, ids))
    if kind == CAT:
        left = _rebuild(e.left, scope, ids)
        return cat(left, _rebuild(e.right, scope, ids))
    if kind == STAR:
        return star(_rebuild(e.body, scope, ids))
    return e


def canonicalize(e: Expr) -> Expr:
    """
    Alpha-rename binders to unique, preorder-indexed variables.

    Free variables are indexed first (sorted by name), binders follow in
    preorder, so every enclosing binder precedes the binders below it and
    the result is order-respecting. A binder keeps its name unless another
    binder or a free variable uses the same name.

    Args:
        e: Any expression

    Returns:
        The canonical expression
    """
    binders: List[str] = []
    free: set = set()
    _collect(e, (), binders, free)

    free_ids = {name: VarId(name, i) for i, name in enumerate(sorted(free))}
    counts = Counter(binders)
    taken = set(free) | set(binders)
    ids = []
    for position, name in enumerate(binders):
        index = len(free_ids) + position
        display = name
        if counts[name] > 1 or name in free:
            display = f"{name}{index}"
            while display in taken:
                display += "_"
            taken.add(display)
        ids.append(VarId(display, index))

    return _rebuild(e, dict(free_ids), iter(ids))


def _order_index(v: VarId) -> int:
    if v.index is None:
        raise SubstitutionError(f"variable {v.name} has no order index; canonicalize first")
    return v.index


def precedes(x: VarId, y: VarId) -> bool:
    """x ≺ y."""
    return _order_index(x) < _order_index(y)


def is_order_respecting(e: Expr) -> bool:
    for node in subterms(e):
        if node.kind == MU:
            if any(not precedes(y, node.var) for y in free_vars(node)):
                return False
    return True


def check_order_closed(sigma: Subst):
    """Raise SubstitutionError unless sigma is order-closed."""
    for x, image in sigma.items():
        if not is_order_respecting(image):
            raise SubstitutionError(f"image of {x.name} is not order-respecting: {show(image)}")
        for y in free_vars(image):
            if not precedes(y, x):
                raise SubstitutionError(f"{y.name} is free in the image of {x.name} but not before it")
            if y not in sigma:
                raise SubstitutionError(f"{y.name} is free in the image of {x.name} but unmapped")


def substitute(e: Expr, x: VarId, image: Expr) -> Expr:
    """Replace the free occurrences of x in e by image (no unfolding of image)."""
    if x not in free_vars(e):
        return e
    kind = e.kind
    if kind == VAR:
        return image
    if kind == MU:
        return mu(e.var, substitute(e.body, x, image))
    if kind == STAR:
        return star(substitute(e.body, x, image))
    left = substitute(e.left, x, image)
    right = substitute(e.right, x, image)
    return alt(left, right) if kind == ALT else cat(left, right)


@lru_cache(maxsize=65536)
def _apply_frozen(entries: Tuple[Tuple[VarId, Expr], ...], r: Expr) -> Expr:
    sigma = dict(entries)
    while True:
        free = free_vars(r)
        if not free:
            return r
        x = max(free, key=_order_index)
        if x not in sigma:
            raise SubstitutionError(f"free variable {x.name} is outside the substitution's domain")
        image = sigma[x]
        for y in free_vars(image):
            if not precedes(y, x):
                raise SubstitutionError(f"substitution is not order-closed: {y.name} in image of {x.name}")
        r = substitute(r, x, image)


def apply_subst(sigma: Subst, r: Expr) -> Expr:
    """
    Apply an order-closed substitution to an order-respecting expression.

    Substitutes a maximal free variable (the largest index) by its image and
    repeats until the expression is closed.

    Args:
        sigma: Order-closed substitution
        r: Order-respecting expression with free_vars(r) in the domain of sigma

    Returns:
        A closed expression
    """
    if not free_vars(r):
        return r
    entries = tuple(sorted(sigma.items(), key=lambda item: _order_index(item[0])))
    return _apply_frozen(entries, r)


def address_map(t: Expr) -> Dict[Address, Expr]:
    """
    Map every subterm occurrence of t to its address.

    The root is (); child i of a node at w is at w + (i,). Unary
    constructors use child 1. Entries are in preorder.
    """
    table: Dict[Address, Expr] = {}

    def walk(e: Expr, path: Address):
        table[path] = e
        for i, child in enumerate(e.children, start=1):
            walk(child, path + (i,))

    walk(t, ())
    return table


def occurs_before(w1: Address, w2: Address, ancestors_first: bool = True) -> bool:
    """
    Lexicographic order on addresses.

    With ancestors_first (the default) the rules are: ε ⊑ w; i < j gives
    iv ⊑ jw; v ⊑ w gives iv ⊑ iw. Otherwise the first rule is mirrored to
    w ⊑ ε, so a subterm comes after everything inside it.
    """
    for a, b in zip(w1, w2):
        if a != b:
            return a < b
    if ancestors_first:
        return len(w1) <= len(w2)
    return len(w1) >= len(w2)


def strictly_before(w1: Address, w2: Address, ancestors_first: bool = True) -> bool:
    return w1 != w2 and occurs_before(w1, w2, ancestors_first)


def unfolding_subst(t: Expr) -> Subst:
    """
    Map every binder x of t to its mu-subterm `mu x. r`.

    Args:
        t: Closed canonical expression (each variable bound exactly once)

    Returns:
        Order-closed substitution
    """
    sigma: Subst = {}
    for node in subterms(t):
        if node.kind == MU:
            if node.var in sigma:
                raise SubstitutionError(f"binder {node.var.name} occurs twice; canonicalize first")
            sigma[node.var] = node
    return sigma
