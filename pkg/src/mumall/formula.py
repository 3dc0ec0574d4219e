"""Formulas of muMALL: syntax, negation, substitution, Fischer-Ladner closure
and the priority/parity ranking used to classify threads.

Formulas are immutable trees.  Equality and hashing are modulo
alpha-equivalence: two formulas are equal when their de Bruijn keys agree,
so bound names never need freshening.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import networkx as nx

__all__ = [
    "Formula", "Var", "One", "Bot", "Zero", "Top", "Tensor", "Par", "Plus",
    "With", "Mu", "Nu", "ONE", "BOT", "ZERO", "TOP",
    "negate", "substitute", "unfold", "successors", "free_vars", "size",
    "is_fixpoint", "subformula_keys", "contains",
    "FlClosure", "fl_closure", "parse_formula", "render_formula",
    "FormulaSyntaxError", "FreeVariableError",
]


class Formula:
    """Base class.  Subclasses are frozen dataclasses with ``eq=False``."""

    __slots__ = ()

    @cached_property
    def key(self) -> tuple:
        return _key(self, ())

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return render_formula(self)

    def __repr__(self):
        return f"<{render_formula(self)}>"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Formula):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class _Unit(Formula):
    pass


class One(_Unit):
    pass


class Bot(_Unit):
    pass


class Zero(_Unit):
    pass


class Top(_Unit):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula


class Tensor(_Binary):
    pass


class Par(_Binary):
    pass


class Plus(_Binary):
    pass


class With(_Binary):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class _Fix(Formula):
    var: str
    body: Formula


class Mu(_Fix):
    pass


class Nu(_Fix):
    pass


ONE, BOT, ZERO, TOP = One(), Bot(), Zero(), Top()

_DUAL_CLASS = {
    One: Bot, Bot: One, Zero: Top, Top: Zero,
    Tensor: Par, Par: Tensor, Plus: With, With: Plus, Mu: Nu, Nu: Mu,
}
_UNITS = {One: ONE, Bot: BOT, Zero: ZERO, Top: TOP}
_TAG = {One: "1", Bot: "bot", Zero: "0", Top: "top", Tensor: "*", Par: "@",
        Plus: "+", With: "&", Mu: "mu", Nu: "nu"}


def _key(phi: Formula, env: tuple) -> tuple:
    # de Bruijn: bound variables become their binder distance
    if isinstance(phi, Var):
        for i, name in enumerate(env):
            if name == phi.name:
                return ("#", i)
        return ("v", phi.name)
    if isinstance(phi, _Unit):
        return (_TAG[type(phi)],)
    if isinstance(phi, _Binary):
        return (_TAG[type(phi)], _key(phi.left, env), _key(phi.right, env))
    return (_TAG[type(phi)], _key(phi.body, (phi.var,) + env))


def is_fixpoint(phi: Formula) -> bool:
    return isinstance(phi, _Fix)


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Var):
        return frozenset({phi.name})
    if isinstance(phi, _Unit):
        return frozenset()
    if isinstance(phi, _Binary):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


def size(phi: Formula) -> int:
    if isinstance(phi, _Binary):
        return 1 + size(phi.left) + size(phi.right)
    if isinstance(phi, _Fix):
        return 1 + size(phi.body)
    return 1


def negate(phi: Formula) -> Formula:
    """Involutive dual.  Variables are self-dual."""
    if isinstance(phi, Var):
        return phi
    cls = _DUAL_CLASS[type(phi)]
    if isinstance(phi, _Unit):
        return _UNITS[cls]
    if isinstance(phi, _Binary):
        return cls(negate(phi.left), negate(phi.right))
    return cls(phi.var, negate(phi.body))


def substitute(phi: Formula, name: str, psi: Formula) -> Formula:
    """``phi[psi/name]``.  ``psi`` is closed, so no capture can occur."""
    if isinstance(phi, Var):
        return psi if phi.name == name else phi
    if isinstance(phi, _Unit):
        return phi
    if isinstance(phi, _Binary):
        left = substitute(phi.left, name, psi)
        right = substitute(phi.right, name, psi)
        if left is phi.left and right is phi.right:
            return phi
        return type(phi)(left, right)
    if phi.var == name:
        return phi
    body = substitute(phi.body, name, psi)
    return phi if body is phi.body else type(phi)(phi.var, body)


def unfold(kind: str, phi: Formula) -> Formula:
    """One fixed-point unfolding of ``phi`` = ``kind X. body``."""
    expected = {"mu": Mu, "nu": Nu}[kind]
    if not isinstance(phi, expected):
        raise ValueError(f"expected a {kind} formula, got {render_formula(phi)}")
    return substitute(phi.body, phi.var, phi)


def successors(phi: Formula) -> list[Formula]:
    """Immediate Fischer-Ladner successors of a closed formula."""
    if isinstance(phi, _Binary):
        return [phi.left, phi.right]
    if isinstance(phi, Mu):
        return [unfold("mu", phi)]
    if isinstance(phi, Nu):
        return [unfold("nu", phi)]
    return []


def subformula_keys(phi: Formula) -> set[tuple]:
    """Keys of all closed subformulas of ``phi`` (itself included)."""
    out: set[tuple] = set()

    def walk(f):
        if not free_vars(f):
            out.add(f.key)
        if isinstance(f, _Binary):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, _Fix):
            walk(f.body)

    walk(phi)
    return out


def contains(phi: Formula, psi: Formula) -> bool:
    """True if closed ``psi`` occurs as a subformula of ``phi``."""
    return psi.key in subformula_keys(phi)


def _canon(phi: Formula) -> str:
    # Name-independent rendering used for tie-breaking.
    return repr(phi.key)


@dataclass(frozen=True)
class FlClosure:
    """A Fischer-Ladner closure with its priority order and parity ranks.

    ``order`` lists every formula from highest to lowest priority; ``rank``
    is order-preserving and gives nu formulas even, mu formulas odd ranks.
    """

    formulas: frozenset
    graph: nx.DiGraph = field(repr=False)
    order: tuple = field(repr=False)
    rank: dict = field(repr=False)
    scc: dict = field(repr=False)

    def __contains__(self, phi):
        return phi in self.formulas

    def __len__(self):
        return len(self.formulas)

    def fl_leq(self, phi: Formula, psi: Formula) -> bool:
        """``phi`` is below-or-equal ``psi`` in the Fischer-Ladner preorder."""
        return phi == psi or nx.has_path(self.graph, psi, phi)

    def fl_equiv(self, phi: Formula, psi: Formula) -> bool:
        return self.scc[phi] == self.scc[psi]

    def fl_less(self, phi: Formula, psi: Formula) -> bool:
        return self.fl_leq(phi, psi) and not self.fl_equiv(phi, psi)

    def eq_classes(self) -> list[frozenset]:
        groups: dict[int, set] = {}
        for phi, c in self.scc.items():
            groups.setdefault(c, set()).add(phi)
        return [frozenset(g) for _, g in sorted(groups.items())]

    def priority_less(self, psi: Formula, phi: Formula) -> bool:
        """``psi < phi``: ``phi`` has strictly higher priority."""
        if self.fl_less(psi, phi):
            return True
        return self.fl_equiv(phi, psi) and phi != psi and contains(psi, phi)

    def parity(self, phi: Formula) -> str:
        if not is_fixpoint(phi):
            raise ValueError("parity is defined on fixed-point formulas only")
        return "even" if self.rank[phi] % 2 == 0 else "odd"


def _saturate(seeds: Iterable[Formula]) -> nx.DiGraph:
    g = nx.DiGraph()
    todo = []
    for s in seeds:
        if s not in g:
            g.add_node(s)
            todo.append(s)
    while todo:
        phi = todo.pop()
        for psi in successors(phi):
            if psi not in g:
                g.add_node(psi)
                todo.append(psi)
            g.add_edge(phi, psi)
    return g


def fl_closure(seeds: Iterable[Formula], tiebreak: str = "lex") -> FlClosure:
    """Fischer-Ladner closure of ``seeds`` with ranks.

    ``tiebreak`` picks the total extension of the priority order between
    FL-incomparable classes: ``"lex"`` or ``"revlex"`` on canonical keys.
    """
    seeds = list(seeds)
    for s in seeds:
        if free_vars(s):
            raise ValueError(f"open formula {render_formula(s)} in closure seed")
    g = _saturate(seeds)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    if tiebreak == "lex":
        def class_key(c):
            return min(_canon(f) for f in cond.nodes[c]["members"])
    elif tiebreak == "revlex":
        def class_key(c):
            return tuple(-ord(ch) for ch in max(_canon(f) for f in cond.nodes[c]["members"]))
    else:
        raise ValueError(f"unknown tiebreak {tiebreak!r}")
    order: list[Formula] = []
    # Edges run from FL-larger to FL-smaller, i.e. from higher priority down.
    for c in nx.lexicographical_topological_sort(cond, key=class_key):
        inside = sorted(cond.nodes[c]["members"], key=lambda f: (size(f), _canon(f)))
        order.extend(inside)
    rank: dict[Formula, int] = {}
    nxt = 0
    for phi in order:
        r = nxt
        if isinstance(phi, Nu) and r % 2:
            r += 1
        elif isinstance(phi, Mu) and r % 2 == 0:
            r += 1
        rank[phi] = r
        nxt = r + 1
    return FlClosure(frozenset(g.nodes), g, tuple(order), rank, dict(members))


# --------------------------------------------------------------------------
# Concrete syntax

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class FreeVariableError(ValueError):
    pass


_OPS = {"*": Tensor, "@": Par, "+": Plus, "&": With}
_OP_OF = {v: k for k, v in _OPS.items()}
_KEYWORDS = {"mu", "nu", "bot", "top"}


def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield text[i:j], i
            i = j
        elif ch in "().*@+&01":
            yield ch, i
            i += 1
        else:
            raise FormulaSyntaxError(f"unexpected character {ch!r}", i)
    yield "", n


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, want: str):
        tok, off = self.take()
        if tok != want:
            what = repr(tok) if tok else "end of input"
            raise FormulaSyntaxError(f"expected {want!r}, found {what}", off)

    def formula(self) -> Formula:
        tok, off = self.peek()
        if tok in ("mu", "nu"):
            self.take()
            name, noff = self.take()
            if not _is_ident(name):
                raise FormulaSyntaxError("expected a variable name", noff)
            self.expect(".")
            body = self.formula()
            return (Mu if tok == "mu" else Nu)(name, body)
        return self.chain()

    def chain(self) -> Formula:
        left = self.atom()
        op = None
        while True:
            tok, off = self.peek()
            if tok not in _OPS:
                return left
            if op is not None and tok != op:
                raise FormulaSyntaxError("mixed connectives need parentheses", off)
            op = tok
            self.take()
            left = _OPS[tok](left, self.atom())

    def atom(self) -> Formula:
        tok, off = self.take()
        if tok == "1":
            return ONE
        if tok == "0":
            return ZERO
        if tok == "bot":
            return BOT
        if tok == "top":
            return TOP
        if tok == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if _is_ident(tok):
            return Var(tok)
        what = repr(tok) if tok else "end of input"
        raise FormulaSyntaxError(f"unexpected {what}", off)


def _is_ident(tok: str) -> bool:
    return bool(tok) and tok[0].isalpha() and tok not in _KEYWORDS


def parse_formula(text: str, allow_open: bool = False) -> Formula:
    p = _Parser(text)
    phi = p.formula()
    tok, off = p.peek()
    if tok:
        raise FormulaSyntaxError(f"trailing input {tok!r}", off)
    if not allow_open:
        fv = free_vars(phi)
        if fv:
            raise FreeVariableError(f"free variables {sorted(fv)} in {text!r}")
    return phi


def render_formula(phi: Formula) -> str:
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, _Unit):
        return _TAG[type(phi)]
    if isinstance(phi, _Fix):
        return f"{_TAG[type(phi)]} {phi.var}. {render_formula(phi.body)}"
    op = _OP_OF[type(phi)]
    left = render_formula(phi.left)
    if not (isinstance(phi.left, (Var, _Unit)) or type(phi.left) is type(phi)):
        left = f"({left})"
    right = render_formula(phi.right)
    if not isinstance(phi.right, (Var, _Unit)):
        right = f"({right})"
    return f"{left} {op} {right}"


# Exposed so other modules can type-dispatch without touching private names.
BINARY = _Binary
FIXPOINT = _Fix
UNIT = _Unit
