"""Boolean guard formulas over an abstract symbol alphabet.

Machine arcs are labelled with formulas over named signals rather than
letters from an input alphabet: an atom is true in a step exactly when its
signal occurs in the step's valuation, and a valuation is simply the set
of signals currently present.  The constant ``1`` (always true) labels
spontaneous transitions; ``0`` never fires.

Formulas are plain immutable trees.  Only constant folding is ever applied
to them, so printed guards stay close to what the user wrote; canonical
comparison is the job of :mod:`cosma.robdd`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator, Mapping

from cosma import robdd

__all__ = [
    "And",
    "Atom",
    "BoolExpr",
    "ConstFalse",
    "ConstTrue",
    "FALSE",
    "FormulaError",
    "GuardContext",
    "Not",
    "Or",
    "Symbol",
    "SymbolTable",
    "TRUE",
    "and_",
    "and_all",
    "atom",
    "atoms",
    "conj_factors",
    "evaluate",
    "not_",
    "or_",
    "or_all",
    "residual",
    "satisfiable",
    "tautology",
    "to_text",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FormulaError(ValueError):
    """Malformed symbol or misused formula operation."""


@dataclass(frozen=True, order=True)
class Symbol:
    """A named signal.  Case-sensitive identifier; equal names are equal."""

    name: str

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise FormulaError(f"invalid symbol name {self.name!r}")

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"Symbol({self.name!r})"


class SymbolTable:
    """Interning table: each distinct name gets exactly one id.

    The table is frozen once a system is fully parsed; interning an unknown
    name afterwards is an error.
    """

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._symbols: list[Symbol] = []
        self._frozen = False

    def intern(self, name: str | Symbol) -> Symbol:
        key = name.name if isinstance(name, Symbol) else name
        idx = self._ids.get(key)
        if idx is not None:
            return self._symbols[idx]
        if self._frozen:
            raise FormulaError(f"symbol table is frozen; unknown symbol {key!r}")
        sym = Symbol(key)
        self._ids[key] = len(self._symbols)
        self._symbols.append(sym)
        return sym

    def id_of(self, symbol: str | Symbol) -> int:
        key = symbol.name if isinstance(symbol, Symbol) else symbol
        try:
            return self._ids[key]
        except KeyError:
            raise FormulaError(f"unregistered symbol {key!r}") from None

    def freeze(self):
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    def __contains__(self, item: str | Symbol) -> bool:
        key = item.name if isinstance(item, Symbol) else item
        return key in self._ids

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self._symbols)

    def __len__(self) -> int:
        return len(self._symbols)


class BoolExpr:
    """Base class of formula nodes.  Instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class ConstTrue(BoolExpr):
    """The always-true guard; prints as ``1`` and marks spontaneous arcs."""


@dataclass(frozen=True)
class ConstFalse(BoolExpr):
    """The never-true guard; prints as ``0``."""


@dataclass(frozen=True)
class Atom(BoolExpr):
    symbol: Symbol


@dataclass(frozen=True)
class Not(BoolExpr):
    operand: BoolExpr


@dataclass(frozen=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr


TRUE = ConstTrue()
FALSE = ConstFalse()


def atom(symbol: Symbol | str) -> Atom:
    return Atom(symbol if isinstance(symbol, Symbol) else Symbol(symbol))


def not_(expr: BoolExpr) -> BoolExpr:
    if expr == TRUE:
        return FALSE
    if expr == FALSE:
        return TRUE
    return Not(expr)


def and_(left: BoolExpr, right: BoolExpr) -> BoolExpr:
    if left == FALSE or right == FALSE:
        return FALSE
    if left == TRUE:
        return right
    if right == TRUE:
        return left
    return And(left, right)


def or_(left: BoolExpr, right: BoolExpr) -> BoolExpr:
    if left == TRUE or right == TRUE:
        return TRUE
    if left == FALSE:
        return right
    if right == FALSE:
        return left
    return Or(left, right)


def and_all(exprs: Iterable[BoolExpr]) -> BoolExpr:
    result: BoolExpr = TRUE
    for e in exprs:
        result = and_(result, e)
    return result


def or_all(exprs: Iterable[BoolExpr]) -> BoolExpr:
    result: BoolExpr = FALSE
    for e in exprs:
        result = or_(result, e)
    return result


def atoms(expr: BoolExpr) -> frozenset[Symbol]:
    """All symbols occurring in ``expr``."""
    found: set[Symbol] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Atom):
            found.add(e.symbol)
        elif isinstance(e, Not):
            stack.append(e.operand)
        elif isinstance(e, (And, Or)):
            stack.append(e.left)
            stack.append(e.right)
    return frozenset(found)


def conj_factors(expr: BoolExpr) -> Iterator[BoolExpr]:
    """Yield the factors of a top-level conjunction (the expr itself if none)."""
    if isinstance(expr, And):
        yield from conj_factors(expr.left)
        yield from conj_factors(expr.right)
    else:
        yield expr


def evaluate(expr: BoolExpr, valuation: AbstractSet[Symbol]) -> bool:
    """Truth of ``expr`` when exactly the symbols in ``valuation`` occur.

    Symbols absent from the valuation are false (a signal either occurs in
    a step or it does not).
    """
    if isinstance(expr, Atom):
        return expr.symbol in valuation
    if isinstance(expr, Not):
        return not evaluate(expr.operand, valuation)
    if isinstance(expr, And):
        return evaluate(expr.left, valuation) and evaluate(expr.right, valuation)
    if isinstance(expr, Or):
        return evaluate(expr.left, valuation) or evaluate(expr.right, valuation)
    if isinstance(expr, ConstTrue):
        return True
    if isinstance(expr, ConstFalse):
        return False
    raise FormulaError(f"not a formula node: {expr!r}")


def residual(expr: BoolExpr, fixed: Mapping[Symbol, bool]) -> BoolExpr:
    """Substitute the ``fixed`` symbols by constants and fold constants.

    The folding rules are exactly x*1=x, x*0=0, x+0=x, x+1=1, !1=0, !0=1;
    atoms outside ``fixed`` are left untouched, so the result is a formula
    over the remaining symbols only.
    """
    if isinstance(expr, Atom):
        value = fixed.get(expr.symbol)
        if value is None:
            return expr
        return TRUE if value else FALSE
    if isinstance(expr, Not):
        return not_(residual(expr.operand, fixed))
    if isinstance(expr, And):
        return and_(residual(expr.left, fixed), residual(expr.right, fixed))
    if isinstance(expr, Or):
        return or_(residual(expr.left, fixed), residual(expr.right, fixed))
    return expr


_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3


def to_text(expr: BoolExpr) -> str:
    """Concrete syntax: ``~`` not, ``*`` and, ``+`` or, ``1``/``0`` constants.

    Parenthesization preserves the tree shape, so reparsing the text yields
    a structurally identical formula.
    """
    return _render(expr, 0)


def _render(expr: BoolExpr, min_prec: int) -> str:
    if isinstance(expr, ConstTrue):
        return "1"
    if isinstance(expr, ConstFalse):
        return "0"
    if isinstance(expr, Atom):
        return expr.symbol.name
    if isinstance(expr, Not):
        return "~" + _render(expr.operand, _PREC_NOT)
    if isinstance(expr, And):
        text = _render(expr.left, _PREC_AND) + " * " + _render(expr.right, _PREC_AND + 1)
        return f"({text})" if min_prec > _PREC_AND else text
    if isinstance(expr, Or):
        text = _render(expr.left, _PREC_OR) + " + " + _render(expr.right, _PREC_OR + 1)
        return f"({text})" if min_prec > _PREC_OR else text
    raise FormulaError(f"not a formula node: {expr!r}")


class GuardContext:
    """Reusable satisfiability and tautology checks over a fixed alphabet.

    Backed by a single BDD manager; converted formulas are memoized, which
    matters when the reachability builder tests thousands of residuals over
    the same environment alphabet.  An ordered ``alphabet`` (list or tuple)
    fixes the variable order, so callers can pass symbols in declaration
    order; an unordered one is sorted by name.
    """

    def __init__(self, alphabet: Iterable[Symbol], backend: str | None = None):
        symbols = list(alphabet)
        if isinstance(alphabet, (set, frozenset)):
            symbols.sort(key=lambda s: s.name)
        self.alphabet = frozenset(symbols)
        seen: set[str] = set()
        order = [s.name for s in symbols if not (s.name in seen or seen.add(s.name))]
        self._manager = robdd.BddManager(order, backend=backend)
        self._memo: dict[BoolExpr, robdd.BddRef] = {}

    def ref(self, expr: BoolExpr) -> robdd.BddRef:
        cached = self._memo.get(expr)
        if cached is not None:
            return cached
        m = self._manager
        if isinstance(expr, Atom):
            if expr.symbol not in self.alphabet:
                raise FormulaError(
                    f"atom {expr.symbol.name!r} outside alphabet"
                )
            result = m.mk_var(expr.symbol.name)
        elif isinstance(expr, Not):
            result = m.not_(self.ref(expr.operand))
        elif isinstance(expr, And):
            result = m.and_(self.ref(expr.left), self.ref(expr.right))
        elif isinstance(expr, Or):
            result = m.or_(self.ref(expr.left), self.ref(expr.right))
        elif isinstance(expr, ConstTrue):
            result = m.TRUE
        elif isinstance(expr, ConstFalse):
            result = m.FALSE
        else:
            raise FormulaError(f"not a formula node: {expr!r}")
        self._memo[expr] = result
        return result

    def satisfiable(self, expr: BoolExpr) -> bool:
        return self.ref(expr) != self._manager.FALSE

    def tautology(self, expr: BoolExpr) -> bool:
        return self.ref(expr) == self._manager.TRUE

    def overlap(self, a: BoolExpr, b: BoolExpr) -> bool:
        return self._manager.and_(self.ref(a), self.ref(b)) != self._manager.FALSE


def satisfiable(expr: BoolExpr, alphabet: Iterable[Symbol]) -> bool:
    """True iff some valuation over ``alphabet`` makes ``expr`` true."""
    return GuardContext(alphabet).satisfiable(expr)


def tautology(expr: BoolExpr, alphabet: Iterable[Symbol]) -> bool:
    """True iff every valuation over ``alphabet`` makes ``expr`` true."""
    return GuardContext(alphabet).tautology(expr)
