"""Reduced ordered BDD manager with named variables.

The manager wraps a kernel that stores nodes in a unique table, so handles
are canonical: two references are equal exactly when they denote the same
Boolean function under the manager's variable order.  A manager is
single-owner; distinct managers may be used concurrently but their
references must never be mixed.

Two kernels exist: a compiled extension (``cosma._bddcore``) and a pure
Python twin (``cosma._bddpure``).  The compiled one is used when it
imports; set ``COSMA_BDD_BACKEND=python`` or ``=cython`` to force a choice.
``benchmarks/bench_bdd.py`` compares the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from cosma import _bddpure

__all__ = ["BACKEND", "BddError", "BddManager", "BddRef", "available_backends"]


class BddError(ValueError):
    """Misuse of the BDD API (unknown variable, mixed managers, ...)."""


def _load_compiled():
    try:
        from cosma import _bddcore  # noqa: PLC0415 (optional extension)

        return _bddcore
    except ImportError:
        return None


_KERNELS = {"python": _bddpure}
_compiled = _load_compiled()
if _compiled is not None:
    _KERNELS["cython"] = _compiled

_requested = os.environ.get("COSMA_BDD_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    BACKEND = "cython" if _compiled is not None else "python"
elif _requested in ("cython", "c", "compiled"):
    if _compiled is None:
        raise ImportError(
            "COSMA_BDD_BACKEND requests the compiled kernel but cosma._bddcore "
            "is not importable; build it or unset the variable"
        )
    BACKEND = "cython"
elif _requested in ("python", "py", "pure"):
    BACKEND = "python"
else:
    raise ImportError(f"unknown COSMA_BDD_BACKEND value {_requested!r}")


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


@dataclass(frozen=True)
class BddRef:
    """Opaque handle to a Boolean function inside one manager."""

    manager: "BddManager"
    node: int

    def __and__(self, other: "BddRef") -> "BddRef":
        return self.manager.and_(self, other)

    def __or__(self, other: "BddRef") -> "BddRef":
        return self.manager.or_(self, other)

    def __xor__(self, other: "BddRef") -> "BddRef":
        return self.manager.xor_(self, other)

    def __invert__(self) -> "BddRef":
        return self.manager.not_(self)

    def __repr__(self):
        return f"BddRef({self.node})"


class BddManager:
    """A variable order, a unique node store, and the logical operations."""

    def __init__(self, variables: Iterable[str] = (), backend: str | None = None):
        name = BACKEND if backend is None else backend
        try:
            kernel_module = _KERNELS[name]
        except KeyError:
            raise BddError(
                f"unknown backend {name!r}; available: {available_backends()}"
            ) from None
        self.backend = name
        self._k = kernel_module.BddKernel()
        self._levels: dict[str, int] = {}
        self._names: list[str] = []
        self.FALSE = BddRef(self, 0)
        self.TRUE = BddRef(self, 1)
        for var in variables:
            self.mk_var(var)

    # -- variables ---------------------------------------------------------

    def mk_var(self, name: str) -> BddRef:
        """The function of a single variable; declares it on first use."""
        level = self._levels.get(name)
        if level is None:
            level = self._k.add_var()
            self._levels[name] = level
            self._names.append(name)
        return BddRef(self, self._k.var(level))

    def var_order(self) -> tuple[str, ...]:
        return tuple(self._names)

    def level_of(self, name: str) -> int:
        try:
            return self._levels[name]
        except KeyError:
            raise BddError(f"undeclared variable {name!r}") from None

    def __len__(self) -> int:
        return len(self._k)

    # -- operations --------------------------------------------------------

    def _node(self, ref: BddRef) -> int:
        if not isinstance(ref, BddRef) or ref.manager is not self:
            raise BddError("reference does not belong to this manager")
        return ref.node

    def _wrap(self, node: int) -> BddRef:
        return BddRef(self, node)

    def not_(self, f: BddRef) -> BddRef:
        return self._wrap(self._k.not_(self._node(f)))

    def and_(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._k.and_(self._node(f), self._node(g)))

    def or_(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._k.or_(self._node(f), self._node(g)))

    def xor_(self, f: BddRef, g: BddRef) -> BddRef:
        return self._wrap(self._k.xor_(self._node(f), self._node(g)))

    def apply(self, op: str, f: BddRef, g: BddRef) -> BddRef:
        try:
            method = {"and": self.and_, "or": self.or_, "xor": self.xor_}[op]
        except KeyError:
            raise BddError(f"unknown operation {op!r}") from None
        return method(f, g)

    def ite(self, f: BddRef, g: BddRef, h: BddRef) -> BddRef:
        return self._wrap(self._k.ite(self._node(f), self._node(g), self._node(h)))

    def exists(self, names: Iterable[str], f: BddRef) -> BddRef:
        levels = tuple(sorted(self.level_of(n) for n in names))
        return self._wrap(self._k.exists(self._node(f), levels))

    def rename(self, f: BddRef, mapping: Mapping[str, str]) -> BddRef:
        pairs = tuple(
            sorted((self.level_of(src), self.level_of(dst)) for src, dst in mapping.items())
        )
        return self._wrap(self._k.rename(self._node(f), pairs))

    def sat_count(self, f: BddRef, nvars: int | None = None) -> int:
        if nvars is None:
            nvars = len(self._names)
        return self._k.sat_count(self._node(f), nvars)

    def support(self, f: BddRef) -> tuple[str, ...]:
        return tuple(self._names[lv] for lv in self._k.support(self._node(f)))

    def evaluate(self, f: BddRef, true_names: Iterable[str]) -> bool:
        levels = {self.level_of(n) for n in true_names}
        return self._k.evaluate(self._node(f), levels)

    def some_assignment(self, f: BddRef) -> dict[str, bool] | None:
        solution = self._k.some_solution(self._node(f))
        if solution is None:
            return None
        return {self._names[lv]: value for lv, value in solution.items()}

    def from_expr(self, expr, naming: Callable | None = None) -> BddRef:
        """Translate a guard formula; every atom must name a declared variable."""
        from cosma import formula  # noqa: PLC0415 (avoids an import cycle)

        if naming is None:
            naming = lambda sym: sym.name  # noqa: E731

        memo: dict[formula.BoolExpr, BddRef] = {}

        def build(e) -> BddRef:
            cached = memo.get(e)
            if cached is not None:
                return cached
            if isinstance(e, formula.Atom):
                var = naming(e.symbol)
                if var not in self._levels:
                    raise BddError(f"atom {e.symbol.name!r} has no manager variable")
                result = self.mk_var(var)
            elif isinstance(e, formula.Not):
                result = self.not_(build(e.operand))
            elif isinstance(e, formula.And):
                result = self.and_(build(e.left), build(e.right))
            elif isinstance(e, formula.Or):
                result = self.or_(build(e.left), build(e.right))
            elif isinstance(e, formula.ConstTrue):
                result = self.TRUE
            elif isinstance(e, formula.ConstFalse):
                result = self.FALSE
            else:
                raise BddError(f"not a formula node: {e!r}")
            memo[e] = result
            return result

        return build(expr)

    def audit(self) -> list[str]:
        """Structural re-check of reduction and unique-table invariants."""
        return self._k.audit()
