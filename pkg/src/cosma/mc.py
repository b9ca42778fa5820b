"""Temporal verification over a reachability graph.

Two requirement styles are supported:

* implication queries ``always (antecedent => next|eventually consequent)``
  checked at every reachable state, and
* general CTL formulas over output symbols, evaluated at the initial state.

Antecedent atoms may name machine outputs or environment inputs.  Graph
nodes carry no environment valuation, so environment atoms condition the
outgoing edges instead: at a matching state only the edges whose guard is
consistent with the antecedent's environment part are considered.  This
must agree with the alternative modeling device of adding a small machine
that produces the signal, which the test-suite checks explicitly.

``eventually`` is read universally: after the conditioned first step the
consequent must be hit on all paths.  The ``exists`` variant asks for one
path instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cosma import formula as F
from cosma import model
from cosma.reach import ReachGraph

__all__ = [
    "CtlAF", "CtlAG", "CtlAU", "CtlAX", "CtlAnd", "CtlAtom", "CtlConst",
    "CtlEF", "CtlEG", "CtlEU", "CtlEX", "CtlFormula", "CtlImplies", "CtlNot",
    "CtlOr", "CtlQuery", "Query", "QueryError", "TraceStep", "Verdict",
    "check_ctl", "check_query", "check_suite", "ctl_atoms",
]


class QueryError(ValueError):
    """A query that cannot be checked against the given system."""


@dataclass(frozen=True)
class Query:
    """``always (antecedent => mode consequent)`` over all reachable states."""

    name: str
    antecedent: F.BoolExpr
    mode: str  # "next" | "eventually"
    consequent: F.BoolExpr
    universal: bool = True  # False: the "exists eventually" variant

    def __str__(self):
        mode = self.mode if self.universal else f"exists {self.mode}"
        return (
            f"{self.name}: always ({F.to_text(self.antecedent)} => "
            f"{mode} {F.to_text(self.consequent)})"
        )


# -- CTL ASTs ------------------------------------------------------------------


class CtlFormula:
    __slots__ = ()


@dataclass(frozen=True)
class CtlConst(CtlFormula):
    value: bool


@dataclass(frozen=True)
class CtlAtom(CtlFormula):
    symbol: F.Symbol


@dataclass(frozen=True)
class CtlNot(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlAnd(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlOr(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlImplies(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlEX(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlAX(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlEF(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlAF(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlEG(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlAG(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlEU(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlAU(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlQuery:
    name: str
    formula: CtlFormula


def ctl_atoms(f: CtlFormula) -> frozenset[F.Symbol]:
    if isinstance(f, CtlAtom):
        return frozenset({f.symbol})
    if isinstance(f, (CtlNot, CtlEX, CtlAX, CtlEF, CtlAF, CtlEG, CtlAG)):
        return ctl_atoms(f.sub)
    if isinstance(f, (CtlAnd, CtlOr, CtlImplies, CtlEU, CtlAU)):
        return ctl_atoms(f.left) | ctl_atoms(f.right)
    return frozenset()


# -- verdicts ------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    node: int
    env: frozenset | None  # environment symbols used to leave the node


@dataclass
class Verdict:
    holds: bool
    vacuous: bool = False
    trace: list[TraceStep] | None = None

    def as_json(self, rg: ReachGraph | None = None) -> dict:
        doc: dict = {"holds": self.holds, "vacuous": self.vacuous}
        if self.trace is None:
            doc["trace"] = None
        else:
            doc["trace"] = [
                {
                    "node": step.node,
                    "states": [
                        m.states[i].name
                        for m, i in zip(rg.system.machines, rg.nodes[step.node])
                    ]
                    if rg is not None
                    else None,
                    "env": sorted(s.name for s in step.env) if step.env is not None else None,
                }
                for step in self.trace
            ]
        return doc


# -- query checking ------------------------------------------------------------


def split_antecedent(antecedent: F.BoolExpr, produced: frozenset) -> tuple[F.BoolExpr, F.BoolExpr]:
    """Split a conjunction into its output part and its environment part.

    Each top-level factor must be purely over produced symbols or purely
    over other symbols; a mixed factor has no unique reading and is
    rejected.
    """
    state_part: F.BoolExpr = F.TRUE
    env_part: F.BoolExpr = F.TRUE
    for factor in F.conj_factors(antecedent):
        used = F.atoms(factor)
        if not used or used <= produced:
            state_part = F.and_(state_part, factor)
        elif used & produced:
            raise QueryError(
                f"antecedent factor {F.to_text(factor)!r} mixes output and environment "
                "symbols; split it into separate conjuncts"
            )
        else:
            env_part = F.and_(env_part, factor)
    return state_part, env_part


def _env_assignments(symbols: list):
    """All subsets of ``symbols`` in a fixed lexicographic order."""
    n = len(symbols)
    for bits in range(1 << n):
        yield frozenset(symbols[i] for i in range(n) if bits >> i & 1)


def _find_env(expr: F.BoolExpr, env_sorted: list) -> frozenset:
    for valuation in _env_assignments(env_sorted):
        if F.evaluate(expr, valuation):
            return valuation
    raise AssertionError("expression was reported satisfiable over the environment")


def _pre_closure_lasso(rg: ReachGraph, start: int, region: set[int], env_sorted: list):
    """A trace from ``start`` that loops inside ``region`` forever.

    Every node of ``region`` has at least one successor in ``region`` (the
    callers pass greatest-fixpoint sets with that property), so following
    the first such edge must eventually revisit a node.
    """
    steps: list[TraceStep] = []
    seen: set[int] = set()
    node = start
    while node not in seen:
        seen.add(node)
        edge = next(e for e in rg.out_edges(node) if e.dst in region)
        steps.append(TraceStep(node, _find_env(edge.guard, env_sorted)))
        node = edge.dst
    steps.append(TraceStep(node, None))
    return steps


def _eg_region(rg: ReachGraph, region: set[int]) -> set[int]:
    """Greatest subset of ``region`` all of whose members can stay in it."""
    z = set(region)
    changed = True
    while changed:
        changed = False
        for node in list(z):
            if not any(e.dst in z for e in rg.out_edges(node)):
                z.discard(node)
                changed = True
    return z


def _ef_region(rg: ReachGraph, goal: set[int]) -> set[int]:
    z = set(goal)
    changed = True
    while changed:
        changed = False
        for node in range(len(rg.nodes)):
            if node not in z and any(e.dst in z for e in rg.out_edges(node)):
                z.add(node)
                changed = True
    return z


def check_query(rg: ReachGraph, query: Query) -> Verdict:
    """Check an implication query at every reachable state.

    At each state whose outputs satisfy the antecedent's output part, the
    edges consistent with its environment part must exist and lead only to
    (``next``) or inevitably reach (``eventually``) the consequent.  A
    failing verdict carries a trace replaying under the step semantics; a
    query whose output part matches no reachable state holds vacuously.
    """
    system = rg.system
    produced = system.produced_symbols()
    state_part, env_part = split_antecedent(query.antecedent, produced)

    bad_consequent = sorted(s.name for s in F.atoms(query.consequent) - produced)
    if bad_consequent:
        raise QueryError(
            f"query {query.name!r}: consequent uses non-output symbols "
            f"{', '.join(bad_consequent)}"
        )

    # conditioning alphabet: the true environment plus any antecedent symbol
    # the system never mentions (unconstrained, hence also environmental)
    env = model.env_alphabet(system) | (F.atoms(env_part) - produced)
    env_sorted = sorted(env, key=lambda s: s.name)
    ctx = F.GuardContext(model.declaration_order(system, env))

    matching = [i for i in range(len(rg.nodes)) if F.evaluate(state_part, rg.outputs[i])]
    if not matching:
        return Verdict(holds=True, vacuous=True)

    goal = {i for i in range(len(rg.nodes)) if F.evaluate(query.consequent, rg.outputs[i])}
    if query.mode == "eventually":
        if query.universal:
            # AF(consequent) = complement of EG(not consequent)
            bad_region = _eg_region(rg, set(range(len(rg.nodes))) - goal)
            target = set(range(len(rg.nodes))) - bad_region
        else:
            target = _ef_region(rg, goal)
            bad_region = set(range(len(rg.nodes))) - target

    for node in matching:
        conditioned = [
            e for e in rg.out_edges(node) if ctx.satisfiable(F.and_(e.guard, env_part))
        ]
        if not conditioned:
            return Verdict(holds=False, trace=[TraceStep(node, None)])
        if query.mode == "next":
            for edge in conditioned:
                if edge.dst not in goal:
                    env_val = _find_env(F.and_(edge.guard, env_part), env_sorted)
                    return Verdict(
                        holds=False,
                        trace=[TraceStep(node, env_val), TraceStep(edge.dst, None)],
                    )
        else:
            for edge in conditioned:
                if edge.dst not in target:
                    env_val = _find_env(F.and_(edge.guard, env_part), env_sorted)
                    tail = _pre_closure_lasso(rg, edge.dst, bad_region, env_sorted)
                    return Verdict(holds=False, trace=[TraceStep(node, env_val), *tail])
    return Verdict(holds=True)


# -- CTL -----------------------------------------------------------------------


def check_ctl(rg: ReachGraph, formula_: CtlFormula) -> Verdict:
    """Standard fixpoint labeling; the verdict is membership of the initial node.

    Atoms are read against node outputs; a symbol no machine produces is
    false at every node (the requirement parser warns about such atoms).
    Path quantifiers range over infinite paths, which exist from every node
    because the step relation is total.
    """
    n = len(rg.nodes)
    everything = frozenset(range(n))
    memo: dict[CtlFormula, frozenset[int]] = {}

    def pre_exists(target: frozenset[int]) -> frozenset[int]:
        return frozenset(
            i for i in range(n) if any(e.dst in target for e in rg.out_edges(i))
        )

    def sat(f: CtlFormula) -> frozenset[int]:
        found = memo.get(f)
        if found is not None:
            return found
        if isinstance(f, CtlConst):
            result = everything if f.value else frozenset()
        elif isinstance(f, CtlAtom):
            result = frozenset(i for i in range(n) if f.symbol in rg.outputs[i])
        elif isinstance(f, CtlNot):
            result = everything - sat(f.sub)
        elif isinstance(f, CtlAnd):
            result = sat(f.left) & sat(f.right)
        elif isinstance(f, CtlOr):
            result = sat(f.left) | sat(f.right)
        elif isinstance(f, CtlImplies):
            result = (everything - sat(f.left)) | sat(f.right)
        elif isinstance(f, CtlEX):
            result = pre_exists(sat(f.sub))
        elif isinstance(f, CtlAX):
            result = everything - pre_exists(everything - sat(f.sub))
        elif isinstance(f, CtlEU):
            result = _lfp_until(rg, sat(f.left), sat(f.right), pre_exists)
        elif isinstance(f, CtlEF):
            result = _lfp_until(rg, everything, sat(f.sub), pre_exists)
        elif isinstance(f, CtlEG):
            result = frozenset(_eg_region(rg, set(sat(f.sub))))
        elif isinstance(f, CtlAF):
            result = everything - frozenset(_eg_region(rg, set(everything - sat(f.sub))))
        elif isinstance(f, CtlAG):
            result = everything - _lfp_until(rg, everything, everything - sat(f.sub), pre_exists)
        elif isinstance(f, CtlAU):
            left, right = sat(f.left), sat(f.right)
            not_right = everything - right
            eu = _lfp_until(rg, not_right, not_right - left, pre_exists)
            eg = frozenset(_eg_region(rg, set(not_right)))
            result = everything - (eu | eg)
        else:
            raise QueryError(f"not a CTL node: {f!r}")
        memo[f] = result
        return result

    return Verdict(holds=0 in sat(formula_))


def _lfp_until(rg, hold: frozenset[int], goal: frozenset[int], pre_exists) -> frozenset[int]:
    z = set(goal)
    changed = True
    while changed:
        changed = False
        for i in range(len(rg.nodes)):
            if i not in z and i in hold and any(e.dst in z for e in rg.out_edges(i)):
                z.add(i)
                changed = True
    return frozenset(z)


# -- suites --------------------------------------------------------------------


def check_suite(rg: ReachGraph, requirements) -> list[tuple[str, Verdict]]:
    """Run a list of queries and CTL requirements against one graph."""
    results = []
    for req in requirements:
        if isinstance(req, Query):
            results.append((req.name, check_query(rg, req)))
        elif isinstance(req, CtlQuery):
            results.append((req.name, check_ctl(rg, req.formula)))
        else:
            raise QueryError(f"not a requirement: {req!r}")
    return results
