"""Reachability graphs: every reachable vector of component states.

Two engines build the same set of global states:

* an explicit breadth-first product that also records edges labelled with
  residual guards (guards with all machine-produced symbols substituted by
  their truth values in the source state, leaving environment symbols
  only), and
* a symbolic fixpoint over a BDD-encoded transition relation, which only
  counts.

The two must always agree on the number of reachable states; that
cross-check is the central oracle of the whole pipeline.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from cosma import formula as F
from cosma import model, robdd

__all__ = [
    "ReachEdge",
    "ReachGraph",
    "SymbolicReachability",
    "build_rg_explicit",
    "build_rg_symbolic",
    "to_dot",
    "to_json",
]


@dataclass(frozen=True)
class ReachEdge:
    src: int
    guard: F.BoolExpr  # over environment symbols only
    dst: int


@dataclass
class ReachGraph:
    system: model.System
    nodes: list[model.GlobalState]  # index 0 is the initial state
    edges: list[ReachEdge]
    outputs: list[frozenset]  # per-node output valuation
    quiescent: frozenset[int] = frozenset()
    _edges_from: list[list[ReachEdge]] = field(default_factory=list, repr=False)

    def out_edges(self, node: int) -> list[ReachEdge]:
        return self._edges_from[node]

    def node_name(self, node: int) -> str:
        parts = (
            machine.states[idx].name
            for machine, idx in zip(self.system.machines, self.nodes[node])
        )
        return "(" + ", ".join(parts) + ")"

    def __len__(self):
        return len(self.nodes)


def build_rg_explicit(system: model.System) -> ReachGraph:
    """Breadth-first fixpoint over the synchronous product.

    Starting from the initial vector, each frontier state contributes every
    combination of per-machine moves whose conjoined residual guard is
    satisfiable over the environment alphabet; machines whose guards leave
    some environment valuations uncovered contribute an implicit stay move
    guarded by the uncovered remainder.  Parallel edges between the same
    pair of states are merged by disjunction.
    """
    env = model.env_alphabet(system)
    ctx = F.GuardContext(model.declaration_order(system, env))
    non_env = [s for s in system.symbols if s not in env]

    initial = system.initial_state()
    index: dict[model.GlobalState, int] = {initial: 0}
    nodes: list[model.GlobalState] = [initial]
    outputs: list[frozenset] = [model.output_valuation(system, initial)]
    edge_guards: dict[tuple[int, int], F.BoolExpr] = {}
    edge_order: list[tuple[int, int]] = []

    frontier = 0
    while frontier < len(nodes):
        src = frontier
        gstate = nodes[src]
        valuation = outputs[src]
        fixed = {s: (s in valuation) for s in non_env}

        per_machine: list[list[tuple[int, F.BoolExpr]]] = []
        for machine, idx in zip(system.machines, gstate):
            moves: list[tuple[int, F.BoolExpr]] = []
            residuals: list[F.BoolExpr] = []
            for arc in machine.arcs_from(idx):
                r = F.residual(arc.guard, fixed)
                residuals.append(r)
                if ctx.satisfiable(r):
                    moves.append((machine.state_index(arc.dst), r))
            stay = F.not_(F.or_all(residuals))
            if ctx.satisfiable(stay):
                moves.append((idx, stay))
            per_machine.append(moves)

        for choice in itertools.product(*per_machine):
            guard = F.and_all(r for _, r in choice)
            if not ctx.satisfiable(guard):
                continue
            succ = tuple(t for t, _ in choice)
            dst = index.get(succ)
            if dst is None:
                dst = len(nodes)
                index[succ] = dst
                nodes.append(succ)
                outputs.append(model.output_valuation(system, succ))
            key = (src, dst)
            if key in edge_guards:
                edge_guards[key] = F.or_(edge_guards[key], guard)
            else:
                edge_guards[key] = guard
                edge_order.append(key)
        frontier += 1

    edges = [ReachEdge(src, edge_guards[(src, dst)], dst) for src, dst in edge_order]
    edges_from: list[list[ReachEdge]] = [[] for _ in nodes]
    for edge in edges:
        edges_from[edge.src].append(edge)

    quiescent = set()
    for i, outgoing in enumerate(edges_from):
        assert outgoing, "implicit stay makes the step relation total"
        if len(outgoing) == 1 and outgoing[0].dst == i and ctx.tautology(outgoing[0].guard):
            quiescent.add(i)

    return ReachGraph(
        system=system,
        nodes=nodes,
        edges=edges,
        outputs=outputs,
        quiescent=frozenset(quiescent),
        _edges_from=edges_from,
    )


# -- symbolic engine -----------------------------------------------------------


@dataclass
class SymbolicReachability:
    system: model.System
    manager: robdd.BddManager
    current_bits: list[list[str]]  # per machine, variable names of its state bits
    next_bits: list[list[str]]
    env_vars: dict  # Symbol -> variable name
    transition: robdd.BddRef
    reachable: robdd.BddRef
    count: int


def _bit_width(nstates: int) -> int:
    return (nstates - 1).bit_length()


def build_rg_symbolic(system: model.System, backend: str | None = None) -> SymbolicReachability:
    """Least fixpoint of the image operation over a BDD transition relation.

    Each machine's state is binary-encoded; current and next bits are
    interleaved in the variable order (the standard low-blowup choice for
    transition relations) with the environment variables after them.  Guard
    atoms naming produced symbols are substituted by functions of the
    current state bits, so the relation realizes the same synchronous step
    semantics as the explicit engine, output feedback included.
    """
    env = model.declaration_order(system, model.env_alphabet(system))
    manager = robdd.BddManager(backend=backend)

    current_bits: list[list[str]] = []
    next_bits: list[list[str]] = []
    for i, machine in enumerate(system.machines):
        width = _bit_width(len(machine.states))
        cur, nxt = [], []
        for k in range(width):
            cur_name = f"cur[{i}][{k}]"
            nxt_name = f"nxt[{i}][{k}]"
            manager.mk_var(cur_name)
            manager.mk_var(nxt_name)
            cur.append(cur_name)
            nxt.append(nxt_name)
        current_bits.append(cur)
        next_bits.append(nxt)
    total_bits = sum(len(bits) for bits in current_bits)

    env_vars = {}
    for sym in env:
        name = f"env[{sym.name}]"
        manager.mk_var(name)
        env_vars[sym] = name

    def encode(names: list[str], state_idx: int) -> robdd.BddRef:
        ref = manager.TRUE
        for k, var in enumerate(names):
            bit = manager.mk_var(var)
            ref = manager.and_(ref, bit if (state_idx >> k) & 1 else manager.not_(bit))
        return ref

    # truth of each produced symbol as a function of the current state bits
    output_fn: dict = {}
    for i, machine in enumerate(system.machines):
        for j, state in enumerate(machine.states):
            for sym in state.outputs:
                term = encode(current_bits[i], j)
                prev = output_fn.get(sym)
                output_fn[sym] = term if prev is None else manager.or_(prev, term)

    def guard_ref(expr: F.BoolExpr) -> robdd.BddRef:
        if isinstance(expr, F.Atom):
            sym = expr.symbol
            if sym in env_vars:
                return manager.mk_var(env_vars[sym])
            fn = output_fn.get(sym)
            # consumed but never produced and not environmental cannot happen;
            # guard symbols are either produced somewhere or environmental
            assert fn is not None, f"unplaced guard symbol {sym.name!r}"
            return fn
        if isinstance(expr, F.Not):
            return manager.not_(guard_ref(expr.operand))
        if isinstance(expr, F.And):
            return manager.and_(guard_ref(expr.left), guard_ref(expr.right))
        if isinstance(expr, F.Or):
            return manager.or_(guard_ref(expr.left), guard_ref(expr.right))
        if isinstance(expr, F.ConstTrue):
            return manager.TRUE
        return manager.FALSE

    transition = manager.TRUE
    for i, machine in enumerate(system.machines):
        relation = manager.FALSE
        for j in range(len(machine.states)):
            here = encode(current_bits[i], j)
            union = manager.FALSE
            moves = manager.FALSE
            for arc in machine.arcs_from(j):
                g = guard_ref(arc.guard)
                union = manager.or_(union, g)
                moves = manager.or_(
                    moves, manager.and_(g, encode(next_bits[i], machine.state_index(arc.dst)))
                )
            stay = manager.and_(manager.not_(union), encode(next_bits[i], j))
            relation = manager.or_(relation, manager.and_(here, manager.or_(moves, stay)))
        transition = manager.and_(transition, relation)

    init = manager.TRUE
    for i, machine in enumerate(system.machines):
        init = manager.and_(init, encode(current_bits[i], machine.initial_index))

    quantified = [v for bits in current_bits for v in bits] + list(env_vars.values())
    renaming = {
        nxt: cur
        for cur_list, nxt_list in zip(current_bits, next_bits)
        for cur, nxt in zip(cur_list, nxt_list)
    }

    reachable = init
    while True:
        image = manager.exists(quantified, manager.and_(reachable, transition))
        image = manager.rename(image, renaming) if renaming else image
        grown = manager.or_(reachable, image)
        if grown == reachable:
            break
        reachable = grown

    # mask off bit patterns that encode no state, then count over the
    # current bits; the interleaved next bits are free, hence the shift
    mask = manager.TRUE
    for i, machine in enumerate(system.machines):
        valid = manager.FALSE
        for j in range(len(machine.states)):
            valid = manager.or_(valid, encode(current_bits[i], j))
        mask = manager.and_(mask, valid)
    masked = manager.and_(reachable, mask)
    count = manager.sat_count(masked, 2 * total_bits) >> total_bits

    return SymbolicReachability(
        system=system,
        manager=manager,
        current_bits=current_bits,
        next_bits=next_bits,
        env_vars=env_vars,
        transition=transition,
        reachable=reachable,
        count=count,
    )


# -- export --------------------------------------------------------------------


def to_dot(rg: ReachGraph) -> str:
    """Graphviz rendering; deterministic (discovery order, sorted outputs)."""
    lines = ["digraph reachability {", "  rankdir=TB;", '  node [shape=ellipse, fontsize=10];']
    for i in range(len(rg.nodes)):
        outs = ", ".join(sorted(s.name for s in rg.outputs[i]))
        label = rg.node_name(i) + ("\\n" + "{" + outs + "}" if outs else "")
        shape = ', peripheries=2' if i == 0 else ""
        extra = ', style=dashed' if i in rg.quiescent else ""
        lines.append(f'  n{i} [label="{label}"{shape}{extra}];')
    for edge in rg.edges:
        lines.append(f'  n{edge.src} -> n{edge.dst} [label="{F.to_text(edge.guard)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(rg: ReachGraph) -> dict:
    """Stable-keyed dump of nodes and edges."""
    return {
        "system": rg.system.name,
        "nodes": [
            {
                "states": [
                    machine.states[idx].name
                    for machine, idx in zip(rg.system.machines, rg.nodes[i])
                ],
                "outputs": sorted(s.name for s in rg.outputs[i]),
                "quiescent": i in rg.quiescent,
            }
            for i in range(len(rg.nodes))
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "guard": F.to_text(e.guard)} for e in rg.edges
        ],
    }


def json_text(rg: ReachGraph) -> str:
    return json.dumps(to_json(rg), indent=2) + "\n"
