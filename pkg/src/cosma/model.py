"""System model: machines with guarded arcs and state-attributed outputs.

A machine is a Moore-style automaton: each state carries the set of symbols
it emits while current, and each arc carries a guard formula.  A system is
an ordered list of machines sharing one symbol table; the machine order
fixes the positions of the global-state vector.

Step semantics: all machines move synchronously.  In one global step every
machine picks one arc enabled under the common valuation (the union of all
current states' outputs plus whatever environment symbols occur), or stays
put when none is enabled.  Because a state's own outputs are part of the
valuation used to leave it, a machine's output can feed back into its own
guards.  Outputs are levels, not pulses: a symbol holds exactly while its
producing state is current.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import AbstractSet, Sequence


@dataclass(frozen=True)
class State:
    """A machine state; ``outputs`` are emitted while the state is current."""

    name: str
    outputs: frozenset = frozenset()


@dataclass(frozen=True)
class Arc:
    """Directed arc ``src -> dst`` enabled when ``guard`` is true.

    ``src == dst`` is a stay condition: the machine remains in the state.
    """

    src: str
    dst: str
    guard: object


GlobalState = tuple  # one state index per machine, in machine order


class Machine:
    """An ordered list of states, an initial state, and guarded arcs."""

    def __init__(self, name: str, states: Sequence[State], initial: str, arcs: Sequence[Arc]):
        self.name = name
        self.states = tuple(states)
        self.initial = initial
        self.arcs = tuple(arcs)
        self._index = {}
        for i, state in enumerate(self.states):
            self._index.setdefault(state.name, i)
        arcs_from = {i: [] for i in range(len(self.states))}
        for arc in self.arcs:
            i = self._index.get(arc.src)
            if i is not None:
                arcs_from[i].append(arc)
        self._arcs_from = {i: tuple(lst) for i, lst in arcs_from.items()}

    def state_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"machine {self.name!r} has no state {name!r}") from None

    @property
    def initial_index(self) -> int:
        return self.state_index(self.initial)

    def arcs_from(self, state_idx: int):
        """Outgoing arcs of a state, in declaration order."""
        return self._arcs_from.get(state_idx, ())

    def __repr__(self):
        return f"Machine({self.name!r}, {len(self.states)} states)"


class System:
    """A named, ordered collection of machines over one symbol table."""

    def __init__(self, name: str, machines: Sequence[Machine], symbols):
        self.name = name
        self.machines = tuple(machines)
        self.symbols = symbols

    def machine_index(self, name: str) -> int:
        for i, m in enumerate(self.machines):
            if m.name == name:
                return i
        raise KeyError(f"no machine named {name!r}")

    def initial_state(self) -> GlobalState:
        return tuple(m.initial_index for m in self.machines)

    def product_size(self) -> int:
        size = 1
        for m in self.machines:
            size *= len(m.states)
        return size

    def produced_symbols(self) -> frozenset:
        out = set()
        for m in self.machines:
            for s in m.states:
                out |= s.outputs
        return frozenset(out)

    def guard_symbols(self) -> frozenset:
        from cosma.formula import atoms

        used = set()
        for m in self.machines:
            for arc in m.arcs:
                used |= atoms(arc.guard)
        return frozenset(used)

    def __repr__(self):
        return f"System({self.name!r}, {len(self.machines)} machines)"


def env_alphabet(system: System) -> frozenset:
    """Symbols consumed by guards but produced by no machine.

    Their valuation is unconstrained: at any step any combination of them
    may occur, including none.
    """
    return system.guard_symbols() - system.produced_symbols()


def declaration_order(system: System, symbols) -> list:
    """The given symbols in symbol-table (declaration) order.

    Symbols outside the table, which can only come from requirement files,
    follow at the end sorted by name.
    """
    wanted = frozenset(symbols)
    ordered = [s for s in system.symbols if s in wanted]
    extras = sorted(wanted - set(ordered), key=lambda s: s.name)
    return ordered + extras


def output_valuation(system: System, gstate: GlobalState) -> frozenset:
    """Union of the outputs of every machine's current state."""
    out = set()
    for machine, idx in zip(system.machines, gstate):
        out |= machine.states[idx].outputs
    return frozenset(out)


def enabled_arcs(machine: Machine, state_idx: int, valuation: AbstractSet) -> list[Arc]:
    """Arcs out of the state whose guard is true under ``valuation``.

    Declaration order is kept; when several arcs are enabled the step
    semantics picks one of them nondeterministically.
    """
    from cosma.formula import evaluate

    return [arc for arc in machine.arcs_from(state_idx) if evaluate(arc.guard, valuation)]


def step_successors(system: System, gstate: GlobalState, env_true: AbstractSet) -> list[GlobalState]:
    """All global states one synchronous step can reach.

    ``env_true`` is the set of environment symbols occurring in this step;
    the common valuation adds the current outputs.  A machine with no
    enabled arc stays in its state (implicit self-loop).
    """
    valuation = output_valuation(system, gstate) | frozenset(env_true)
    per_machine = []
    for machine, idx in zip(system.machines, gstate):
        enabled = enabled_arcs(machine, idx, valuation)
        if enabled:
            targets = []
            for arc in enabled:
                t = machine.state_index(arc.dst)
                if t not in targets:
                    targets.append(t)
        else:
            targets = [idx]
        per_machine.append(targets)
    return [tuple(choice) for choice in itertools.product(*per_machine)]


@dataclass(frozen=True)
class LintEntry:
    severity: str  # "error" | "warning"
    code: str
    message: str
    machine: str | None = None
    state: str | None = None


@dataclass
class LintReport:
    entries: list[LintEntry] = field(default_factory=list)

    @property
    def errors(self) -> list[LintEntry]:
        return [e for e in self.entries if e.severity == "error"]

    @property
    def warnings(self) -> list[LintEntry]:
        return [e for e in self.entries if e.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, severity, code, message, machine=None, state=None):
        self.entries.append(LintEntry(severity, code, message, machine, state))


def validate(system: System) -> LintReport:
    """Structural checks; pure, so equal systems give identical reports.

    Errors make the model unusable (dangling state names, duplicate names,
    bad initial).  Warnings flag modeling smells: a symbol produced by two
    machines, outgoing guards that do not cover all valuations (the machine
    may be forced to stay via the implicit self-loop), and overlapping
    guards (nondeterminism, often intended).
    """
    from cosma import formula

    report = LintReport()

    seen_machines = set()
    for machine in system.machines:
        if machine.name in seen_machines:
            report.add("error", "duplicate-machine", f"duplicate machine name {machine.name!r}")
        seen_machines.add(machine.name)

    produced_by: dict = {}
    for machine in system.machines:
        names = set()
        for state in machine.states:
            if state.name in names:
                report.add(
                    "error",
                    "duplicate-state",
                    f"duplicate state {state.name!r} in machine {machine.name!r}",
                    machine=machine.name,
                    state=state.name,
                )
            names.add(state.name)
            for sym in state.outputs:
                prev = produced_by.get(sym)
                if prev is not None and prev != machine.name:
                    report.add(
                        "warning",
                        "shared-output",
                        f"symbol {sym.name!r} is produced by machines {prev!r} and {machine.name!r}",
                        machine=machine.name,
                    )
                produced_by[sym] = machine.name
        if not machine.states:
            report.add("error", "empty-machine", f"machine {machine.name!r} has no states",
                       machine=machine.name)
            continue
        if machine.initial not in names:
            report.add(
                "error",
                "bad-initial",
                f"machine {machine.name!r}: initial state {machine.initial!r} does not exist",
                machine=machine.name,
            )
        for arc in machine.arcs:
            for endpoint, which in ((arc.src, "source"), (arc.dst, "target")):
                if endpoint not in names:
                    report.add(
                        "error",
                        "bad-arc",
                        f"machine {machine.name!r}: arc {which} {endpoint!r} is not a state",
                        machine=machine.name,
                        state=endpoint,
                    )

    for sym in sorted(system.guard_symbols() | system.produced_symbols()):
        if sym not in system.symbols:
            report.add(
                "error",
                "unregistered-symbol",
                f"symbol {sym.name!r} is not in the system symbol table",
            )

    # guard coverage and overlap need satisfiability; skip when the
    # structure is already broken
    if report.errors:
        _env_notes(system, report)
        return report

    ctx = formula.GuardContext(declaration_order(system, system.guard_symbols()))
    for machine in system.machines:
        for idx, state in enumerate(machine.states):
            arcs = machine.arcs_from(idx)
            if not arcs:
                report.add(
                    "warning",
                    "coverage-gap",
                    f"machine {machine.name!r}, state {state.name!r}: no outgoing arcs; "
                    "every step keeps the machine here",
                    machine=machine.name,
                    state=state.name,
                )
                continue
            union = formula.or_all(arc.guard for arc in arcs)
            if not ctx.tautology(union):
                report.add(
                    "warning",
                    "coverage-gap",
                    f"machine {machine.name!r}, state {state.name!r}: outgoing guards do not "
                    "cover all valuations; the machine stays when none is enabled",
                    machine=machine.name,
                    state=state.name,
                )
            for a, b in itertools.combinations(arcs, 2):
                if ctx.satisfiable(formula.and_(a.guard, b.guard)):
                    report.add(
                        "warning",
                        "overlap",
                        f"machine {machine.name!r}, state {state.name!r}: guards "
                        f"{formula.to_text(a.guard)!r} and {formula.to_text(b.guard)!r} overlap "
                        "(nondeterministic choice)",
                        machine=machine.name,
                        state=state.name,
                    )

    _env_notes(system, report)
    return report


def _env_notes(system: System, report: LintReport) -> None:
    for sym in sorted(env_alphabet(system)):
        report.add(
            "warning",
            "env-symbol",
            f"symbol {sym.name!r} is never produced by any machine; "
            "treating it as an environment input",
        )
