"""VHDL generation from a system of machines.

The translation is deliberately plain:

* environment symbols become ``in BIT`` ports, produced symbols ``out BIT``
  ports;
* each machine's states are coded on a bit vector held in process
  variables, initialized to the initial state's encoding;
* every produced symbol gets a ``new<Sym>`` variable holding its prepared
  value;
* each machine becomes one process: an infinite loop with a ``case`` over
  the state vector whose branches are if/elsif chains over the outgoing arc
  guards, assigning the next state and all prepared outputs (taken from the
  destination state's output set);
* the loop epilogue latches the state vector and the output signals, then
  waits for a fixed delay (or for a rising clock edge with ``clock=True``).

Overlapping guards collapse to first-declared-arc priority, since a VHDL
process is deterministic; each such state is flagged with a comment.
Output is a pure function of the input, hence byte-identical across runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from cosma import formula as F
from cosma import model

__all__ = ["AuditReport", "CodegenOptions", "VhdlGenError", "generate", "structural_audit"]


class VhdlGenError(ValueError):
    """Input that cannot be rendered as VHDL."""


@dataclass(frozen=True)
class CodegenOptions:
    state_encoding: str = "binary"  # "binary" | "onehot" | "width"
    explicit_width: int | None = None  # used when state_encoding == "width"
    delay_ns: int = 10
    entity_name: str | None = None
    clock: bool = False

    def __post_init__(self):
        if self.state_encoding not in ("binary", "onehot", "width"):
            raise VhdlGenError(f"unknown state encoding {self.state_encoding!r}")
        if self.state_encoding == "width" and (
            self.explicit_width is None or self.explicit_width < 1
        ):
            raise VhdlGenError("state_encoding 'width' needs explicit_width >= 1")
        if self.delay_ns < 0:
            raise VhdlGenError("delay_ns must be nonnegative")


_VHDL_RESERVED = frozenset(
    """abs access after alias all and architecture array assert attribute begin
    block body buffer bus case component configuration constant disconnect
    downto else elsif end entity exit file for function generate generic group
    guarded if impure in inertial inout is label library linkage literal loop
    map mod nand new next nor not null of on open or others out package port
    postponed procedure process pure range record register reject rem report
    return rol ror select severity shared signal sla sll sra srl subtype then
    to transport type unaffected units until use variable wait when while with
    xnor xor""".split()
)

_VHDL_IDENT = re.compile(r"[A-Za-z](?:_?[A-Za-z0-9])*\Z")


def _check_identifier(name: str, what: str) -> None:
    if _VHDL_IDENT.match(name) and name.lower() not in _VHDL_RESERVED:
        return
    suggestion = re.sub(r"_+", "_", name).strip("_")
    if not suggestion or not suggestion[0].isalpha():
        suggestion = "s_" + suggestion if suggestion else "s"
        suggestion = suggestion.strip("_")
    if suggestion.lower() in _VHDL_RESERVED:
        suggestion += "0"
    raise VhdlGenError(
        f"{what} {name!r} is not a legal VHDL identifier; rename it (for example to "
        f"{suggestion!r})"
    )


def _widths(system: model.System, opts: CodegenOptions) -> list[int]:
    widths = []
    for machine in system.machines:
        n = len(machine.states)
        if opts.state_encoding == "binary":
            widths.append(max(1, (n - 1).bit_length()))
        elif opts.state_encoding == "onehot":
            widths.append(n)
        else:
            if (1 << opts.explicit_width) < n:
                raise VhdlGenError(
                    f"machine {machine.name!r} has {n} states; width "
                    f"{opts.explicit_width} encodes at most {1 << opts.explicit_width}"
                )
            widths.append(opts.explicit_width)
    return widths


def _encode(state_idx: int, width: int, onehot: bool) -> str:
    value = (1 << state_idx) if onehot else state_idx
    return format(value, f"0{width}b")


def _condition(expr: F.BoolExpr) -> str:
    """Fully parenthesized VHDL condition; atoms read the signal lines."""
    if isinstance(expr, F.Atom):
        return f"({expr.symbol.name}='1')"
    if isinstance(expr, F.Not):
        return f"(not {_condition(expr.operand)})"
    if isinstance(expr, F.And):
        return f"({_condition(expr.left)} and {_condition(expr.right)})"
    if isinstance(expr, F.Or):
        return f"({_condition(expr.left)} or {_condition(expr.right)})"
    if isinstance(expr, F.ConstTrue):
        return "(TRUE)"
    if isinstance(expr, F.ConstFalse):
        return "(FALSE)"
    raise VhdlGenError(f"not a formula node: {expr!r}")


def generate(system: model.System, opts: CodegenOptions = CodegenOptions()) -> str:
    """Render the whole system as one entity with one process per machine."""
    report = model.validate(system)
    if not report.ok:
        raise VhdlGenError(
            "system does not validate: " + "; ".join(e.message for e in report.errors)
        )

    env = sorted(model.env_alphabet(system), key=lambda s: s.name)
    produced = sorted(system.produced_symbols(), key=lambda s: s.name)
    entity = opts.entity_name or system.name

    _check_identifier(entity, "entity name")
    for sym in env + produced:
        _check_identifier(sym.name, "symbol")
    for machine in system.machines:
        _check_identifier(machine.name, "machine name")
    if opts.clock and any(s.name.lower() == "clk" for s in env + produced):
        raise VhdlGenError("clock mode reserves the port name 'Clk'")

    widths = _widths(system, opts)
    onehot = opts.state_encoding == "onehot"
    guard_ctx = F.GuardContext(model.declaration_order(system, system.guard_symbols()))

    out = []
    emit = out.append
    emit(f"entity {entity} is")
    port_lines = []
    if opts.clock:
        port_lines.append("    Clk : in BIT")
    for sym in env:
        port_lines.append(f"    {sym.name} : in BIT")
    for sym in produced:
        port_lines.append(f"    {sym.name} : out BIT")
    if port_lines:
        emit("  port (")
        emit(";\n".join(port_lines))
        emit("  );")
    emit(f"end {entity};")
    emit("")
    emit(f"architecture behavior of {entity} is")
    emit("begin")

    for machine, width in zip(system.machines, widths):
        mine = sorted({s for st in machine.states for s in st.outputs}, key=lambda s: s.name)
        init_code = _encode(machine.initial_index, width, onehot)
        emit("")
        emit(f"  {machine.name} : process")
        emit(f'    variable current_state : BIT_VECTOR ({width - 1} downto 0) :="{init_code}";')
        emit(f'    variable newstate : BIT_VECTOR ({width - 1} downto 0) :="{init_code}";')
        for sym in mine:
            emit(f"    variable new{sym.name} : BIT;")
        emit("  begin")
        emit("    loop")
        emit("      case current_state is")
        for idx, state in enumerate(machine.states):
            code = _encode(idx, width, onehot)
            emit(f'        when "{code}" => -- {state.name}')
            arcs = machine.arcs_from(idx)
            overlapping = any(
                guard_ctx.satisfiable(F.and_(a.guard, b.guard))
                for i, a in enumerate(arcs)
                for b in arcs[i + 1 :]
            )
            if overlapping:
                emit("          -- overlapping guards: the first true branch wins")

            def assigns(dst_idx: int, pad: str):
                emit(f'{pad}newstate := "{_encode(dst_idx, width, onehot)}";')
                dst_outputs = machine.states[dst_idx].outputs
                for sym in mine:
                    bit = "1" if sym in dst_outputs else "0"
                    emit(f"{pad}new{sym.name} := '{bit}';")

            if len(arcs) == 1 and arcs[0].guard == F.TRUE:
                assigns(machine.state_index(arcs[0].dst), "          ")
            else:
                for pos, arc in enumerate(arcs):
                    word = "if" if pos == 0 else "elsif"
                    emit(f"          {word} {_condition(arc.guard)} then")
                    assigns(machine.state_index(arc.dst), "            ")
                emit("          else")
                assigns(idx, "            ")
                emit("          end if;")
        emit("      end case;")
        emit("      current_state := newstate;")
        for sym in mine:
            emit(f"      {sym.name} <= new{sym.name};")
        if opts.clock:
            emit("      wait until Clk'event and Clk = '1';")
        else:
            emit(f"      wait for {opts.delay_ns} ns;")
        emit("    end loop;")
        emit(f"  end process {machine.name};")

    emit("")
    emit("end behavior;")
    emit("")
    return "\n".join(out)


@dataclass
class AuditReport:
    problems: list[str] = field(default_factory=list)
    process_count: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems


def structural_audit(vhdl_text: str, system: model.System) -> AuditReport:
    """Token-level self-check of generated VHDL.

    Verifies one process per machine, one port line per symbol, one
    ``when`` branch per state inside its machine's process, and balanced
    if / case / loop / process blocks.
    """
    report = AuditReport()

    labels = re.findall(r"^\s*(\w+)\s*:\s*process\b", vhdl_text, re.M)
    report.process_count = len(labels)
    machine_names = [m.name for m in system.machines]
    if labels != machine_names:
        report.problems.append(
            f"expected one process per machine {machine_names}, found {labels}"
        )

    symbols = sorted(
        model.env_alphabet(system) | system.produced_symbols(), key=lambda s: s.name
    )
    for sym in symbols:
        hits = re.findall(
            rf"^\s*{re.escape(sym.name)} : (?:in|out) BIT[;,]?\s*$", vhdl_text, re.M
        )
        if len(hits) != 1:
            report.problems.append(
                f"symbol {sym.name!r} appears as a port {len(hits)} times, expected once"
            )

    for machine in system.machines:
        block = _process_block(vhdl_text, machine.name)
        if block is None:
            report.problems.append(f"no process block for machine {machine.name!r}")
            continue
        width = None
        m = re.search(r"BIT_VECTOR \((\d+) downto 0\)", block)
        if m:
            width = int(m.group(1)) + 1
        for idx, state in enumerate(machine.states):
            if width is None:
                report.problems.append(
                    f"machine {machine.name!r}: no state vector declaration"
                )
                break
            hits = len(re.findall(rf'when "[01]{{{width}}}" => -- {re.escape(state.name)}\b', block))
            if hits != 1:
                report.problems.append(
                    f"machine {machine.name!r}, state {state.name!r}: {hits} 'when' "
                    "branches, expected exactly one"
                )

    for opener, closer in (
        (r"(?<!end )\bif\b", r"\bend if\b"),
        (r"(?<!end )\bcase\b", r"\bend case\b"),
        (r"(?<!end )\bloop\b", r"\bend loop\b"),
        (r"(?<!end )\bprocess\b", r"\bend process\b"),
    ):
        n_open = len(re.findall(opener, vhdl_text))
        n_close = len(re.findall(closer, vhdl_text))
        if n_open != n_close:
            name = closer.replace(r"\bend ", "").replace(r"\b", "")
            report.problems.append(
                f"unbalanced {name} blocks: {n_open} openers, {n_close} closers"
            )

    return report


def _process_block(vhdl_text: str, label: str) -> str | None:
    start = re.search(rf"^\s*{re.escape(label)}\s*:\s*process\b", vhdl_text, re.M)
    if not start:
        return None
    end = re.search(rf"\bend process {re.escape(label)};", vhdl_text)
    if not end:
        return None
    return vhdl_text[start.start() : end.end()]
