"""Parsers for the system description language and for requirement files.

System files
------------
::

    system   := "system" IDENT "{" machine+ "}"
    machine  := "machine" IDENT "{" "init" IDENT ";" state+ "}"
    state    := "state" IDENT "{" ("out" symlist ";")? arc* "}"
    arc      := "->" IDENT "when" formula ";"
    symlist  := IDENT ("," IDENT)*
    formula  := or ; or := and ("+" and)* ; and := unary ("*" unary)*
    unary    := ("!"|"~") unary | "(" formula ")" | IDENT | "1" | "0"

``//`` starts a comment running to the end of the line.

Requirement files
-----------------
One requirement per line-ish statement::

    IDENT ":" "always" "(" formula "=>" ("next"|"eventually") formula ")" ";"
    "ctl" IDENT ":" ctlformula ";"

In requirement files ``not`` is accepted alongside ``!``/``~``, ``exists``
may prefix ``eventually`` (asking for one witnessing path instead of all
paths), and the glyphs ``⇒``, ``○`` and ``◇`` are aliases for ``=>``,
``next`` and ``eventually``.  CTL formulas use AX EX AF EF AG EG prefix
operators, ``A [ f U g ]`` / ``E [ f U g ]`` until forms, ``=>``, and the
same atom syntax as guards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cosma import formula as F
from cosma import mc
from cosma import model

__all__ = [
    "ParseDiagnostic",
    "ParseError",
    "ParseResult",
    "QueryParseResult",
    "SourceSpan",
    "parse_queries",
    "parse_system",
    "system_to_text",
]


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan | None

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass
class ParseResult:
    system: model.System | None
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.system is not None and not any(
            d.severity == "error" for d in self.diagnostics
        )


@dataclass
class QueryParseResult:
    queries: list = field(default_factory=list)  # mc.Query | mc.CtlQuery
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


# -- lexing ------------------------------------------------------------------

_PUNCT_2 = ("->", "=>")
_PUNCT_1 = "{};:,()*+~![]"
_GLYPHS = {"⇒": "=>", "○": "next", "◇": "eventually"}

_SYSTEM_KEYWORDS = frozenset({"system", "machine", "init", "state", "out", "when"})
_QUERY_KEYWORDS = frozenset({"always", "next", "eventually", "exists", "ctl", "not"})


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "punct" | "const" | "eof"
    text: str
    span: SourceSpan


def _lex(text: str, file: str, glyphs: bool) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span(length: int) -> SourceSpan:
        return SourceSpan(file, line, col, length)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if glyphs and ch in _GLYPHS:
            alias = _GLYPHS[ch]
            kind = "punct" if alias == "=>" else "ident"
            tokens.append(_Token(kind, alias, span(1)))
            i += 1
            col += 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT_2:
            tokens.append(_Token("punct", two, span(2)))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_1:
            tokens.append(_Token("punct", ch, span(1)))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            word = text[i:j]
            if word not in ("0", "1"):
                raise ParseError(f"unexpected number {word!r} (only 0 and 1 are formulas)", span(j - i))
            tokens.append(_Token("const", word, span(len(word))))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], span(j - i)))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", span(1))
    tokens.append(_Token("eof", "", SourceSpan(file, line, col, 0)))
    return tokens


# -- shared token cursor -------------------------------------------------------


class _Cursor:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> _Token:
        return self._tokens[self._pos]

    def take(self) -> _Token:
        tok = self._tokens[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.take()
            return True
        return False

    def expect(self, text: str, what: str | None = None) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            expected = what or f"'{text}'"
            found = "end of input" if tok.kind == "eof" else f"{tok.text!r}"
            raise ParseError(f"expected {expected}, found {found}", tok.span)
        return self.take()

    def expect_ident(self, what: str, reserved: frozenset[str]) -> _Token:
        tok = self.peek()
        if tok.kind != "ident":
            found = "end of input" if tok.kind == "eof" else f"{tok.text!r}"
            raise ParseError(f"expected {what}, found {found}", tok.span)
        if tok.text in reserved:
            raise ParseError(f"keyword {tok.text!r} cannot be used as {what}", tok.span)
        return self.take()


# -- formulas ------------------------------------------------------------------


def _parse_formula(cur: _Cursor, mk_atom, reserved: frozenset[str], allow_not_kw: bool) -> F.BoolExpr:
    return _parse_or(cur, mk_atom, reserved, allow_not_kw)


def _parse_or(cur, mk_atom, reserved, allow_not_kw):
    expr = _parse_and(cur, mk_atom, reserved, allow_not_kw)
    while cur.at("+"):
        cur.take()
        expr = F.Or(expr, _parse_and(cur, mk_atom, reserved, allow_not_kw))
    return expr


def _parse_and(cur, mk_atom, reserved, allow_not_kw):
    expr = _parse_unary(cur, mk_atom, reserved, allow_not_kw)
    while cur.at("*"):
        cur.take()
        expr = F.And(expr, _parse_unary(cur, mk_atom, reserved, allow_not_kw))
    return expr


def _parse_unary(cur, mk_atom, reserved, allow_not_kw):
    tok = cur.peek()
    if tok.text in ("!", "~") or (allow_not_kw and tok.text == "not" and tok.kind == "ident"):
        cur.take()
        return F.Not(_parse_unary(cur, mk_atom, reserved, allow_not_kw))
    if tok.text == "(":
        cur.take()
        expr = _parse_or(cur, mk_atom, reserved, allow_not_kw)
        cur.expect(")")
        return expr
    if tok.kind == "const":
        cur.take()
        return F.TRUE if tok.text == "1" else F.FALSE
    if tok.kind == "ident":
        if tok.text in reserved:
            raise ParseError(f"keyword {tok.text!r} cannot be a symbol", tok.span)
        cur.take()
        return F.Atom(mk_atom(tok))
    found = "end of input" if tok.kind == "eof" else f"{tok.text!r}"
    raise ParseError(f"expected a formula, found {found}", tok.span)


# -- system files --------------------------------------------------------------


def parse_system(text: str, filename: str = "<input>") -> ParseResult:
    """Parse and validate a system description.

    Returns the system together with diagnostics; validation findings are
    folded in, so a result with no error diagnostics is safe to analyze.
    """
    diagnostics: list[ParseDiagnostic] = []
    spans: dict[tuple, SourceSpan] = {}
    try:
        cur = _Cursor(_lex(text, filename, glyphs=False))
        table = F.SymbolTable()
        reserved = _SYSTEM_KEYWORDS

        def mk_atom(tok: _Token) -> F.Symbol:
            return table.intern(tok.text)

        cur.expect("system")
        name_tok = cur.expect_ident("a system name", reserved)
        spans[("system",)] = name_tok.span
        cur.expect("{")
        machines: list[model.Machine] = []
        while not cur.accept("}"):
            machines.append(_parse_machine(cur, table, spans, mk_atom, reserved))
        tail = cur.peek()
        if tail.kind != "eof":
            raise ParseError(f"unexpected {tail.text!r} after the system", tail.span)
        if not machines:
            raise ParseError("a system needs at least one machine", name_tok.span)
        table.freeze()
        system = model.System(name_tok.text, machines, table)
    except ParseError as exc:
        diagnostics.append(ParseDiagnostic("error", exc.message, exc.span))
        return ParseResult(None, diagnostics)

    report = model.validate(system)
    fallback = spans[("system",)]
    for entry in report.entries:
        span = (
            spans.get(("state", entry.machine, entry.state))
            or spans.get(("machine", entry.machine))
            or fallback
        )
        diagnostics.append(ParseDiagnostic(entry.severity, entry.message, span))
    if report.errors:
        return ParseResult(None, diagnostics)
    return ParseResult(system, diagnostics)


def _parse_machine(cur, table, spans, mk_atom, reserved) -> model.Machine:
    cur.expect("machine")
    name_tok = cur.expect_ident("a machine name", reserved)
    spans[("machine", name_tok.text)] = name_tok.span
    cur.expect("{")
    cur.expect("init")
    init_tok = cur.expect_ident("the initial state name", reserved)
    cur.expect(";")
    states: list[model.State] = []
    arcs: list[model.Arc] = []
    while not cur.accept("}"):
        if not cur.at("state"):
            raise ParseError("expected 'state' or '}'", cur.peek().span)
        _parse_state(cur, table, spans, mk_atom, reserved, name_tok.text, states, arcs)
    if not states:
        raise ParseError(f"machine {name_tok.text!r} has no states", name_tok.span)
    return model.Machine(name_tok.text, states, init_tok.text, arcs)


def _parse_state(cur, table, spans, mk_atom, reserved, machine_name, states, arcs):
    cur.expect("state")
    name_tok = cur.expect_ident("a state name", reserved)
    spans[("state", machine_name, name_tok.text)] = name_tok.span
    cur.expect("{")
    outputs: list[F.Symbol] = []
    if cur.accept("out"):
        outputs.append(table.intern(cur.expect_ident("an output symbol", reserved).text))
        while cur.accept(","):
            outputs.append(table.intern(cur.expect_ident("an output symbol", reserved).text))
        cur.expect(";")
    while cur.accept("->"):
        dst_tok = cur.expect_ident("a target state name", reserved)
        cur.expect("when")
        guard = _parse_formula(cur, mk_atom, reserved, allow_not_kw=False)
        cur.expect(";")
        arcs.append(model.Arc(name_tok.text, dst_tok.text, guard))
    cur.expect("}")
    states.append(model.State(name_tok.text, frozenset(outputs)))


# -- requirement files ---------------------------------------------------------

_CTL_UNARY = {"AX", "EX", "AF", "EF", "AG", "EG"}


def parse_queries(
    text: str, system: model.System | None = None, filename: str = "<queries>"
) -> QueryParseResult:
    """Parse a requirement file into temporal queries and CTL requirements.

    When ``system`` is given, atoms that name no symbol of the system are
    reported as warnings (they may well be environment inputs, so they are
    not errors).
    """
    result = QueryParseResult()
    reserved = _QUERY_KEYWORDS
    try:
        cur = _Cursor(_lex(text, filename, glyphs=True))
        seen_names: set[str] = set()
        while cur.peek().kind != "eof":
            if cur.at("ctl"):
                entry = _parse_ctl_query(cur, reserved)
            else:
                entry = _parse_always_query(cur, reserved)
            if entry.name in seen_names:
                result.diagnostics.append(
                    ParseDiagnostic("warning", f"duplicate query name {entry.name!r}", None)
                )
            seen_names.add(entry.name)
            result.queries.append(entry)
    except ParseError as exc:
        result.diagnostics.append(ParseDiagnostic("error", exc.message, exc.span))
        return result

    if system is not None:
        produced = system.produced_symbols()
        for entry in result.queries:
            if isinstance(entry, mc.Query):
                used = F.atoms(entry.antecedent) | F.atoms(entry.consequent)
                unknown = sorted(s.name for s in used if s not in system.symbols)
                for name in unknown:
                    result.diagnostics.append(
                        ParseDiagnostic(
                            "warning",
                            f"query {entry.name!r} uses symbol {name!r} that the system "
                            "never mentions (it may be environmental)",
                            None,
                        )
                    )
            else:
                # CTL atoms are read against node outputs only
                foreign = sorted(s.name for s in mc.ctl_atoms(entry.formula) - produced)
                for name in foreign:
                    result.diagnostics.append(
                        ParseDiagnostic(
                            "warning",
                            f"requirement {entry.name!r}: no machine produces {name!r}, "
                            "so the atom is false at every state",
                            None,
                        )
                    )
    return result


def _mk_plain_atom(tok: _Token) -> F.Symbol:
    return F.Symbol(tok.text)


def _parse_always_query(cur: _Cursor, reserved) -> mc.Query:
    name_tok = cur.expect_ident("a query name", reserved)
    cur.expect(":")
    cur.expect("always")
    cur.expect("(")
    antecedent = _parse_formula(cur, _mk_plain_atom, reserved, allow_not_kw=True)
    cur.expect("=>")
    # the mode keyword may sit inside its own parentheses: "=> (next HY)"
    wrapped = False
    if cur.at("(") and cur._tokens[cur._pos + 1].text in ("next", "eventually", "exists"):
        cur.take()
        wrapped = True
    universal = True
    if cur.accept("exists"):
        universal = False
    if cur.accept("next"):
        mode = "next"
    elif cur.accept("eventually"):
        mode = "eventually"
    else:
        raise ParseError("expected 'next' or 'eventually' after '=>'", cur.peek().span)
    if not universal and mode != "eventually":
        raise ParseError("'exists' applies to 'eventually' only", cur.peek().span)
    consequent = _parse_formula(cur, _mk_plain_atom, reserved, allow_not_kw=True)
    if wrapped:
        cur.expect(")")
    cur.expect(")")
    cur.expect(";")
    return mc.Query(name_tok.text, antecedent, mode, consequent, universal=universal)


def _parse_ctl_query(cur: _Cursor, reserved) -> mc.CtlQuery:
    cur.expect("ctl")
    name_tok = cur.expect_ident("a requirement name", reserved)
    cur.expect(":")
    formula_ = _parse_ctl_implies(cur, reserved)
    cur.expect(";")
    return mc.CtlQuery(name_tok.text, formula_)


def _parse_ctl_implies(cur, reserved):
    left = _parse_ctl_or(cur, reserved)
    if cur.accept("=>"):
        return mc.CtlImplies(left, _parse_ctl_implies(cur, reserved))
    return left


def _parse_ctl_or(cur, reserved):
    expr = _parse_ctl_and(cur, reserved)
    while cur.at("+"):
        cur.take()
        expr = mc.CtlOr(expr, _parse_ctl_and(cur, reserved))
    return expr


def _parse_ctl_and(cur, reserved):
    expr = _parse_ctl_unary(cur, reserved)
    while cur.at("*"):
        cur.take()
        expr = mc.CtlAnd(expr, _parse_ctl_unary(cur, reserved))
    return expr


def _parse_ctl_unary(cur, reserved):
    tok = cur.peek()
    if tok.text in ("!", "~") or (tok.kind == "ident" and tok.text == "not"):
        cur.take()
        return mc.CtlNot(_parse_ctl_unary(cur, reserved))
    if tok.kind == "ident" and tok.text in _CTL_UNARY:
        cur.take()
        sub = _parse_ctl_unary(cur, reserved)
        return {
            "AX": mc.CtlAX, "EX": mc.CtlEX,
            "AF": mc.CtlAF, "EF": mc.CtlEF,
            "AG": mc.CtlAG, "EG": mc.CtlEG,
        }[tok.text](sub)
    if tok.kind == "ident" and tok.text in ("A", "E") and cur._tokens[cur._pos + 1].text == "[":
        cur.take()
        cur.expect("[")
        left = _parse_ctl_implies(cur, reserved)
        until_tok = cur.peek()
        if until_tok.kind != "ident" or until_tok.text != "U":
            raise ParseError("expected 'U' in the until form", until_tok.span)
        cur.take()
        right = _parse_ctl_implies(cur, reserved)
        cur.expect("]")
        return (mc.CtlAU if tok.text == "A" else mc.CtlEU)(left, right)
    if tok.text == "(":
        cur.take()
        expr = _parse_ctl_implies(cur, reserved)
        cur.expect(")")
        return expr
    if tok.kind == "const":
        cur.take()
        return mc.CtlConst(tok.text == "1")
    if tok.kind == "ident":
        if tok.text in reserved:
            raise ParseError(f"keyword {tok.text!r} cannot be a symbol", tok.span)
        cur.take()
        return mc.CtlAtom(F.Symbol(tok.text))
    found = "end of input" if tok.kind == "eof" else f"{tok.text!r}"
    raise ParseError(f"expected a CTL formula, found {found}", tok.span)


# -- pretty printing -----------------------------------------------------------


def system_to_text(system: model.System) -> str:
    """Render a system back to the description language.

    Reparsing the output yields a structurally identical system (state
    output sets are unordered, so they are printed sorted).
    """
    lines = [f"system {system.name} {{"]
    for machine in system.machines:
        lines.append(f"  machine {machine.name} {{")
        lines.append(f"    init {machine.initial};")
        for idx, state in enumerate(machine.states):
            lines.append(f"    state {state.name} {{")
            if state.outputs:
                names = ", ".join(sorted(s.name for s in state.outputs))
                lines.append(f"      out {names};")
            for arc in machine.arcs_from(idx):
                lines.append(f"      -> {arc.dst} when {F.to_text(arc.guard)};")
            lines.append("    }")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
