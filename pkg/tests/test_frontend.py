import random

import pytest

from cosma import assets, frontend, mc
from cosma import formula as F
from cosma import model
from gensys import random_system

TINY = """
system tiny {
  machine only {
    init off;
    state off {
      -> on when go;
      -> off when ~go;
    }
    state on {
      out lit;
      -> on when 1;
    }
  }
}
"""


class TestSystemParsing:
    def test_bundled_model_shape(self, tlc_system):
        assert [m.name for m in tlc_system.machines] == ["Controller", "TimerTS", "TimerTL"]
        assert [len(m.states) for m in tlc_system.machines] == [4, 3, 3]

    def test_empty_file(self):
        result = frontend.parse_system("", "empty.csm")
        assert not result.ok
        assert "expected 'system'" in result.diagnostics[0].message

    def test_tiny_model(self):
        result = frontend.parse_system(TINY, "tiny.csm")
        assert result.ok
        machine = result.system.machines[0]
        assert machine.initial == "off"
        assert [a.dst for a in machine.arcs] == ["on", "off", "on"]
        assert model.output_valuation(result.system, (1,)) == frozenset({F.Symbol("lit")})

    def test_misspelled_guard_symbol_becomes_environmental(self):
        # TimL instead of the produced TimTL: parses, but the never-produced
        # symbol shows up in the environment alphabet and gets a lint note
        text = """
        system drift {
          machine m {
            init a;
            state a { -> b when TimL; -> a when ~TimL; }
            state b { out TimTL; -> a when 1; }
          }
        }
        """
        result = frontend.parse_system(text, "drift.csm")
        assert result.ok
        env = {s.name for s in model.env_alphabet(result.system)}
        assert env == {"TimL"}
        notes = [d for d in result.diagnostics if "TimL" in d.message]
        assert notes and notes[0].severity == "warning"
        assert "never produced" in notes[0].message

    def test_syntax_error_has_position(self):
        text = "system x {\n  machine m {\n    init a\n"
        result = frontend.parse_system(text, "x.csm")
        assert not result.ok
        diag = result.diagnostics[0]
        assert diag.span is not None
        assert diag.span.line == 4  # the missing ';' is noticed at end of input

    def test_validation_errors_become_diagnostics(self):
        text = "system x { machine m { init ghost; state s { -> s when 1; } } }"
        result = frontend.parse_system(text, "x.csm")
        assert result.system is None
        assert any("ghost" in d.message for d in result.diagnostics if d.severity == "error")

    def test_keyword_cannot_name_a_state(self):
        text = "system x { machine m { init state; state state { } } }"
        result = frontend.parse_system(text, "x.csm")
        assert not result.ok

    def test_trailing_garbage_rejected(self):
        result = frontend.parse_system(TINY + "leftover", "tiny.csm")
        assert not result.ok

    def test_comments_are_skipped(self):
        result = frontend.parse_system("// hello\n" + TINY, "tiny.csm")
        assert result.ok


class TestRoundTrip:
    def assert_same_structure(self, a: model.System, b: model.System):
        assert a.name == b.name
        assert len(a.machines) == len(b.machines)
        for ma, mb in zip(a.machines, b.machines):
            assert ma.name == mb.name
            assert ma.initial == mb.initial
            assert [(s.name, s.outputs) for s in ma.states] == [
                (s.name, s.outputs) for s in mb.states
            ]
            assert ma.arcs == mb.arcs

    def test_bundled_models(self, tlc_system, tlc_car_system):
        for system in (tlc_system, tlc_car_system):
            text = frontend.system_to_text(system)
            reparsed = frontend.parse_system(text, "roundtrip.csm")
            assert reparsed.ok
            self.assert_same_structure(system, reparsed.system)

    def test_random_systems(self):
        rng = random.Random(21)
        for _ in range(12):
            system = random_system(rng)
            text = frontend.system_to_text(system)
            reparsed = frontend.parse_system(text, "roundtrip.csm")
            assert reparsed.ok, [str(d) for d in reparsed.diagnostics]
            self.assert_same_structure(system, reparsed.system)


class TestQueryParsing:
    def test_next_query(self):
        res = frontend.parse_queries("q1: always (HG * Car * TimTL => next HY);")
        assert res.ok
        (query,) = res.queries
        assert isinstance(query, mc.Query)
        assert query.mode == "next" and query.universal
        assert F.to_text(query.antecedent) == "HG * Car * TimTL"
        assert F.to_text(query.consequent) == "HY"

    def test_eventually_query(self):
        res = frontend.parse_queries("q6: always (HY * TimTS => eventually (HR * FG));")
        (query,) = res.queries
        assert query.mode == "eventually" and query.universal
        assert F.to_text(query.consequent) == "HR * FG"

    def test_trivial_query(self):
        res = frontend.parse_queries("t: always (1 => next 1);")
        assert res.ok
        (query,) = res.queries
        assert query.antecedent == F.TRUE and query.consequent == F.TRUE

    def test_exists_variant(self):
        res = frontend.parse_queries("e: always (HG => exists eventually FG);")
        (query,) = res.queries
        assert query.mode == "eventually" and not query.universal

    def test_exists_next_rejected(self):
        res = frontend.parse_queries("e: always (HG => exists next FG);")
        assert not res.ok

    def test_glyph_aliases(self):
        res = frontend.parse_queries("g: always ((HG * Car * TimTL) ⇒ (○ HY));")
        assert res.ok, [str(d) for d in res.diagnostics]
        (query,) = res.queries
        assert query.mode == "next"
        assert F.to_text(query.consequent) == "HY"
        res2 = frontend.parse_queries("h: always ((HY * TimTS) ⇒ (◇ (HR * FG)));")
        assert res2.ok
        assert res2.queries[0].mode == "eventually"

    def test_not_keyword_in_queries(self):
        res = frontend.parse_queries("n: always (FG * not Car => next FY);")
        assert res.ok
        assert F.to_text(res.queries[0].antecedent) == "FG * ~Car"

    def test_ctl_escape_form(self):
        res = frontend.parse_queries("ctl lights: AG (HG + HY + HR);")
        assert res.ok
        (req,) = res.queries
        assert isinstance(req, mc.CtlQuery)
        assert isinstance(req.formula, mc.CtlAG)

    def test_ctl_until(self):
        res = frontend.parse_queries("ctl u: A [ FR U FG ];")
        assert res.ok
        assert isinstance(res.queries[0].formula, mc.CtlAU)
        res = frontend.parse_queries("ctl v: E [ 1 U HY ];")
        assert isinstance(res.queries[0].formula, mc.CtlEU)

    def test_ctl_implication_and_nesting(self):
        res = frontend.parse_queries("ctl i: AG (Car => EF FG);")
        assert res.ok
        inner = res.queries[0].formula
        assert isinstance(inner, mc.CtlAG)
        assert isinstance(inner.sub, mc.CtlImplies)

    def test_unknown_symbol_warning_with_system(self, tlc_system):
        res = frontend.parse_queries(
            "w: always (HG * TimL => next HY);", system=tlc_system
        )
        assert res.ok  # warnings only
        assert any("TimL" in d.message for d in res.diagnostics)

    def test_bundled_suite_known_symbols_only(self, tlc_system):
        res = frontend.parse_queries(assets.text("tlc_queries.tq"), system=tlc_system)
        assert res.ok
        assert res.diagnostics == []
        assert [q.name for q in res.queries] == [f"q{i}" for i in range(1, 11)]

    def test_duplicate_names_warn(self):
        res = frontend.parse_queries("a: always (1 => next 1); a: always (1 => next 1);")
        assert any("duplicate" in d.message for d in res.diagnostics)

    def test_bad_query_syntax(self):
        res = frontend.parse_queries("q1 always (HG => next HY);")
        assert not res.ok
        assert res.diagnostics[0].span is not None
