import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosma import formula as F
from oracles import all_valuations, brute_satisfiable

a, b, c, d, e, f = (F.Symbol(n) for n in "abcdef")


def exprs(symbols, max_leaves=12):
    leaves = st.sampled_from([F.Atom(s) for s in symbols] + [F.TRUE, F.FALSE])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(F.Not, sub), st.builds(F.And, sub, sub), st.builds(F.Or, sub, sub)
        ),
        max_leaves=max_leaves,
    )


class TestEvaluate:
    def test_neither_a_nor_b(self):
        neither = F.And(F.Not(F.Atom(a)), F.Not(F.Atom(b)))
        assert F.evaluate(neither, frozenset())
        assert not F.evaluate(neither, {a})
        assert not F.evaluate(neither, {a, b})

    def test_const_true_under_any_valuation(self):
        for valuation in all_valuations({a, b, c}):
            assert F.evaluate(F.TRUE, valuation)

    def test_disjunction_with_one_true_disjunct(self):
        assert F.evaluate(F.Or(F.Atom(a), F.Atom(b)), {b})

    def test_absent_symbols_are_false(self):
        assert not F.evaluate(F.Atom(a), {b, c})


class TestResidual:
    def test_fixed_true_conjunct_drops_out(self):
        car, timtl = F.Symbol("Car"), F.Symbol("TimTL")
        guard = F.And(F.Atom(car), F.Atom(timtl))
        assert F.residual(guard, {timtl: True}) == F.Atom(car)

    def test_negation_of_fixed_false_is_const_true(self):
        startts = F.Symbol("StartTS")
        assert F.residual(F.Not(F.Atom(startts)), {startts: False}) == F.TRUE

    def test_disjunction_folds_false_disjunct(self):
        assert F.residual(F.Or(F.Atom(a), F.Atom(b)), {a: False}) == F.Atom(b)

    @given(
        expr=exprs([a, b, c, d, e, f]),
        fixed_bits=st.tuples(st.booleans(), st.booleans(), st.booleans()),
        env_bits=st.tuples(st.booleans(), st.booleans(), st.booleans()),
    )
    def test_residual_agrees_with_eval(self, expr, fixed_bits, env_bits):
        fixed = dict(zip((a, b, c), fixed_bits))
        env = {s for s, bit in zip((d, e, f), env_bits) if bit}
        combined = {s for s, bit in fixed.items() if bit} | env
        assert F.evaluate(F.residual(expr, fixed), env) == F.evaluate(expr, combined)

    @given(expr=exprs([a, b, c, d]), bits=st.tuples(st.booleans(), st.booleans()))
    def test_residual_idempotent(self, expr, bits):
        fixed = dict(zip((a, b), bits))
        once = F.residual(expr, fixed)
        assert F.residual(once, fixed) == once

    @given(expr=exprs([a, b, c]), bits=st.tuples(st.booleans(), st.booleans()))
    def test_residual_removes_fixed_atoms(self, expr, bits):
        fixed = dict(zip((a, b), bits))
        assert not (F.atoms(F.residual(expr, fixed)) & set(fixed))


class TestSatisfiable:
    def test_contradiction(self):
        assert not F.satisfiable(F.And(F.Atom(a), F.Not(F.Atom(a))), {a})

    def test_const_true_over_empty_alphabet(self):
        assert F.satisfiable(F.TRUE, set())
        assert not F.satisfiable(F.FALSE, set())

    def test_car_and_not_timtl(self):
        car, tautl, timtl = F.Symbol("Car"), F.Symbol("tauTL"), F.Symbol("TimTL")
        guard = F.And(F.Atom(car), F.Not(F.Atom(timtl)))
        alphabet = {car, tautl, timtl}
        assert brute_satisfiable(guard, alphabet)  # 8 valuations
        assert F.satisfiable(guard, alphabet)

    def test_atom_outside_alphabet_rejected(self):
        with pytest.raises(F.FormulaError):
            F.satisfiable(F.Atom(a), {b})

    @settings(deadline=None)
    @given(expr=exprs([a, b, c, d, e]))
    def test_matches_brute_force(self, expr):
        alphabet = {a, b, c, d, e}
        assert F.satisfiable(expr, alphabet) == brute_satisfiable(expr, alphabet)

    def test_ten_symbol_alphabet_matches_brute_force(self):
        syms = [F.Symbol(f"s{i}") for i in range(10)]
        expr = F.And(
            F.Or(F.Atom(syms[0]), F.Not(F.Atom(syms[9]))),
            F.Or(F.Atom(syms[4]), F.Atom(syms[7])),
        )
        assert F.satisfiable(expr, syms) == brute_satisfiable(expr, syms)
        contradiction = F.And(expr, F.Not(expr))
        assert F.satisfiable(contradiction, syms) == brute_satisfiable(contradiction, syms)


class TestText:
    def test_precedence(self):
        expr = F.And(F.Or(F.Atom(a), F.Atom(b)), F.Atom(c))
        assert F.to_text(expr) == "(a + b) * c"
        expr = F.Or(F.Atom(a), F.And(F.Atom(b), F.Atom(c)))
        assert F.to_text(expr) == "a + b * c"

    def test_negation_parenthesizes_compounds(self):
        assert F.to_text(F.Not(F.And(F.Atom(a), F.Atom(b)))) == "~(a * b)"
        assert F.to_text(F.Not(F.Not(F.Atom(a)))) == "~~a"

    def test_constants(self):
        assert F.to_text(F.TRUE) == "1"
        assert F.to_text(F.FALSE) == "0"

    def test_right_nesting_is_visible(self):
        nested = F.Or(F.Atom(a), F.Or(F.Atom(b), F.Atom(c)))
        flat = F.Or(F.Or(F.Atom(a), F.Atom(b)), F.Atom(c))
        assert F.to_text(nested) == "a + (b + c)"
        assert F.to_text(flat) == "a + b + c"


class TestSymbols:
    def test_interning_is_stable(self):
        table = F.SymbolTable()
        first = table.intern("Car")
        second = table.intern("Car")
        assert first is second
        assert table.id_of("Car") == 0

    def test_frozen_table_rejects_new_names(self):
        table = F.SymbolTable()
        table.intern("x")
        table.freeze()
        assert table.intern("x").name == "x"
        with pytest.raises(F.FormulaError):
            table.intern("y")

    def test_bad_names_rejected(self):
        with pytest.raises(F.FormulaError):
            F.Symbol("2fast")
        with pytest.raises(F.FormulaError):
            F.Symbol("no-dashes")

    def test_smart_constructors_fold_constants_only(self):
        assert F.and_(F.Atom(a), F.TRUE) == F.Atom(a)
        assert F.and_(F.Atom(a), F.FALSE) == F.FALSE
        assert F.or_(F.Atom(a), F.FALSE) == F.Atom(a)
        assert F.or_(F.Atom(a), F.TRUE) == F.TRUE
        assert F.not_(F.TRUE) == F.FALSE
        # no boolean simplification beyond constants
        twice = F.and_(F.Atom(a), F.Atom(a))
        assert twice == F.And(F.Atom(a), F.Atom(a))
