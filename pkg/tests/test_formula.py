import pytest
from hypothesis import given

from mumall.formula import (FormulaSyntaxError, FreeVariableError, Mu, Nu, Var, fl_closure,
                            free_vars, negate, parse_formula, render_formula, size,
                            substitute, unfold)

from strategies import formulas

P = parse_formula


def test_parse_units_and_connectives():
    f = P("((1 * bot) @ (top + 0)) & 1")
    assert render_formula(P(render_formula(f))) == render_formula(f)
    assert size(P("1 * bot")) == 3


def test_alpha_equivalence():
    assert P("nu X. X * 1") == P("nu Y. Y * 1")
    assert hash(P("mu X. X")) == hash(P("mu Z. Z"))
    assert P("nu X. mu Y. X + Y") != P("nu X. mu Y. Y + X")


def test_negation_examples():
    assert negate(P("1")) == P("bot")
    assert negate(P("top")) == P("0")
    assert negate(P("nu X. X * 1")) == P("mu X. X @ bot")
    assert negate(P("1 + top")) == P("bot & 0")


def test_open_formulas_rejected_by_default():
    with pytest.raises(FreeVariableError):
        P("X * 1")
    assert free_vars(P("X * Y", allow_open=True)) == {"X", "Y"}


@pytest.mark.parametrize("text", ["1 *", "(1", "mu . X", "1 $ 1", "nu X X", "1 * bot @ top"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        P(text)


def test_unfold():
    a = P("mu X. nu Y. X + Y")
    assert unfold("mu", a) == P(f"nu Y. ({render_formula(a)}) + Y")
    with pytest.raises(ValueError):
        unfold("nu", a)


def test_closure_of_alternating_formula():
    # mu X. nu Y. (X + Y): A, B = nu Y.(A + Y), A + B; one cycle.
    a = P("mu X. nu Y. X + Y")
    b = unfold("mu", a)
    c = fl_closure([a])
    assert c.formulas == {a, b, P(f"({render_formula(a)}) + ({render_formula(b)})")}
    assert len(c.eq_classes()) == 1
    # A occurs inside B, so A has the higher priority.
    assert c.priority_less(b, a)
    assert c.rank[a] < c.rank[b]
    assert c.parity(a) == "odd" and c.parity(b) == "even"


def test_closure_order_across_classes():
    c = fl_closure([P("nu X. X * 1")])
    nu = P("nu X. X * 1")
    assert c.fl_less(P("1"), nu)
    assert c.rank[nu] % 2 == 0
    with pytest.raises(ValueError):
        c.parity(P("1"))


def test_tiebreaks_are_total_orders():
    seeds = [P("nu X. X"), P("mu Y. Y"), P("1 @ bot")]
    for tb in ("lex", "revlex"):
        c = fl_closure(seeds, tiebreak=tb)
        assert sorted(c.rank.values()) == sorted(set(c.rank.values()))
    with pytest.raises(ValueError):
        fl_closure(seeds, tiebreak="bogus")


@given(formulas())
def test_negation_is_an_involution(f):
    assert negate(negate(f)) == f


@given(formulas())
def test_render_parse_roundtrip(f):
    assert P(render_formula(f)) == f


@given(formulas(bound=("X",)), formulas())
def test_negation_commutes_with_substitution(phi, psi):
    assert negate(substitute(phi, "X", psi)) == substitute(negate(phi), "X", negate(psi))


@given(formulas())
def test_closure_saturation_is_idempotent(f):
    c = fl_closure([f])
    assert fl_closure(c.formulas).formulas == c.formulas


@given(formulas())
def test_fixpoint_ranks_have_matching_parity(f):
    c = fl_closure([f])
    for g in c.formulas:
        if isinstance(g, Nu):
            assert c.rank[g] % 2 == 0
        elif isinstance(g, Mu):
            assert c.rank[g] % 2 == 1
