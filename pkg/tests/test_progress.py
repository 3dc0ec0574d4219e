import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mumall.fixtures import FIXTURES, fixture
from mumall.formula import fl_closure, negate, parse_formula as P, unfold
from mumall.progress import (Lasso, OracleBudgetExceeded, Thread, WeakThreadError,
                             brute_force_progressivity, check_progressivity,
                             classify_structural, classify_thread, completeness_bound,
                             dominant_fixpoint, lasso_is_bad, lasso_traces, step_relations)
from mumall.randgen import random_lasso_thread

from strategies import graphs

A = P("mu X. nu Y. X + Y")
B = unfold("mu", A)
AB = P(f"(mu X. nu Y. X + Y) + (nu Y. (mu X. nu Y. X + Y) + Y)")


class TestThreads:
    def test_left_summand_loop_is_bad(self):
        t = Thread((), ((A, 0), (B, 0), (AB, 0)))
        assert classify_thread(t) == "bad"
        assert classify_structural(t) == "bad"
        assert dominant_fixpoint(t) == A

    def test_right_summand_loop_is_good(self):
        t = Thread((), ((B, 0), (AB, 1)))
        assert classify_thread(t) == "good"
        assert classify_thread(t.dual()) == "bad"

    def test_weak_threads(self):
        with pytest.raises(WeakThreadError):
            classify_thread(Thread(((A, 0),), ()))
        with pytest.raises(WeakThreadError):
            classify_thread(Thread((), ((P("1 * 1"), 0),)))

    @given(st.integers(0, 10**6))
    def test_duality_and_structural_agreement(self, seed):
        t, closure = random_lasso_thread(random.Random(seed))
        verdict = classify_thread(t, closure)
        dual = classify_thread(t.dual(), fl_closure([negate(f) for f in closure.formulas]))
        assert {verdict, dual} == {"good", "bad"}
        assert classify_structural(t) == verdict


class TestChecker:
    @pytest.mark.parametrize("name", list(FIXTURES))
    def test_fixture_verdicts(self, name):
        g = fixture(name)
        assert check_progressivity(g).progressing == FIXTURES[name][1]

    @pytest.mark.parametrize("name, loop", [
        ("left", ("m",)), ("centre_mu", ("a", "b", "p")), ("ic_case1", ("m",)),
        ("ic_case3", ("m",)), ("external", ("m",)),
    ])
    def test_counterexamples(self, name, loop):
        g = fixture(name)
        v = check_progressivity(g)
        cx = v.counterexample
        assert cx.loop == loop
        cx.check(g)
        assert lasso_is_bad(g, cx)

    def test_witnesses_are_even(self):
        v = check_progressivity(fixture("centre_nu"))
        assert v.witnesses and all(w["parity"] == "even" for w in v.witnesses)
        assert v.to_json()["progressing"] is True

    def test_step_relations_of_a_loop(self):
        rels = step_relations(fixture("left"))
        rel = rels[("l", 0)]
        assert rel.target == "l"
        principal = [ev for i, j, ev in rel.pairs if ev.rank is not None]
        assert len(principal) == 1 and principal[0].rank % 2 == 0

    def test_oracle_on_fixtures(self):
        for name in FIXTURES:
            g = fixture(name)
            assert brute_force_progressivity(g).progressing == FIXTURES[name][1], name

    def test_oracle_budget(self):
        with pytest.raises(OracleBudgetExceeded):
            brute_force_progressivity(fixture("external"), 40, limit=1)

    @settings(max_examples=40)
    @given(graphs)
    def test_checker_matches_oracle(self, g):
        try:
            o = brute_force_progressivity(g, completeness_bound(g), limit=5_000)
        except OracleBudgetExceeded:
            assume(False)
        assert check_progressivity(g).progressing == o.progressing

    @settings(max_examples=40)
    @given(graphs)
    def test_tiebreak_invariance(self, g):
        assert (check_progressivity(g, "lex").progressing
                == check_progressivity(g, "revlex").progressing)


class TestLassoTraces:
    def test_left_branch_traces(self):
        g = fixture("left")
        b = Lasso(("r",), (0,), ("l",), (0,))
        traces = lasso_traces(g, b)
        internal = [t for t in traces if t.internal]
        external = [t for t in traces if not t.internal]
        assert len(internal) == 1 and classify_thread(internal[0].thread) == "good"
        assert len(external) == 1 and not external[0].thread.loop

    def test_lasso_validation(self):
        with pytest.raises(ValueError):
            Lasso((), (), (), ())
        with pytest.raises(ValueError):
            Lasso(("r",), (1,), ("l",), (0,)).check(fixture("left"))
