import pytest

from mumall.cutelim import BudgetExhausted, normalize
from mumall.fixtures import R, build, fixture
from mumall.icsets import (SelectorExhausted, check_coherence, check_external_progressivity,
                           covering, enumerate_lassos, external_progressivity_witness,
                           frontier_evolution, internal_threads, meet, same_thread, unroll,
                           verify_ic_candidate)
from mumall.progress import Lasso, Thread, check_progressivity, classify_thread
from mumall.formula import parse_formula as P

B = Lasso(("r",), (0,), ("l",), (0,))   # left loop
C = Lasso(("r",), (1,), ("m",), (0,))   # right loop


def run(g, strategy="first", budget=600, wrap=False):
    events = []
    try:
        for ev, _ in normalize(g, budget=budget, auto_wrap=wrap, strategy=strategy):
            events.append(ev)
    except BudgetExhausted:
        pass
    return events


def tau_of(g, b):
    (_, tau), = internal_threads(g, b)
    return tau


class TestFrontiers:
    def test_id_one_run_terminates(self):
        ft = frontier_evolution(run(fixture("id_1"), wrap=True))
        assert ft.terminated and not ft.proper
        # d and the two identities of its conclusion bot, 1
        assert max(len(f) for f in ft.frontiers) == 3

    def test_stalled_cut_advances_on_both_loops(self):
        g = fixture("ic_case1")
        events = run(g)
        ft = frontier_evolution(events)
        assert ft.proper and not ft.terminated
        cov = covering(g, events)
        deepest = max(len(p) for p in cov.positions)
        assert deepest > 100
        assert {p[:1] for p in cov.positions if len(p) > deepest // 2} == {(0,), (1,)}

    def test_selector_exhaustion(self):
        events = run(fixture("id_plus"), wrap=True)
        assert any(len(ev.results) > 1 for ev in events)
        with pytest.raises(SelectorExhausted):
            frontier_evolution(events, "")
        with pytest.raises(ValueError):
            frontier_evolution(events, "2")

    def test_three_coverings_on_the_inactive_case(self):
        g = fixture("ic_case4")
        covs = {s: covering(g, run(g, s)).nodes for s in ("first", "last", "alternate")}
        assert covs == {"first": {"r", "l"}, "last": {"r", "m"}, "alternate": {"r", "l", "m"}}

    @pytest.mark.parametrize("case, nodes", [(2, {"r", "m"}), (3, {"r", "l"})])
    def test_one_sided_cases(self, case, nodes):
        g = fixture(f"ic_case{case}")
        assert covering(g, run(g, "alternate")).nodes == nodes

    def test_ic_set_no_run_visits(self):
        g = fixture("ic_remark")
        assert verify_ic_candidate(g, g.nodes).ok
        for s in ("first", "last", "alternate"):
            assert "l1" not in covering(g, run(g, s)).nodes


class TestCoherence:
    def test_case_one_pair_is_coherent(self):
        g = fixture("ic_case1")
        tau = tau_of(g, B)
        assert check_coherence(g, B, C, tau)
        assert check_coherence(g, C, B, tau.dual())

    def test_weak_partner_is_not_coherent(self):
        g = fixture("ic_case2")
        assert not check_coherence(g, B, C, tau_of(g, B))

    def test_meet_at_a_tensor(self):
        g = build({
            "r": (["(nu X. X) * (nu X. X)"], R("tensor", principal=0, left_len=0), ["n", "n"]),
            "n": (["nu X. X"], R("nu", principal=0), ["n"]),
        }, "r")
        b, c = Lasso(("r",), (0,), ("n",), (0,)), Lasso(("r",), (1,), ("n",), (0,))
        assert meet(b, c) == 0
        assert not check_coherence(g, b, c, Thread((), ((P("nu X. X"), 0),)))

    def test_identical_branches_do_not_meet(self):
        assert meet(B, unroll(B, 4)) is None

    def test_symmetry_on_fixture_lassos(self):
        for name in ("left", "ic_case1", "ic_case2", "ic_case3", "external", "cut_loop"):
            g = fixture(name)
            ls = enumerate_lassos(g, None, 8)
            for b in ls:
                for _, tau in internal_threads(g, b):
                    for c in ls:
                        assert check_coherence(g, b, c, tau) == check_coherence(g, c, b, tau.dual())

    def test_same_thread_compares_words(self):
        nu = (P("nu X. X"), 0)
        assert same_thread(Thread((nu,), (nu,)), Thread((), (nu, nu)))
        assert not same_thread(Thread((), (nu,)), Thread((), ()))


class TestVerification:
    def test_pair_is_ic(self):
        rep = verify_ic_candidate(fixture("ic_case1"), {"r", "l", "m"}, 20)
        assert rep.ok and rep.to_json()["status"] == "no violation up to bound"

    def test_single_branch_is_not_ic(self):
        rep = verify_ic_candidate(fixture("ic_case1"), {"r", "l"}, 20)
        assert len(rep.violations) == 1
        b, tau, _ = rep.violations[0]
        assert b.loop == ("l",) and classify_thread(tau) == "good"
        assert rep.to_json()["violations"][0]["thread"]["loop"] == [["nu X. X", 0]]

    def test_cut_free_candidates_pass_vacuously(self):
        g = fixture("id_nu")
        assert verify_ic_candidate(g, g.nodes).ok

    @pytest.mark.parametrize("keep", [set(), {"l", "m"}, {"r", "zz"}])
    def test_bad_candidates(self, keep):
        with pytest.raises(ValueError):
            verify_ic_candidate(fixture("ic_case1"), keep)


class TestExternal:
    def test_external_but_not_progressing(self):
        g = fixture("external")
        found = external_progressivity_witness(g, g.nodes)
        assert found is not None
        b, trace = found
        assert not trace.internal and b.loop in (("a", "b"), ("b", "a"))
        assert not check_progressivity(g).progressing
        assert check_external_progressivity(g).externally_progressing

    @pytest.mark.parametrize("name, expected", [
        ("left", False), ("ic_case1", False), ("ic_case3", True), ("ic_case4", True),
        ("centre_mu", False), ("centre_nu", True), ("id_nu", True),
    ])
    def test_bounded_verdicts(self, name, expected):
        v = check_external_progressivity(fixture(name))
        assert v.externally_progressing == expected
        assert v.to_json()["externallyProgressing"] == expected

    def test_cut_free_witness(self):
        g = fixture("centre_nu")
        assert external_progressivity_witness(g) is not None
        bad = check_external_progressivity(fixture("centre_mu")).counterexample
        assert external_progressivity_witness(fixture("centre_mu"), bad) is None
