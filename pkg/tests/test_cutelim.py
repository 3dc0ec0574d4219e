import json

import pytest

from mumall.cutelim import (BudgetExhausted, Normalizer, PrefixUnstable, depth_metric,
                            emit_prefix, events_to_jsonl, normalize, run_to_depth, start,
                            suffix_minima, wrap_with_identities)
from mumall.fixtures import FIXTURES, fixture, progressing_fixtures
from mumall.proof import unfold_to_depth, validate_local, validate_tree
from mumall.reduce import count_cuts

# frontier length change per result, by event kind
DELTAS = {"expand": {1}, "criticalTensorPar": {1}, "criticalUnit": {-1}, "vanish": {-1},
          "commuteUnary": {0}, "commuteWith": {0}, "criticalFix": {0},
          "criticalPlusWith": {0}, "commuteBinary": {0, -2}}


def collect(g, budget=300, **kw):
    events = []
    try:
        for ev, _ in normalize(g, budget=budget, **kw):
            events.append(ev)
    except BudgetExhausted:
        pass
    return events


def test_wrapping_keeps_the_conclusion():
    for name in FIXTURES:
        d = fixture(name)
        w = wrap_with_identities(d)
        assert w.conclusion == d.conclusion
        assert validate_local(w) == []


def test_id_one_terminates():
    state, events = run_to_depth(fixture("id_1"), 5)
    assert not state.active
    assert events[0].kind == "expand"
    assert emit_prefix(state, 5) == unfold_to_depth(fixture("id_1"), 5)


@pytest.mark.parametrize("name", progressing_fixtures())
def test_identity_wrap_reproduces_the_source(name):
    d = fixture(name)
    state, _ = run_to_depth(d, 6, keep_source_cuts=True)
    assert emit_prefix(state, 6) == unfold_to_depth(d, 6)


@pytest.mark.parametrize("strategy", ["first", "last", "alternate", "guided"])
def test_strategies_give_cut_free_prefixes(strategy):
    state, _ = run_to_depth(fixture("cut_loop"), 6, strategy=strategy)
    p = emit_prefix(state, 6)
    assert count_cuts(p) == 0 and validate_tree(p) == []
    assert p.sequent == fixture("cut_loop").conclusion


def test_stalled_cut_exhausts_the_budget():
    with pytest.raises(BudgetExhausted) as exc:
        run_to_depth(fixture("left"), 4, budget=200)
    assert len(exc.value.depth_log) == 200
    assert max(exc.value.depth_log) == 0


def test_prefix_before_stability():
    state = start(fixture("cut_loop"))
    with pytest.raises(PrefixUnstable):
        emit_prefix(state, 3)


def test_deeper_runs_resume_parked_multicuts():
    state = start(fixture("cut_loop"))
    list(state.run(10_000, 3))
    assert state.settled(3) and not state.settled(6)
    list(state.run(10_000, 6))
    assert state.settled(6)
    p = emit_prefix(state, 6)
    assert count_cuts(p) == 0 and validate_tree(p) == []
    assert emit_prefix(state, 3).is_prefix_of(p)


@pytest.mark.parametrize("name", list(FIXTURES))
def test_frontier_length_changes(name):
    for wrap in (True, False):
        for ev in collect(fixture(name), auto_wrap=wrap):
            for r in ev.results:
                assert len(r["frontier"]) - len(ev.frontier_before) in DELTAS[ev.kind], ev.kind


def test_checkpoint_roundtrip():
    a = start(fixture("ic_case4"), auto_wrap=False, strategy="alternate")
    first = [ev.to_json() for ev in _take(a, 40)]
    b = Normalizer.from_json(json.loads(json.dumps(a.to_json())))
    assert [ev.to_json() for ev in _take(a, 40)] == [ev.to_json() for ev in _take(b, 40)]
    assert first


def _take(state, n):
    out = []
    try:
        for ev in state.run(n):
            out.append(ev)
    except BudgetExhausted:
        pass
    return out


def test_event_log_serialisation():
    events = collect(fixture("cut_id_id"))
    lines = events_to_jsonl(events).splitlines()
    assert len(lines) == len(events)
    kinds = {json.loads(l)["kind"] for l in lines}
    assert "expand" in kinds


def test_depth_metric_grows_on_productive_runs():
    state, events = run_to_depth(fixture("cut_loop"), 12)
    log = depth_metric(events)
    mins = suffix_minima(log)
    assert mins == sorted(mins)
    assert mins[-1] > 8


def test_unknown_strategy():
    with pytest.raises(ValueError):
        start(fixture("id_1"), strategy="random")
