import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mumall.formula import parse_formula as P
from mumall.proof import Rule, Tree, validate_tree
from mumall.randgen import random_cut_tree
from mumall.reduce import (NeedsMoreDepth, NotACut, count_cuts, cut_splice, exch_to,
                           reduce_step, reducts)


def seq(*texts):
    return tuple(P(t) for t in texts)


def one():
    return Tree(seq("1"), Rule("one", principal=0))


def bot_one():
    return Tree(seq("bot", "1"), Rule("bot", principal=0), (one(),))


def top(*texts, at=0):
    return Tree(seq(*texts), Rule("top", principal=at))


def test_exch_to_reaches_any_permutation():
    t = top("1", "bot", "top", at=2)
    target = seq("top", "1", "bot")
    r = exch_to(t, target)
    assert r.sequent == target
    assert validate_tree(r) == []
    assert exch_to(t, t.sequent) is t


def test_cut_splice_layout():
    left = top("bot", "1", "top", at=2)
    right = top("top", "bot", at=0)
    c = cut_splice(left, 1, right, 1)
    assert c.sequent == seq("bot", "top", "top")
    assert validate_tree(c) == []


def test_unit_step_removes_the_cut():
    cut = Tree(seq("1"), Rule("cut", cut_formula=P("1"), left_len=0), (one(), bot_one()))
    (kind, r), = reducts(cut)
    assert kind == "criticalUnit"
    assert count_cuts(r) == 0 and r.sequent == cut.sequent


def test_commutation_with_top():
    left = top("top", "1", at=0)
    right = top("bot", "top", at=1)
    cut = Tree(seq("top", "top"), Rule("cut", cut_formula=P("1"), left_len=1), (left, right))
    out = reducts(cut)
    assert [k for k, _ in out] == ["commuteUnary", "commuteUnary"]
    for _, r in out:
        assert r.rule.name == "top" or r.children[0].rule.name in ("top", "exch")
        assert count_cuts(r) == 0 and validate_tree(r) == []


def test_errors():
    with pytest.raises(NotACut):
        reducts(one())
    cut = Tree(seq("1"), Rule("cut", cut_formula=P("1"), left_len=0), (Tree(seq("1")), bot_one()))
    with pytest.raises(NeedsMoreDepth):
        reducts(cut)


def test_choice_filters_kinds():
    cut = Tree(seq("1"), Rule("cut", cut_formula=P("1"), left_len=0), (one(), bot_one()))
    assert len(reduce_step(cut, choice="criticalUnit")) == 1
    assert reduce_step(cut, choice="criticalFix") == []


@given(st.integers(0, 10**6))
def test_reducts_preserve_conclusion_and_validity(seed):
    t = random_cut_tree(random.Random(seed))
    for kind, r in reducts(t):
        assert r.sequent == t.sequent
        assert validate_tree(r) == []
