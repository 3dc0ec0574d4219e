import random

from mumall.formula import free_vars
from mumall.proof import validate_local, validate_tree
from mumall.randgen import (random_cut_free_graph, random_cut_tree, random_formula,
                            random_graph, random_lasso_thread)


def test_graphs_respect_limits():
    rng = random.Random(0)
    for _ in range(50):
        g = random_graph(rng)
        assert len(g.nodes) <= 8 and g.max_sequent_length() <= 3
        assert validate_local(g) == []
        assert not random_cut_free_graph(rng).has_cut()


def test_seeds_replay():
    a = random_graph(random.Random(11))
    b = random_graph(random.Random(11))
    assert a == b


def test_formulas_are_closed():
    rng = random.Random(1)
    assert all(not free_vars(random_formula(rng, 4)) for _ in range(200))


def test_cut_trees():
    rng = random.Random(2)
    for _ in range(30):
        t = random_cut_tree(rng)
        assert t.rule.name == "cut" and validate_tree(t) == []


def test_threads_loop_through_a_fixed_point():
    rng = random.Random(3)
    for _ in range(30):
        t, closure = random_lasso_thread(rng)
        assert t.loop and all(f in closure for f in t.formulas())
