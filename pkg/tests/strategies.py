"""Hypothesis strategies for formulas and graphs."""
import random

from hypothesis import strategies as st

from mumall.formula import BOT, ONE, TOP, ZERO, Mu, Nu, Par, Plus, Tensor, Var, With
from mumall.randgen import random_graph

_units = st.sampled_from([ONE, BOT, TOP, ZERO])


def formulas(bound=(), depth=3):
    """Closed formulas, given the variables in ``bound``."""
    leaves = _units if not bound else st.one_of(_units, st.sampled_from([Var(v) for v in bound]))
    if depth == 0:
        return leaves
    name = f"X{len(bound)}"
    return st.one_of(
        leaves,
        st.builds(lambda c, a, b: c(a, b), st.sampled_from([Tensor, Par, Plus, With]),
                  st.deferred(lambda: formulas(bound, depth - 1)),
                  st.deferred(lambda: formulas(bound, depth - 1))),
        st.builds(lambda c, body: c(name, body), st.sampled_from([Mu, Nu]),
                  st.deferred(lambda: formulas(tuple(bound) + (name,), depth - 1))),
    )


graphs = st.integers(0, 2**32 - 1).map(lambda s: random_graph(random.Random(s)))
