"""Seeded random formulas, proof graphs, finite trees and threads.

Everything takes a :class:`random.Random` so that harnesses can be replayed
from one integer seed.
"""
from __future__ import annotations

import random
from typing import Sequence

from .formula import (BOT, ONE, TOP, ZERO, Formula, Mu, Nu, Par, Plus, Tensor, Var,
                      With, fl_closure, is_fixpoint, negate, parse_formula, successors)
from .proof import Node, ProofGraph, Rule, RuleError, Tree, premises_of, validate_local
from .progress import Thread

_UNITS = (ONE, BOT, TOP, ZERO)
_BINARY = (Tensor, Par, Plus, With)


def random_formula(rng: random.Random, depth: int = 3, bound: Sequence[str] = (),
                   fix_bias: float = 0.35) -> Formula:
    """A closed formula (given the variables in ``bound``) of height ``<= depth``."""
    leaves = list(_UNITS) + [Var(v) for v in bound] * 2
    if depth <= 0:
        return rng.choice(leaves)
    roll = rng.random()
    if roll < fix_bias:
        name = f"X{len(bound)}"
        cls = rng.choice((Mu, Nu))
        return cls(name, random_formula(rng, depth - 1, tuple(bound) + (name,), fix_bias))
    if roll < fix_bias + 0.45:
        cls = rng.choice(_BINARY)
        return cls(random_formula(rng, depth - 1, bound, fix_bias),
                   random_formula(rng, depth - 1, bound, fix_bias))
    return rng.choice(leaves)


# Small formulas whose unfoldings cycle quickly; random graphs draw from them.
POOL_TEXT = (
    "1", "bot", "top", "nu X. X", "mu X. X", "nu X. (X @ bot)", "mu X. (X + 1)",
    "nu X. (X * 1)", "mu X. (X & top)", "nu X. mu Y. (X + Y)", "mu X. nu Y. (X + Y)",
    "nu X. (X & X)", "mu X. (X @ X)",
)


def formula_pool(rng: random.Random, extra: int = 2) -> list[Formula]:
    pool = [parse_formula(t) for t in POOL_TEXT]
    for _ in range(extra):
        pool.append(random_formula(rng, 2))
    return pool


def _options(seq: tuple, pool: list, max_seq: int, cuts: bool, rng: random.Random) -> list[Rule]:
    out = []
    n = len(seq)
    for p, f in enumerate(seq):
        if f == ONE and n == 1:
            out.append(Rule("one", principal=0))
        elif f == TOP:
            out.append(Rule("top", principal=p))
        elif f == BOT:
            out.append(Rule("bot", principal=p))
        elif isinstance(f, Par):
            out.append(Rule("par", principal=p))
        elif isinstance(f, Plus):
            out.append(Rule(rng.choice(("plus0", "plus1")), principal=p))
        elif isinstance(f, With):
            out.append(Rule("with", principal=p))
        elif isinstance(f, Mu):
            out.append(Rule("mu", principal=p))
        elif isinstance(f, Nu):
            out.append(Rule("nu", principal=p))
        elif isinstance(f, Tensor):
            out.append(Rule("tensor", principal=p, left_len=rng.randint(0, n - 1)))
    if n >= 2 and rng.random() < 0.2:
        out.append(Rule("exch", index=rng.randrange(n - 1)))
    if cuts and rng.random() < 0.3:
        k = rng.randint(0, n)
        out.append(Rule("cut", cut_formula=rng.choice(pool), left_len=k))
    return [r for r in out if all(len(s) <= max_seq for s in premises_of(seq, r))]


def random_graph(rng: random.Random, max_nodes: int = 8, max_seq: int = 3,
                 cuts: bool = True, attempts: int = 500) -> ProofGraph:
    """A locally valid regular derivation with at most ``max_nodes`` nodes.

    Premises reuse an existing node with the same sequent when one exists
    (always, once the node budget is spent); otherwise a new node is made.
    Attempts that get stuck are discarded.
    """
    for _ in range(attempts):
        g = _attempt(rng, max_nodes, max_seq, cuts)
        if g is not None:
            return g
    raise RuntimeError("no random graph found within the attempt budget")


def _attempt(rng, max_nodes, max_seq, cuts):
    pool = formula_pool(rng)
    root = tuple(rng.choice(pool) for _ in range(rng.randint(1, min(2, max_seq))))
    seqs = {"n0": root}
    rules, prem = {}, {}
    todo = ["n0"]
    while todo:
        nid = todo.pop(0)
        opts = _options(seqs[nid], pool, max_seq, cuts, rng)
        if not opts:
            return None
        rule = rng.choice(opts)
        rules[nid] = rule
        kids = []
        for s in premises_of(seqs[nid], rule):
            same = [k for k, v in seqs.items() if v == s]
            if same and (len(seqs) >= max_nodes or rng.random() < 0.7):
                kids.append(rng.choice(same))
            elif len(seqs) < max_nodes:
                k = f"n{len(seqs)}"
                seqs[k] = s
                todo.append(k)
                kids.append(k)
            else:
                return None
        prem[nid] = kids
    g = ProofGraph({k: Node(seqs[k], rules[k], tuple(prem[k])) for k in seqs}, "n0")
    return g if not validate_local(g) else None


def random_cut_free_graph(rng: random.Random, max_nodes: int = 8, max_seq: int = 3) -> ProofGraph:
    return random_graph(rng, max_nodes, max_seq, cuts=False)


def random_graph_with_cycle(rng: random.Random, **kw) -> ProofGraph:
    """A random graph with at least one back-edge (an infinite branch)."""
    import networkx as nx
    while True:
        g = random_graph(rng, **kw)
        dg = nx.DiGraph((u, v) for u, _, v in g.edges())
        if dg.number_of_nodes() and not nx.is_directed_acyclic_graph(dg):
            return g


# --------------------------------------------------------------------------
# Finite trees with a reducible root cut


def random_tree(rng: random.Random, seq: tuple, depth: int, max_seq: int = 4) -> Tree | None:
    """A finite cut-free proof of ``seq``, or ``None`` when none was found."""
    n = len(seq)
    if seq == (ONE,):
        return Tree(seq, Rule("one", principal=0))
    tops = [i for i, f in enumerate(seq) if f == TOP]
    if tops and (depth <= 0 or rng.random() < 0.3):
        return Tree(seq, Rule("top", principal=rng.choice(tops)))
    if depth <= 0:
        return None
    opts = []
    for p, f in enumerate(seq):
        if f == BOT:
            opts.append(Rule("bot", principal=p))
        elif isinstance(f, Par):
            opts.append(Rule("par", principal=p))
        elif isinstance(f, Plus):
            opts.append(Rule(rng.choice(("plus0", "plus1")), principal=p))
        elif isinstance(f, With):
            opts.append(Rule("with", principal=p))
        elif isinstance(f, (Mu, Nu)):
            opts.append(Rule("mu" if isinstance(f, Mu) else "nu", principal=p))
        elif isinstance(f, Tensor):
            opts.append(Rule("tensor", principal=p, left_len=rng.randint(0, n - 1)))
    if n >= 2:
        opts.append(Rule("exch", index=rng.randrange(n - 1)))
    rng.shuffle(opts)
    for rule in opts[:3]:
        try:
            prems = premises_of(seq, rule)
        except RuleError:
            continue
        if any(len(s) > max_seq for s in prems):
            continue
        kids = [random_tree(rng, s, depth - 1, max_seq) for s in prems]
        if all(k is not None for k in kids):
            return Tree(seq, rule, tuple(kids))
    return None


# Cut formulas for single-step harnesses: every connective appears.
CUT_TEXT = ("1", "bot", "top", "1 * 1", "bot @ bot", "1 + top", "top & 1",
            "nu X. 1", "mu X. (1 + X)", "(1 * bot) + top", "nu X. (1 & X)")
CONTEXT_TEXT = ("top", "bot", "1", "top + 1", "bot @ top", "nu Y. top", "top & top", "top * top")


def random_cut_tree(rng: random.Random, depth: int = 4, attempts: int = 200) -> Tree:
    """A finite tree whose root is a cut between two cut-free proofs."""
    cuts = [parse_formula(t) for t in CUT_TEXT]
    ctxs = [parse_formula(t) for t in CONTEXT_TEXT]
    for _ in range(attempts):
        phi = rng.choice(cuts)
        gamma = tuple(rng.choice(ctxs) for _ in range(rng.randint(0, 1)))
        delta = tuple(rng.choice(ctxs) for _ in range(rng.randint(0, 1)))
        k = rng.randint(0, len(gamma))
        left_seq = gamma[:k] + (phi,) + gamma[k:]
        left = random_tree(rng, left_seq, depth)
        right = random_tree(rng, (negate(phi),) + delta, depth)
        if left is None or right is None:
            continue
        concl = gamma[:k] + delta + gamma[k:]
        last = k == len(gamma)
        rule = Rule("cut", cut_formula=phi, left_len=k, right_len=None if last else len(delta))
        return Tree(concl, rule, (left, right))
    raise RuntimeError("no random cut tree found")


# --------------------------------------------------------------------------
# Threads


def random_lasso_thread(rng: random.Random, max_stem: int = 4, attempts: int = 100):
    """A thread through a random closure, returned with the closure.

    The thread follows Fischer-Ladner successors until a formula repeats;
    the repeated stretch is its loop.
    """
    for _ in range(attempts):
        seed = random_formula(rng, 3, fix_bias=0.5)
        closure = fl_closure([seed])
        start = rng.choice(sorted(closure.formulas, key=str))
        seen, path = {}, []
        cur = start
        while cur not in seen:
            nxt = successors(cur)
            if not nxt:
                break
            b = rng.randrange(len(nxt))
            seen[cur] = len(path)
            path.append((cur, b))
            cur = nxt[b]
        else:
            i = seen[cur]
            stem, loop = tuple(path[:i][-max_stem:]), tuple(path[i:])
            if any(is_fixpoint(f) for f, _ in loop):
                return Thread(stem, loop), closure
    raise RuntimeError("no looping thread found")


__all__ = [
    "random_formula", "formula_pool", "random_graph", "random_cut_free_graph",
    "random_graph_with_cycle", "random_tree", "random_cut_tree", "random_lasso_thread",
    "POOL_TEXT", "CUT_TEXT",
]
