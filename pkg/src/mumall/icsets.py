"""Frontiers, coverings, coherence and bounded IC-set verification.

IC candidates are given as sets of retained node ids; their branch set is
every branch of the source graph that stays inside the set.  All checks
here are bounded: a clean report means "no violation up to the bound".
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .formula import FlClosure
from .proof import ProofGraph, ancestry
from .progress import (Lasso, LassoTrace, Thread, WeakThreadError, classify_thread,
                       graph_closure, lasso_traces)


class SelectorExhausted(RuntimeError):
    """The path selector ran out of choices at a splitting event."""


# --------------------------------------------------------------------------
# Frontiers and coverings


@dataclass
class FrontierTrace:
    frontiers: list
    multicuts: list
    proper: bool
    terminated: bool
    reductions: int


def _selector(sel):
    if callable(sel):
        return sel
    if sel in (None, "left", "first"):
        return lambda k, n: 0
    if sel in ("right", "last"):
        return lambda k, n: n - 1
    if sel in ("alt", "alternate"):
        return lambda k, n: k % n
    bits = str(sel)
    if not set(bits) <= {"0", "1"}:
        raise ValueError(f"bad selector {sel!r}")

    def pick(k, n):
        if k >= len(bits):
            raise SelectorExhausted(f"selector has only {len(bits)} choices")
        return int(bits[k])

    return pick


def frontier_evolution(events: Sequence, selector="left", start: int = 0) -> FrontierTrace:
    """Follow one multicut reduction path through a run's event log.

    At an event splitting the followed multicut the selector picks which
    result to follow.  Events on other multicuts leave the frontier alone.
    """
    pick = _selector(selector)
    cur = start
    frontiers, ids = [], []
    splits = 0
    reductions, last_reduction = 0, -1
    terminated = False
    for i, ev in enumerate(events):
        if ev.multicut != cur:
            continue
        if not frontiers:
            frontiers.append(tuple(ev.frontier_before))
            ids.append(cur)
        if not ev.results:
            terminated = True
            break
        if len(ev.results) == 1:
            nxt = ev.results[0]
        else:
            nxt = ev.results[pick(splits, len(ev.results))]
            splits += 1
        if ev.kind != "expand":
            reductions += 1
            last_reduction = i
        cur = nxt["id"]
        frontiers.append(tuple(nxt["frontier"]))
        ids.append(cur)
    horizon = len(events)
    proper = (not terminated) and last_reduction >= horizon // 2
    return FrontierTrace(frontiers, ids, proper, terminated, reductions)


@dataclass(frozen=True)
class Covering:
    """Positions visited by a reduction path.

    ``positions`` is the prefix closure of every frontier position.  A
    finite run cannot tell a stuck slot from a slow one, so ``nodes`` only
    keeps the prefix closure of positions at least half as deep as the
    deepest one: the part of the subtree that is still growing.
    """

    positions: frozenset
    nodes: frozenset
    depth: int

    def __len__(self):
        return len(self.positions)


def _prefixes(ps) -> set:
    out = set()
    for p in ps:
        out.update(p[:k] for k in range(len(p) + 1))
    return out


def covering(g: ProofGraph, events: Sequence, selector="left") -> Covering:
    ft = frontier_evolution(events, selector)
    seen = {tuple(p) for fr in ft.frontiers for p in fr}
    depth = max((len(p) for p in seen), default=0)
    deep = {p for p in seen if len(p) >= depth // 2} if not ft.terminated else seen
    return Covering(frozenset(_prefixes(seen)),
                    frozenset(g.node_at(p) for p in _prefixes(deep)), depth)


# --------------------------------------------------------------------------
# Branches, meets and coherence


def _branch_prefix(lasso: Lasso, length: int) -> list:
    """First ``length`` steps ``(node, slot)`` of the branch."""
    steps = list(zip(lasso.stem, lasso.stem_slots))
    loop = list(zip(lasso.loop, lasso.loop_slots))
    while len(steps) < length:
        steps.extend(loop)
    return steps[:length]


def unroll(lasso: Lasso, stem_len: int) -> Lasso:
    """Same branch with the stem lengthened to at least ``stem_len`` steps."""
    stem = list(zip(lasso.stem, lasso.stem_slots))
    loop = list(zip(lasso.loop, lasso.loop_slots))
    while len(stem) < stem_len:
        stem.append(loop[0])
        loop = loop[1:] + loop[:1]
    return Lasso(tuple(u for u, _ in stem), tuple(s for _, s in stem),
                 tuple(u for u, _ in loop), tuple(s for _, s in loop))


def meet(lasso_b: Lasso, lasso_c: Lasso) -> int | None:
    """Length ``n`` of the common prefix: ``b(n) = c(n)`` is the last shared node."""
    horizon = (len(lasso_b.stem) + len(lasso_c.stem)
               + len(lasso_b.loop) * len(lasso_c.loop) + 1)
    pb, pc = _branch_prefix(lasso_b, horizon), _branch_prefix(lasso_c, horizon)
    for n, (x, y) in enumerate(zip(pb, pc)):
        if x[0] != y[0]:
            raise AssertionError("branches must start at the same root")
        if x[1] != y[1]:
            return n
    return None


def _word(t: Thread, n: int) -> list:
    seq = list(t.stem)
    if not t.loop:
        return seq[:n]
    while len(seq) < n:
        seq.extend(t.loop)
    return seq[:n]


def same_thread(a: Thread, b: Thread) -> bool:
    """Equality of the two eventually periodic principal-step words."""
    if not a.loop or not b.loop:
        return (not a.loop and not b.loop and a.stem == b.stem)
    n = max(len(a.stem), len(b.stem)) + len(a.loop) * len(b.loop)
    return _word(a, n) == _word(b, n)


def _traces_from(g: ProofGraph, lasso: Lasso, n: int) -> list[LassoTrace]:
    """Infinite traces of the branch starting at the cut occurrence at step ``n + 1``."""
    lasso = unroll(lasso, n + 1)
    return [t for t in lasso_traces(g, lasso) if t.internal and t.origin[0] == n + 1]


def check_coherence(g: ProofGraph, b: Lasso, c: Lasso, tau: Thread) -> bool:
    """``b`` and ``c`` meet at a cut and dual traces from its two cut
    formulas bear ``tau`` (on ``b``) and ``tau^`` (on ``c``)."""
    n = meet(b, c)
    if n is None:
        return False
    node = g.nodes[_branch_prefix(b, n + 1)[n][0]]
    if node.rule.name != "cut":
        return False
    s_ok = any(same_thread(t.thread, tau) for t in _traces_from(g, b, n))
    if not s_ok:
        return False
    dual = tau.dual()
    return any(same_thread(t.thread, dual) for t in _traces_from(g, c, n))


# --------------------------------------------------------------------------
# Lassos inside a candidate


def _subgraph_edges(g: ProofGraph, keep: frozenset) -> dict:
    out = {}
    for u in sorted(keep):
        for s, v in enumerate(g.nodes[u].premises):
            if v in keep:
                out.setdefault(u, []).append((s, v))
    return out


def enumerate_lassos(g: ProofGraph, keep: Iterable[str] | None = None, bound: int = 20,
                     limit: int = 100_000) -> list[Lasso]:
    """All lassos of the candidate with ``|stem| + |loop| <= bound``.

    A lasso is listed once, with its loop entered as early as possible.
    """
    keep = frozenset(g.nodes if keep is None else keep)
    edges = _subgraph_edges(g, keep)
    out, seen = [], set()
    stack = [(g.root, ())]
    while stack:
        u, walk = stack.pop()
        if len(walk) >= bound:
            continue
        for s, v in edges.get(u, []):
            w = walk + ((u, s),)
            nodes = [x for x, _ in w]
            for i, x in enumerate(nodes):
                if x == v:
                    stem, loop = w[:i], w[i:]
                    if _primitive(loop) and not _loop_extends(stem, loop):
                        key = (stem, loop)
                        if key not in seen:
                            seen.add(key)
                            out.append(Lasso(tuple(a for a, _ in stem), tuple(b for _, b in stem),
                                             tuple(a for a, _ in loop), tuple(b for _, b in loop)))
                            if len(out) > limit:
                                raise RuntimeError("too many lassos")
            stack.append((v, w))
    out.sort(key=lambda l: (len(l.stem) + len(l.loop), l.stem, l.stem_slots, l.loop, l.loop_slots))
    return out


def _primitive(loop) -> bool:
    m = len(loop)
    return not any(m % d == 0 and loop == loop[d:] + loop[:d] for d in range(1, m))


def _loop_extends(stem, loop) -> bool:
    """The last stem step already belongs to the loop (the loop could start earlier)."""
    return bool(stem) and stem[-1] == loop[-1]


# --------------------------------------------------------------------------
# IC verification


@dataclass
class ICReport:
    bound: int
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "lassosChecked": self.checked,
            "status": "no violation up to bound" if self.ok else "violation",
            "violations": [{"branch": b.to_json(), "thread": _thread_json(t), "missing": why}
                           for b, t, why in self.violations],
        }


def _thread_json(t: Thread) -> dict:
    from .formula import render_formula
    f = lambda xs: [[render_formula(a), b] for a, b in xs]
    return {"stem": f(t.stem), "loop": f(t.loop)}


def internal_threads(g: ProofGraph, b: Lasso) -> list[tuple]:
    """``(meet length n, thread)`` for every genuine internal thread of ``b``."""
    # One extra turn puts cuts on the loop into the stem.
    b = unroll(b, len(b.stem) + len(b.loop))
    out = []
    for t in lasso_traces(g, b):
        if t.internal and t.thread.loop:
            out.append((t.origin[0] - 1, t.thread))
    return out


def find_partner(g: ProofGraph, keep: frozenset, b: Lasso, n: int, tau: Thread) -> Lasso | None:
    """A branch of the candidate coherent with ``b`` for ``tau`` at the cut ``b(n)``."""
    prefix = _branch_prefix(b, n + 1)
    cut_node, bslot = prefix[n]
    node = g.nodes[cut_node]
    if node.rule.name != "cut":
        return None
    cslot = 1 - bslot
    start = node.premises[cslot]
    if start not in keep:
        return None
    occ = node.rule.left_len if cslot == 0 else 0
    word = tau.dual()
    stem_w, loop_w = list(word.stem), list(word.loop)
    if not loop_w:
        return None
    edges = _subgraph_edges(g, keep)
    links = {}
    for u, es in edges.items():
        anc = ancestry(g.nodes[u].sequent, g.nodes[u].rule)
        for s, v in es:
            links[(u, s)] = (v, anc[s])
    # Product states: (node, occurrence, phase); phases >= len(stem_w) are loop phases.
    L = len(stem_w)

    def letter(ph):
        return stem_w[ph] if ph < L else loop_w[(ph - L) % len(loop_w)]

    def bump(ph):
        return ph + 1 if ph + 1 < L + len(loop_w) else L

    prod = nx.DiGraph()
    init = (start, occ, 0)
    parent = {init: None}
    queue = deque([init])
    while queue:
        st = queue.popleft()
        u, k, ph = st
        for s, v in edges.get(u, []):
            _, anc = links[(u, s)]
            for j, l in enumerate(anc):
                if l.src != k:
                    continue
                if l.principal:
                    if (g.nodes[u].sequent[k], l.branch) != letter(ph):
                        continue
                    nph, adv = bump(ph), True
                else:
                    nph, adv = ph, False
                nxt = (v, j, nph)
                prod.add_edge(st, nxt, step=(u, s), adv=adv)
                if nxt not in parent:
                    parent[nxt] = (st, (u, s))
                    queue.append(nxt)
    # A cycle through loop phases containing an advancing edge.
    loop_states = [x for x in prod.nodes if x[2] >= L]
    sub = prod.subgraph(loop_states)
    for comp in sorted(nx.strongly_connected_components(sub), key=lambda c: min(map(str, c))):
        adv_edges = [(a, b2) for a, b2 in sub.subgraph(comp).edges if sub.edges[a, b2]["adv"]]
        if not adv_edges:
            continue
        a, b2 = min(adv_edges, key=str)
        back = nx.shortest_path(sub.subgraph(comp), b2, a)
        # b2 ... a, closed by the advancing edge a -> b2
        cyc = [sub.edges[x, y]["step"] for x, y in zip(back, back[1:])] + [sub.edges[a, b2]["step"]]
        # Stem: b's prefix to the cut, the cut step, then the product path to b2.
        path, st = [], b2
        while parent[st] is not None:
            prev, step = parent[st]
            path.append(step)
            st = prev
        path.reverse()
        stem = [(x, y) for x, y in prefix[:n]] + [(cut_node, cslot)] + path
        return Lasso(tuple(x for x, _ in stem), tuple(y for _, y in stem),
                     tuple(x for x, _ in cyc), tuple(y for _, y in cyc))
    return None


def verify_ic_candidate(g: ProofGraph, keep: Iterable[str], bound: int = 20) -> ICReport:
    """Every internal thread of every bounded lasso of the candidate has a
    coherent partner branch inside the candidate."""
    keep = frozenset(keep)
    if not keep:
        raise ValueError("IC candidate is empty")
    if g.root not in keep:
        raise ValueError("IC candidate does not contain the root")
    unknown = keep - set(g.nodes)
    if unknown:
        raise ValueError(f"unknown node ids: {sorted(unknown)}")
    lassos = enumerate_lassos(g, keep, bound)
    report = ICReport(bound, len(lassos))
    for b in lassos:
        for n, tau in internal_threads(g, b):
            c = find_partner(g, keep, b, n, tau)
            if c is None or not check_coherence(g, b, c, tau):
                report.violations.append((b, tau, "no coherent partner in the candidate"))
    return report


# --------------------------------------------------------------------------
# External progressivity


def external_progressivity_witness(g: ProofGraph, keep=None, bound: int = 20,
                                   closure: FlClosure | None = None):
    """Some branch of the candidate bearing a good external thread, or ``None``.

    ``keep`` is a set of retained node ids (default: the whole graph) or an
    explicit list of :class:`Lasso` branches.  Returns ``(lasso, trace)``.
    """
    closure = closure or graph_closure(g)
    if keep is not None and not isinstance(keep, (set, frozenset)):
        keep = list(keep)
    if keep and all(isinstance(b, Lasso) for b in keep):
        branches = keep
    else:
        branches = enumerate_lassos(g, keep, bound)
    for b in branches:
        for t in lasso_traces(g, b):
            if t.internal or not t.thread.loop:
                continue
            try:
                if classify_thread(t.thread, closure) == "good":
                    return b, t
            except WeakThreadError:
                continue
    return None


@dataclass
class ExternalVerdict:
    externally_progressing: bool
    counterexample: list = field(default_factory=list)
    bound: int = 0

    def to_json(self) -> dict:
        return {"externallyProgressing": self.externally_progressing, "bound": self.bound,
                "icSet": [b.to_json() for b in self.counterexample]}


def _has_good_external(g, b, closure) -> bool:
    for t in lasso_traces(g, b):
        if t.internal or not t.thread.loop:
            continue
        try:
            if classify_thread(t.thread, closure) == "good":
                return True
        except WeakThreadError:
            continue
    return False


def check_external_progressivity(g: ProofGraph, bound: int | None = None,
                                 limit: int = 200_000) -> ExternalVerdict:
    """Bounded search for an IC set bearing no good external thread.

    Among the lassos up to ``bound`` take those without a good external
    thread and repeatedly drop any whose internal threads lack a coherent
    partner among the rest.  What survives is an IC set of bad branches.
    """
    from .progress import (_closed_walks, _loop_has_good_trace, _shortest_paths,
                           completeness_bound, step_relations)
    closure = graph_closure(g)
    if not g.has_cut():
        # No internal threads: every branch is an IC set by itself.
        bound = completeness_bound(g) if bound is None else bound
        rels = step_relations(g, closure)
        paths = _shortest_paths(g)
        dist = {k: len(v[0]) for k, v in paths.items()}
        for walk in _closed_walks(g, rels, dist, bound, limit):
            if not _loop_has_good_trace([rels[e] for e in walk]):
                stem, slots = paths[walk[0][0]]
                b = Lasso(stem, slots, tuple(u for u, _ in walk), tuple(s for _, s in walk))
                return ExternalVerdict(False, [b], bound)
        return ExternalVerdict(True, [], bound)
    bound = 12 if bound is None else bound
    bad = [b for b in enumerate_lassos(g, None, bound, limit) if not _has_good_external(g, b, closure)]
    threads = {b: internal_threads(g, b) for b in bad}
    alive = set(bad)
    changed = True
    while changed:
        changed = False
        for b in [x for x in bad if x in alive]:
            for _, tau in threads[b]:
                if not any(check_coherence(g, b, c, tau) for c in alive if c != b):
                    alive.discard(b)
                    changed = True
                    break
    ic = [b for b in bad if b in alive]
    return ExternalVerdict(not ic, ic, bound)


__all__ = [
    "SelectorExhausted", "FrontierTrace", "Covering", "ICReport", "ExternalVerdict",
    "frontier_evolution", "covering", "check_coherence", "meet", "unroll",
    "same_thread", "enumerate_lassos", "internal_threads", "find_partner",
    "verify_ic_candidate", "external_progressivity_witness",
    "check_external_progressivity",
]
