"""Ancestry, traces, threads and the progressivity decision procedure.

The checker abstracts every finite path of the graph into a relation over
occurrence indices, labelled with the minimal rank unfolded on the way and
whether a principal step happened.  The set of such composites is finite,
so saturating it by breadth-first search from each node terminates; a
graph progresses iff every idempotent self-composite has a diagonal entry
with an even minimal rank.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .formula import FlClosure, Formula, Nu, contains, fl_closure, is_fixpoint, negate
from .proof import Link, ProofGraph, ancestry, render_formula

# --------------------------------------------------------------------------
# Events and step relations


@dataclass(frozen=True, order=True)
class Event:
    kind: str  # "none" | "steps" | "unfolds"
    rank: int | None = None

    def label(self) -> tuple:
        return (self.rank, self.kind != "none")

    def __str__(self):
        return f"unfolds({self.rank})" if self.kind == "unfolds" else self.kind


NONE = Event("none")
STEPS = Event("steps")


@dataclass(frozen=True)
class StepRelation:
    edge: tuple  # (nodeId, premiseSlot)
    target: str
    pairs: frozenset  # of (fromIndex, toIndex, Event)

    def as_dict(self) -> dict:
        return {(i, j): e for i, j, e in self.pairs}


@dataclass(frozen=True)
class Occurrence:
    node: str
    index: int
    formula: Formula


def graph_closure(g: ProofGraph, tiebreak: str = "lex") -> FlClosure:
    return fl_closure(g.formulas(), tiebreak=tiebreak)


def _links(g: ProofGraph) -> dict:
    """``(node, slot) -> (target, [Link per premise occurrence])``."""
    out = {}
    for nid, node in g.nodes.items():
        for slot, links in enumerate(ancestry(node.sequent, node.rule)):
            out[(nid, slot)] = (node.premises[slot], links)
    return out


def step_relations(g: ProofGraph, closure: FlClosure | None = None,
                   tiebreak: str = "lex") -> dict:
    """Map each edge ``(node, slot)`` to its :class:`StepRelation`."""
    closure = closure or graph_closure(g, tiebreak)
    out = {}
    for (nid, slot), (tgt, links) in sorted(_links(g).items()):
        seq = g.nodes[nid].sequent
        rule = g.nodes[nid].rule
        pairs = set()
        for j, link in enumerate(links):
            if link.src is None:
                continue
            if link.principal:
                if rule.name in ("mu", "nu"):
                    ev = Event("unfolds", closure.rank[seq[link.src]])
                else:
                    ev = STEPS
            else:
                ev = NONE
            pairs.add((link.src, j, ev))
        out[(nid, slot)] = StepRelation((nid, slot), tgt, frozenset(pairs))
    return out


# --------------------------------------------------------------------------
# Threads and lassos


class WeakThreadError(ValueError):
    """The tracked sequence is eventually constant: a weak thread only."""


@dataclass(frozen=True)
class Thread:
    """Eventually periodic thread given by its principal steps.

    Each entry is ``(formula, branch)``: the principal formula decomposed at
    that step and which minor the trace continued into.
    """

    stem: tuple = ()
    loop: tuple = ()

    def dual(self) -> "Thread":
        flip = lambda xs: tuple((negate(f), b) for f, b in xs)
        return Thread(flip(self.stem), flip(self.loop))

    def formulas(self) -> list:
        return [f for f, _ in self.stem + self.loop]


def classify_thread(t: Thread, closure: FlClosure | None = None,
                    tiebreak: str = "lex") -> str:
    """``"good"`` iff the minimal rank unfolded along the loop is even."""
    if not t.loop:
        raise WeakThreadError("thread has no principal step on its loop")
    loop = [f for f, _ in t.loop]
    closure = closure or fl_closure(loop, tiebreak=tiebreak)
    fixes = [f for f in loop if is_fixpoint(f)]
    if not fixes:
        raise WeakThreadError("loop unfolds no fixed point")
    best = min(fixes, key=lambda f: closure.rank[f])
    return "good" if closure.rank[best] % 2 == 0 else "bad"


def dominant_fixpoint(t: Thread) -> Formula:
    """The fixed point recurring on the loop that every loop formula contains."""
    loop = [f for f, _ in t.loop]
    cands = {f for f in loop if is_fixpoint(f) and all(contains(g, f) for g in loop)}
    if len(cands) != 1:
        raise WeakThreadError(f"expected one dominant fixed point, found {len(cands)}")
    return next(iter(cands))


def classify_structural(t: Thread) -> str:
    """Classification read off the dominant fixed point directly."""
    return "good" if isinstance(dominant_fixpoint(t), Nu) else "bad"


@dataclass(frozen=True)
class Lasso:
    """Eventually periodic branch from the root.

    ``stem[i]`` moves through premise ``stem_slots[i]`` to the next node
    (``loop[0]`` after the last stem node); ``loop`` closes on itself the
    same way.  ``track`` optionally gives one occurrence index per loop node.
    """

    stem: tuple
    stem_slots: tuple
    loop: tuple
    loop_slots: tuple
    track: tuple | None = None

    def __post_init__(self):
        if not self.loop:
            raise ValueError("a lasso needs a nonempty loop")
        if len(self.stem) != len(self.stem_slots) or len(self.loop) != len(self.loop_slots):
            raise ValueError("slot lists must match node lists")

    def steps(self) -> list:
        return list(zip(self.stem, self.stem_slots)) + list(zip(self.loop, self.loop_slots))

    def check(self, g: ProofGraph) -> None:
        nodes = list(self.stem) + list(self.loop) + [self.loop[0]]
        if nodes[0] != g.root:
            raise ValueError("lasso does not start at the root")
        for (u, s), v in zip(self.steps(), nodes[1:]):
            if g.nodes[u].premises[s] != v:
                raise ValueError(f"no edge {u}[{s}] -> {v}")

    def to_json(self) -> dict:
        out = {"stem": list(self.stem), "stemSlots": list(self.stem_slots),
               "loop": list(self.loop), "loopSlots": list(self.loop_slots)}
        if self.track is not None:
            out["track"] = list(self.track)
        return out


def lasso_thread(g: ProofGraph, loop: Sequence, slots: Sequence, track: Sequence) -> Thread:
    """Thread traced by ``track`` around the cycle ``loop`` (periodic)."""
    m = len(loop)
    entries = []
    for i in range(m):
        u, s = loop[i], slots[i]
        node = g.nodes[u]
        links = ancestry(node.sequent, node.rule)[s]
        k, j = track[i], track[(i + 1) % m]
        link = links[j]
        if link.src != k:
            raise ValueError(f"track is not a trace at {u}: {j} does not descend from {k}")
        if link.principal:
            entries.append((node.sequent[k], link.branch))
    return Thread((), tuple(entries))


def classify_lasso(g: ProofGraph, lasso: Lasso, closure: FlClosure | None = None) -> str:
    if lasso.track is None:
        raise ValueError("lasso carries no track")
    return classify_thread(lasso_thread(g, lasso.loop, lasso.loop_slots, lasso.track),
                           closure or graph_closure(g))


@dataclass(frozen=True)
class LassoTrace:
    """An infinite trace over a lasso.

    ``origin`` is ``(step, index)``: the position along the stem where the
    trace starts.  ``stem_track`` covers steps ``origin[0]..len(stem)-1``,
    ``loop_track`` one or more turns of the loop.
    """

    origin: tuple
    internal: bool
    stem_track: tuple
    loop_track: tuple
    thread: Thread


def lasso_traces(g: ProofGraph, lasso: Lasso) -> list[LassoTrace]:
    """All infinite traces over the lasso, one per (origin, phase)."""
    m = len(lasso.loop)
    steps = lasso.steps()
    links = {k: ancestry(g.nodes[k[0]].sequent, g.nodes[k[0]].rule)[k[1]] for k in set(steps)}
    # Product over loop positions: (pos, idx) -> (pos+1, j) when j descends from idx.
    prod = nx.DiGraph()
    for pos in range(m):
        u, s = lasso.loop[pos], lasso.loop_slots[pos]
        for j, link in enumerate(links[(u, s)]):
            if link.src is not None:
                prod.add_edge((pos, link.src), ((pos + 1) % m, j))
    on_cycle = set()
    for comp in nx.strongly_connected_components(prod):
        if len(comp) > 1 or any(prod.has_edge(x, x) for x in comp):
            on_cycle |= comp
    out = []
    for x in sorted(c for c in on_cycle if c[0] == 0):
        # Walk the cycle from x once around.
        cyc, cur = [], x
        while True:
            cyc.append(cur[1])
            cur = next(y for y in prod.successors(cur) if y in on_cycle)
            if cur == x:
                break
        # Walk back through the stem.
        back, idx, internal, start = [], x[1], False, 0
        for step in range(len(lasso.stem) - 1, -1, -1):
            link = links[steps[step]][idx]
            if link.src is None:
                internal, start = True, step + 1
                break
            idx = link.src
            back.append(idx)
        stem_track = tuple(reversed(back))
        if internal:
            origin = (start, stem_track[0] if stem_track else x[1])
        else:
            origin = (0, stem_track[0] if stem_track else x[1])
        thread = _thread_of(g, lasso, stem_track, start, cyc, links)
        out.append(LassoTrace(origin, internal, stem_track, tuple(cyc), thread))
    return out


def _thread_of(g, lasso, stem_track, start, cyc, links) -> Thread:
    m = len(lasso.loop)
    stem_entries = []
    idxs = list(stem_track) + [cyc[0]]
    for off, step in enumerate(range(start, len(lasso.stem))):
        u, s = lasso.stem[step], lasso.stem_slots[step]
        link = links[(u, s)][idxs[off + 1]]
        if link.principal:
            stem_entries.append((g.nodes[u].sequent[idxs[off]], link.branch))
    loop_entries = []
    for i in range(len(cyc)):
        u, s = lasso.loop[i % m], lasso.loop_slots[i % m]
        link = links[(u, s)][cyc[(i + 1) % len(cyc)]]
        if link.principal:
            loop_entries.append((g.nodes[u].sequent[cyc[i]], link.branch))
    return Thread(tuple(stem_entries), tuple(loop_entries))


def external_traces_only(g: ProofGraph, lasso: Lasso) -> list[LassoTrace]:
    """Infinite traces over the lasso starting at a root-conclusion occurrence."""
    return [t for t in lasso_traces(g, lasso) if not t.internal]


def internal_traces(g: ProofGraph, lasso: Lasso) -> list[LassoTrace]:
    return [t for t in lasso_traces(g, lasso) if t.internal]


def good_traces(g: ProofGraph, lasso: Lasso, closure: FlClosure | None = None) -> list[LassoTrace]:
    closure = closure or graph_closure(g)
    out = []
    for t in lasso_traces(g, lasso):
        try:
            if classify_thread(t.thread, closure) == "good":
                out.append(t)
        except WeakThreadError:
            pass
    return out


# --------------------------------------------------------------------------
# Verdicts


@dataclass
class ProgressVerdict:
    progressing: bool
    witnesses: list = field(default_factory=list)
    counterexample: Lasso | None = None

    def to_json(self) -> dict:
        out: dict = {"progressing": self.progressing, "witnesses": self.witnesses}
        out["counterexample"] = None if self.counterexample is None else self.counterexample.to_json()
        return out


def _min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _compose(r: frozenset, s: frozenset) -> frozenset:
    by_src: dict = {}
    for j, k, lab in s:
        by_src.setdefault(j, []).append((k, lab))
    out = set()
    for i, j, (ra, fa) in r:
        for k, (rb, fb) in by_src.get(j, ()):
            out.add((i, k, (_min(ra, rb), fa or fb)))
    return frozenset(out)


def _edge_composite(rel: StepRelation) -> frozenset:
    return frozenset((i, j, e.label()) for i, j, e in rel.pairs)


def _shortest_paths(g: ProofGraph) -> dict:
    """BFS tree from the root: node -> (stem nodes, stem slots)."""
    paths = {g.root: ((), ())}
    queue = deque([g.root])
    while queue:
        u = queue.popleft()
        for slot, v in enumerate(g.nodes[u].premises):
            if v not in paths:
                nodes, slots = paths[u]
                paths[v] = (nodes + (u,), slots + (slot,))
                queue.append(v)
    return paths


def _path_track(rels: list, k: int, target: tuple) -> list:
    """Occurrence indices from ``k`` back to ``k`` along ``rels`` realising ``target``."""
    layer = {(k, (None, False)): None}
    layers = [layer]
    for rel in rels:
        nxt = {}
        for (i, lab) in layer:
            for a, b, ev in rel.pairs:
                if a == i:
                    r, f = ev.label()
                    key = (b, (_min(lab[0], r), lab[1] or f))
                    nxt.setdefault(key, (i, lab))
        layers.append(nxt)
        layer = nxt
    key = (k, target)
    if key not in layer:
        raise AssertionError("composite entry not realised by a trace")
    track = []
    for lay in reversed(layers[1:]):
        track.append(key[0])
        key = lay[key]
    return list(reversed(track))  # indices after each step; last one is k


def check_progressivity(g: ProofGraph, tiebreak: str = "lex",
                        closure: FlClosure | None = None) -> ProgressVerdict:
    """Decide whether every infinite branch of ``g`` bears a good thread."""
    closure = closure or graph_closure(g, tiebreak)
    rels = step_relations(g, closure)
    out_edges: dict = {}
    for (u, s), rel in sorted(rels.items()):
        out_edges.setdefault(u, []).append((s, rel))
    paths = _shortest_paths(g)
    reach = sorted(paths, key=lambda n: (len(paths[n][0]), n))
    offending, witnesses = [], []
    for s0 in reach:
        parent: dict = {}
        queue = deque()
        for slot, rel in out_edges.get(s0, []):
            state = (rel.target, _edge_composite(rel))
            if state not in parent:
                parent[state] = (None, (s0, slot, rel))
                queue.append(state)
        while queue:
            state = queue.popleft()
            v, comp = state
            if v == s0 and _compose(comp, comp) == comp:
                goods = sorted((i, lab) for i, j, lab in comp
                               if i == j and lab[0] is not None and lab[0] % 2 == 0)
                loop = _unwind(parent, state)
                if goods:
                    k, lab = goods[0]
                    track = _path_track([e[2] for e in loop], k, lab)
                    witnesses.append({
                        "loop": [e[0] for e in loop],
                        "loopSlots": [e[1] for e in loop],
                        "occurrenceCycle": [k] + track[:-1],
                        "minRank": lab[0],
                        "parity": "even",
                    })
                else:
                    offending.append((s0, loop))
            for slot, rel in out_edges.get(v, []):
                nxt = (rel.target, _compose(comp, _edge_composite(rel)))
                if nxt not in parent:
                    parent[nxt] = (state, (v, slot, rel))
                    queue.append(nxt)
    if not offending:
        return ProgressVerdict(True, witnesses)
    def cost(item):
        s0, loop = item
        stem = paths[s0][0]
        return (len(stem), len(loop), list(stem), [e[0] for e in loop], [e[1] for e in loop])
    s0, loop = min(offending, key=cost)
    stem, stem_slots = paths[s0]
    lasso = Lasso(stem, stem_slots, tuple(e[0] for e in loop), tuple(e[1] for e in loop))
    return ProgressVerdict(False, [], lasso)


def _unwind(parent: dict, state) -> list:
    path = []
    while state is not None:
        prev, edge = parent[state]
        path.append(edge)
        state = prev
    return list(reversed(path))


# --------------------------------------------------------------------------
# Brute-force oracle


class OracleBudgetExceeded(RuntimeError):
    """Too many closed walks to enumerate within the requested bound."""


def completeness_bound(g: ProofGraph) -> int:
    return len(g.nodes) * g.max_sequent_length() * 2 + 2


def _loop_has_good_trace(loop_rels: list) -> bool:
    m = len(loop_rels)
    prod = nx.DiGraph()
    for pos, rel in enumerate(loop_rels):
        for i, j, ev in rel.pairs:
            prod.add_edge((pos, i), ((pos + 1) % m, j), rank=ev.rank)
    for cyc in nx.simple_cycles(prod):
        ranks = [prod.edges[a, b]["rank"] for a, b in zip(cyc, cyc[1:] + cyc[:1])]
        ranks = [r for r in ranks if r is not None]
        if ranks and min(ranks) % 2 == 0:
            return True
    return False


def _closed_walks(g: ProofGraph, rels: dict, dist: dict, bound: int, limit: int):
    """Primitive closed walks up to rotation, as lists of ``(node, slot)``.

    Parallel edges with equal step relations are merged.
    """
    edges: dict = {}
    for (u, s), rel in sorted(rels.items()):
        seen = {(v, p) for v, p in ((e[0], e[1].pairs) for e in edges.get(u, []))}
        if (rel.target, rel.pairs) not in seen:
            edges.setdefault(u, []).append((rel.target, rel, s))
    back: dict = {}
    rev = nx.DiGraph()
    for u, es in edges.items():
        for v, _, _ in es:
            rev.add_edge(v, u)
    seen_keys, count = set(), 0
    for s0 in sorted(dist):
        budget = bound - dist[s0]
        if budget < 1 or s0 not in rev:
            continue
        back = nx.single_source_shortest_path_length(rev, s0)
        stack = [(s0, [])]
        while stack:
            u, walk = stack.pop()
            for v, rel, s in edges.get(u, []):
                w = walk + [(u, s)]
                if v == s0:
                    key = _canonical(w)
                    if key is not None and key not in seen_keys:
                        seen_keys.add(key)
                        count += 1
                        if count > limit:
                            raise OracleBudgetExceeded(f"more than {limit} closed walks")
                        yield w
                if v in back and len(w) + back[v] <= budget:
                    stack.append((v, w))


def _canonical(walk: list):
    """Minimal rotation of a primitive walk; ``None`` for proper powers."""
    m = len(walk)
    for d in range(1, m):
        if m % d == 0 and walk == walk[d:] + walk[:d]:
            return None
    return min(tuple(walk[i:] + walk[:i]) for i in range(m))


def brute_force_progressivity(g: ProofGraph, bound: int | None = None,
                              tiebreak: str = "lex", limit: int = 200_000) -> ProgressVerdict:
    """Enumerate lassos with ``|stem| + |loop| <= bound`` and trace each one."""
    bound = completeness_bound(g) if bound is None else bound
    closure = graph_closure(g, tiebreak)
    rels = step_relations(g, closure)
    paths = _shortest_paths(g)
    dist = {n: len(p[0]) for n, p in paths.items()}
    bad = []
    for walk in _closed_walks(g, rels, dist, bound, limit):
        loop_rels = [rels[e] for e in walk]
        if not _loop_has_good_trace(loop_rels):
            bad.append(walk)
    if not bad:
        return ProgressVerdict(True)
    def cost(w):
        stem = paths[w[0][0]][0]
        return (len(stem), len(w), list(stem), w)
    best = min((w[i:] + w[:i] for w in bad for i in range(len(w))), key=cost)
    stem, slots = paths[best[0][0]]
    return ProgressVerdict(False, [], Lasso(stem, slots, tuple(u for u, _ in best),
                                            tuple(s for _, s in best)))


def lasso_is_bad(g: ProofGraph, lasso: Lasso, closure: FlClosure | None = None) -> bool:
    """No good thread on the lasso, by exhaustive trace enumeration."""
    closure = closure or graph_closure(g)
    rels = step_relations(g, closure)
    return not _loop_has_good_trace([rels[e] for e in zip(lasso.loop, lasso.loop_slots)])


def verdict_summary(v: ProgressVerdict) -> str:
    if v.progressing:
        return f"progressing ({len(v.witnesses)} loop witnesses)"
    c = v.counterexample
    return f"not progressing: stem {list(c.stem)} loop {list(c.loop)}"


__all__ = [
    "Event", "StepRelation", "Occurrence", "Thread", "Lasso", "LassoTrace",
    "ProgressVerdict", "WeakThreadError", "OracleBudgetExceeded",
    "step_relations", "classify_thread", "classify_structural", "classify_lasso",
    "lasso_thread", "lasso_traces", "external_traces_only", "internal_traces",
    "good_traces", "check_progressivity", "brute_force_progressivity",
    "completeness_bound", "lasso_is_bad", "graph_closure", "dominant_fixpoint",
]
