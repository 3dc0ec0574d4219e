"""Multicut normalisation of regular derivations.

A run keeps a finite emitted tree (cut-free by construction) and a set of
active multicuts hanging off its open positions.  Each multicut is a list
of premise slots, every slot a cursor into the unfolding of the source
graph, together with the cut pairs linking formula occurrences of
different slots; unpaired occurrences form the multicut's conclusion, in
order.  Each call to :meth:`Normalizer.step` performs one event of the
case analysis (I) expand, (II) commute an external rule below, (III)
reduce a critical pair.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .formula import ONE, parse_formula, render_formula
from .proof import (ProofGraph, Rule, Tree, ancestry, compose_cut,
                    identity_proof, load_proof, rule_from_json, rule_to_json,
                    save_proof)

KINDS = ("expand", "commuteUnary", "commuteBinary", "commuteWith",
         "criticalUnit", "criticalFix", "criticalTensorPar", "criticalPlusWith",
         "vanish")
STRATEGIES = ("first", "last", "alternate", "guided")


class BudgetExhausted(RuntimeError):
    def __init__(self, message: str, depth_log: list, state: "Normalizer"):
        super().__init__(message)
        self.depth_log = depth_log
        self.state = state


class PrefixUnstable(RuntimeError):
    """Some active multicut still sits at or above the requested depth."""


class StarViolation(AssertionError):
    """A unit vanish fired on a premise shape other than the one forced by (★)."""


def wrap_with_identities(d: ProofGraph) -> ProofGraph:
    """Cut every conclusion formula of ``d`` against its identity derivation."""
    return compose_cut(d, [(identity_proof(phi), phi) for phi in d.conclusion])


@dataclass(frozen=True)
class Cursor:
    node: str
    pos: tuple


@dataclass
class Multicut:
    id: int
    at: tuple
    order: list
    out: list
    pairs: dict
    turn: int = 0

    def to_json(self) -> dict:
        return {"id": self.id, "at": list(self.at), "order": list(self.order),
                "out": [list(o) for o in self.out],
                "pairs": [[list(a), list(b)] for a, b in sorted(self.pairs.items()) if a < b],
                "turn": self.turn}

    @staticmethod
    def from_json(obj) -> "Multicut":
        pairs = {}
        for a, b in obj["pairs"]:
            pairs[tuple(a)] = tuple(b)
            pairs[tuple(b)] = tuple(a)
        return Multicut(obj["id"], tuple(obj["at"]), list(obj["order"]),
                        [tuple(o) for o in obj["out"]], pairs, obj.get("turn", 0))


@dataclass
class ReductionEvent:
    step: int
    kind: str
    multicut: int
    location: tuple
    depth: int
    results: list  # of {"id", "at", "frontier"}
    frontier_before: tuple
    emitted: list = field(default_factory=list)
    slot: int | None = None  # premise index acted on (case II) or critical pair

    def to_json(self) -> dict:
        return {"step": self.step, "kind": self.kind, "multicut": self.multicut,
                "location": list(self.location), "depth": self.depth,
                "frontierBefore": [list(p) for p in self.frontier_before],
                "results": [{"id": r["id"], "at": list(r["at"]),
                             "frontier": [list(p) for p in r["frontier"]]} for r in self.results],
                "emitted": [list(p) for p in self.emitted]}


class Normalizer:
    """State of a fair multicut reduction run over a source graph."""

    def __init__(self, source: ProofGraph, *, strategy: str = "first",
                 keep_cuts: frozenset = frozenset(), star: bool = False):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.g = source
        self.strategy = strategy
        self.keep_cuts = frozenset(keep_cuts)
        self.star = star
        self.slots: dict[int, Cursor] = {}
        self.multicuts: dict[int, Multicut] = {}
        self.queue: deque = deque()
        self.parked: list = []
        self.emitted: dict[tuple, tuple] = {}
        self.step_count = 0
        self.depth_log: list[int] = []
        self._next_slot = 0
        self._next_mc = 0
        root = self._new_slot(Cursor(source.root, ()))
        seq = self._seq(root)
        mc = self._new_mc((), [root], [(root, i) for i in range(len(seq))], {})
        self.queue.append(mc.id)

    # -- bookkeeping -----------------------------------------------------

    def _new_slot(self, cur: Cursor) -> int:
        sid = self._next_slot
        self._next_slot += 1
        self.slots[sid] = cur
        return sid

    def _new_mc(self, at, order, out, pairs) -> Multicut:
        mc = Multicut(self._next_mc, tuple(at), list(order), list(out), dict(pairs))
        self._next_mc += 1
        self.multicuts[mc.id] = mc
        return mc

    def _node(self, s: int):
        return self.g.nodes[self.slots[s].node]

    def _seq(self, s: int) -> tuple:
        return self._node(s).sequent

    def _formula(self, occ) -> object:
        return self._seq(occ[0])[occ[1]]

    def frontier(self, mc: Multicut) -> tuple:
        return tuple(self.slots[s].pos for s in mc.order)

    def conclusion(self, mc: Multicut) -> tuple:
        return tuple(self._formula(o) for o in mc.out)

    @property
    def active(self) -> list:
        return sorted(self.multicuts)

    def _principal(self, s: int):
        rule = self._node(s).rule
        if rule.name in ("cut", "exch"):
            return None
        return (s, rule.principal)

    def _external(self, mc: Multicut, occ) -> bool:
        return occ not in mc.pairs

    # -- slot surgery ----------------------------------------------------

    def _advance(self, s: int, child: int):
        """New slot for premise ``child`` of slot ``s``.

        Returns ``(slot, ctx, minors, cut_occ)`` where ``ctx`` maps old
        context occurrences to new ones, ``minors`` lists new principal
        minor occurrences in order and ``cut_occ`` is the new cut-formula
        occurrence (if any).
        """
        node = self._node(s)
        cur = self.slots[s]
        links = ancestry(node.sequent, node.rule)[child]
        ns = self._new_slot(Cursor(node.premises[child], cur.pos + (child,)))
        ctx, minors, cut_occ = {}, [], None
        for j, link in enumerate(links):
            if link.src is None:
                cut_occ = (ns, j)
            elif link.principal:
                minors.append((ns, j))
            else:
                ctx[(s, link.src)] = (ns, j)
        return ns, ctx, minors, cut_occ

    @staticmethod
    def _rename(mc: Multicut, ren: dict) -> None:
        mc.out = [ren.get(o, o) for o in mc.out]
        mc.pairs = {ren.get(a, a): ren.get(b, b) for a, b in mc.pairs.items()}

    @staticmethod
    def _link(mc: Multicut, a, b) -> None:
        mc.pairs[a] = b
        mc.pairs[b] = a

    def _drop_slot(self, mc: Multicut, s: int) -> None:
        mc.order.remove(s)
        mc.out = [o for o in mc.out if o[0] != s]
        mc.pairs = {a: b for a, b in mc.pairs.items() if a[0] != s and b[0] != s}

    def _copy_mc(self, mc: Multicut, at) -> tuple:
        """Duplicate ``mc`` with fresh slot ids; returns ``(copy, slot map)``."""
        smap = {s: self._new_slot(self.slots[s]) for s in mc.order}
        ren = lambda o: (smap[o[0]], o[1])
        new = self._new_mc(at, [smap[s] for s in mc.order], [ren(o) for o in mc.out],
                           {ren(a): ren(b) for a, b in mc.pairs.items()})
        return new, smap

    def _components(self, mc: Multicut) -> list:
        parent = {s: s for s in mc.order}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in mc.pairs.items():
            parent[find(a[0])] = find(b[0])
        groups: dict = {}
        for s in mc.order:
            groups.setdefault(find(s), []).append(s)
        return list(groups.values())

    # -- emission --------------------------------------------------------

    def _emit(self, mc: Multicut, rule: Rule, emitted: list) -> None:
        self.emitted[mc.at] = (self.conclusion(mc), rule)
        emitted.append(mc.at)

    def _sort_out(self, mc: Multicut, key, emitted: list) -> None:
        """Bubble ``mc.out`` into ``key`` order, emitting one exch per swap."""
        out = mc.out
        changed = True
        while changed:
            changed = False
            for i in range(len(out) - 1):
                if key(out[i]) > key(out[i + 1]):
                    self._emit(mc, Rule("exch", index=i), emitted)
                    out[i], out[i + 1] = out[i + 1], out[i]
                    mc.at = mc.at + (0,)
                    changed = True
                    break

    # -- the step ----------------------------------------------------------

    def step(self) -> ReductionEvent | None:
        """Perform one event on the next scheduled multicut."""
        if not self.queue:
            return None
        mid = self.queue.popleft()
        mc = self.multicuts[mid]
        before = self.frontier(mc)
        at = mc.at
        kind, results, emitted, slot = self._reduce(mc)
        for r in results:
            self.queue.append(r)
        if mid not in results:
            del self.multicuts[mid]
        ev = ReductionEvent(
            self.step_count, kind, mid, at, len(at),
            [{"id": r, "at": self.multicuts[r].at, "frontier": self.frontier(self.multicuts[r])}
             for r in results],
            before, emitted, slot)
        self.step_count += 1
        self.depth_log.append(len(at))
        return ev

    def _reduce(self, mc: Multicut):
        # (I) a premise is an expandable cut
        for j, s in enumerate(mc.order):
            node = self._node(s)
            if node.rule.name == "cut" and self.slots[s].node not in self.keep_cuts:
                return self._expand(mc, s) + (j,)
        # exchange at a premise root: absorbed
        for j, s in enumerate(mc.order):
            if self._node(s).rule.name == "exch":
                ns, ctx, _, _ = self._advance(s, 0)
                mc.order[j] = ns
                self._rename(mc, ctx)
                return "commuteUnary", [mc.id], [], j
        choice = self._choose(mc)
        if choice[0] == "external":
            j = mc.order.index(choice[1])
            return self._commute(mc, choice[1]) + (j,)
        a, b = choice[1], choice[2]
        return self._critical(mc, a, b)

    def _candidates(self, mc: Multicut) -> list:
        out = []
        for s in mc.order:
            node = self._node(s)
            if node.rule.name == "cut":
                out.append(s)
                continue
            p = self._principal(s)
            if p is not None and self._external(mc, p):
                out.append(s)
        return out

    def _critical_pairs(self, mc: Multicut) -> list:
        pos = {s: j for j, s in enumerate(mc.order)}
        found = []
        for s in mc.order:
            p = self._principal(s)
            if p is None or p not in mc.pairs:
                continue
            q = mc.pairs[p]
            if self._principal(q[0]) == q and pos[s] < pos[q[0]]:
                found.append((pos[s], pos[q[0]], p, q))
        found.sort()
        return [(p, q) for _, _, p, q in found]

    def _choose(self, mc: Multicut):
        if self.strategy == "guided":
            pick = self._guided(mc)
            if pick is not None:
                return pick
        cands = self._candidates(mc)
        if cands:
            if self.strategy == "last":
                s = cands[-1]
            elif self.strategy == "alternate":
                s = cands[0] if mc.turn % 2 == 0 else cands[-1]
                mc.turn += 1
            else:
                s = cands[0]
            return ("external", s)
        pairs = self._critical_pairs(mc)
        if not pairs:
            raise AssertionError(f"multicut {mc.id}: no external principal and no critical pair")
        p, q = pairs[0]
        return ("critical", p, q)

    def _guided(self, mc: Multicut):
        """Follow the source derivation: handle its shallowest pending rule."""
        src = [s for s in mc.order if self.slots[s].node.startswith("d:")]
        for s in mc.order:
            if s in src:
                continue
            p = self._principal(s)
            if p is not None and self._external(mc, p) and not _negative(self._formula(p)):
                return ("external", s)
        if not src:
            return None
        s = min(src, key=lambda x: (len(self.slots[x].pos), self.slots[x].pos))
        if self._node(s).rule.name == "cut":
            return ("external", s)
        p = self._principal(s)
        if p is None:
            return None
        if self._external(mc, p):
            return ("external", s)
        q = mc.pairs[p]
        if self._principal(q[0]) == q:
            pos = {x: j for j, x in enumerate(mc.order)}
            return ("critical", p, q) if pos[s] < pos[q[0]] else ("critical", q, p)
        t = q[0]
        tp = self._principal(t)
        if tp is not None and self._external(mc, tp):
            return ("external", t)
        return None

    # -- (I) ---------------------------------------------------------------

    def _expand(self, mc: Multicut, s: int):
        j = mc.order.index(s)
        s0, ctx0, _, c0 = self._advance(s, 0)
        s1, ctx1, _, c1 = self._advance(s, 1)
        mc.order[j:j + 1] = [s0, s1]
        ren = dict(ctx0)
        ren.update(ctx1)
        self._rename(mc, ren)
        self._link(mc, c0, c1)
        return "expand", [mc.id], []

    # -- (II) --------------------------------------------------------------

    def _commute(self, mc: Multicut, s: int):
        node = self._node(s)
        rule = node.rule
        emitted: list = []
        if rule.name == "cut":
            return self._commute_binary(mc, s, emitted)
        p = (s, rule.principal)
        q = mc.out.index(p)
        name = rule.name
        if name in ("one", "top"):
            self._emit(mc, Rule(name, principal=q), emitted)
            return "commuteUnary", [], emitted
        if name == "with":
            self._emit(mc, Rule("with", principal=q), emitted)
            results = []
            for c in (0, 1):
                new, smap = self._copy_mc(mc, mc.at + (c,))
                ns = smap[s]
                ns2, ctx, minors, _ = self._advance(ns, c)
                new.order[new.order.index(ns)] = ns2
                new.out[q] = minors[0]
                self._rename(new, ctx)
                results.append(new.id)
            return "commuteWith", results, emitted
        if name == "tensor":
            return self._commute_binary(mc, s, emitted)
        # unary in place
        self._emit(mc, Rule(name, principal=q), emitted)
        ns, ctx, minors, _ = self._advance(s, 0)
        mc.order[mc.order.index(s)] = ns
        mc.out[q:q + 1] = minors
        self._rename(mc, ctx)
        mc.at = mc.at + (0,)
        return "commuteUnary", [mc.id], emitted

    def _commute_binary(self, mc: Multicut, s: int, emitted: list):
        rule = self._node(s).rule
        j = mc.order.index(s)
        s0, ctx0, m0, c0 = self._advance(s, 0)
        s1, ctx1, m1, c1 = self._advance(s, 1)
        mc.order[j:j + 1] = [s0, s1]
        ren = dict(ctx0)
        ren.update(ctx1)
        if rule.name == "tensor":
            p = (s, rule.principal)
            ren[p] = p  # keep the principal occurrence as a marker for now
        self._rename(mc, ren)
        comps = self._components(mc)
        side = {}
        for comp in comps:
            label = 0 if s0 in comp else 1 if s1 in comp else None
            if label is None:
                raise AssertionError("multicut is not connected")
            for x in comp:
                side[x] = label
        if rule.name == "tensor":
            p = (s, rule.principal)
            key = lambda o: (side[o[0]], 0) if o != p else (0, 1)
            if not _is_sorted([key(o) for o in mc.out if o != p]):
                self._sort_out(mc, key, emitted)
            q = mc.out.index(p)
            left = [o for o in mc.out if o != p and side[o[0]] == 0]
            right = [o for o in mc.out if o != p and side[o[0]] == 1]
            self._emit(mc, Rule("tensor", principal=q, left_len=len(left)), emitted)
            outs = (left + [m0[0]], right + [m1[0]])
        else:
            labels = [side[o[0]] for o in mc.out]
            if not _is_lrl(labels):
                self._sort_out(mc, lambda o: side[o[0]], emitted)
                labels = [side[o[0]] for o in mc.out]
            k = _leading(labels, 0)
            r = _leading(labels[k:], 1)
            trailing = len(labels) - k - r
            self._emit(mc, Rule("cut", cut_formula=rule.cut_formula, left_len=k,
                                right_len=r if trailing else None), emitted)
            outs = (mc.out[:k] + [c0] + mc.out[k + r:], [c1] + mc.out[k:k + r])
        results = []
        for c, comp_side in ((0, 0), (1, 1)):
            order = [x for x in mc.order if side[x] == comp_side]
            pairs = {a: b for a, b in mc.pairs.items() if side[a[0]] == comp_side}
            new = self._new_mc(mc.at + (c,), order, outs[c], pairs)
            results.append(new.id)
        return "commuteBinary", results, emitted

    # -- (III) -------------------------------------------------------------

    def _critical(self, mc: Multicut, p, q):
        a, b = p[0], q[0]
        ra, rb = self._node(a).rule.name, self._node(b).rule.name
        pos = {x: j for j, x in enumerate(mc.order)}
        slot = pos[a]
        if ra in ("mu", "nu"):
            na, ctxa, ma, _ = self._advance(a, 0)
            nb, ctxb, mb, _ = self._advance(b, 0)
            mc.order[pos[a]], mc.order[pos[b]] = na, nb
            self._drop_pair(mc, p, q)
            self._rename(mc, {**ctxa, **ctxb})
            self._link(mc, ma[0], mb[0])
            return "criticalFix", [mc.id], [], slot
        if {ra, rb} == {"tensor", "par"}:
            if ra == "par":
                a, b, p, q = b, a, q, p
            a0, ctx0, m0, _ = self._advance(a, 0)
            a1, ctx1, m1, _ = self._advance(a, 1)
            b0, ctxb, mb, _ = self._advance(b, 0)
            mc.order[pos[b]] = b0
            i = mc.order.index(a)
            mc.order[i:i + 1] = [a0, a1]
            self._drop_pair(mc, p, q)
            self._rename(mc, {**ctx0, **ctx1, **ctxb})
            self._link(mc, m0[0], mb[0])
            self._link(mc, m1[0], mb[1])
            return "criticalTensorPar", [mc.id], [], slot
        if {ra, rb} <= {"plus0", "plus1", "with"}:
            if ra == "with":
                a, b, p, q = b, a, q, p
            side = int(self._node(a).rule.name[-1])
            na, ctxa, ma, _ = self._advance(a, 0)
            nb, ctxb, mb, _ = self._advance(b, side)
            mc.order[pos[a]], mc.order[pos[b]] = na, nb
            self._drop_pair(mc, p, q)
            self._rename(mc, {**ctxa, **ctxb})
            self._link(mc, ma[0], mb[0])
            return "criticalPlusWith", [mc.id], [], slot
        if {ra, rb} == {"one", "bot"}:
            if ra == "bot":
                a, b, p, q = b, a, q, p
            n = len(mc.order)
            nb, ctxb, _, _ = self._advance(b, 0)
            mc.order[pos[b]] = nb
            self._drop_pair(mc, p, q)
            self._rename(mc, ctxb)
            mc.order.remove(a)
            if n == 2:
                if self.star:
                    seq, rule = self._seq(nb), self._node(nb).rule
                    if seq != (ONE,) or rule.name != "one":
                        raise StarViolation(f"unit vanish leaves [{', '.join(map(render_formula, seq))}]")
                return "vanish", [mc.id], [], slot
            return "criticalUnit", [mc.id], [], slot
        raise AssertionError(f"no critical rule for {ra}/{rb}")

    @staticmethod
    def _drop_pair(mc: Multicut, p, q) -> None:
        mc.pairs.pop(p, None)
        mc.pairs.pop(q, None)

    # -- running -----------------------------------------------------------

    def settled(self, depth: int) -> bool:
        return all(len(m.at) > depth for m in self.multicuts.values())

    def run(self, budget: int, target_depth: int | None = None) -> Iterator[ReductionEvent]:
        """Yield events until no multicut is left, every multicut sits below
        ``target_depth``, or ``budget`` events were spent."""
        spent = 0
        self.queue.extend(self.parked)
        self.parked = []
        while True:
            if target_depth is not None:
                keep = deque()
                while self.queue:
                    mid = self.queue.popleft()
                    (keep if len(self.multicuts[mid].at) <= target_depth else self.parked).append(mid)
                self.queue = keep
            if not self.queue:
                return
            if spent >= budget:
                raise BudgetExhausted(f"budget of {budget} events exhausted", list(self.depth_log), self)
            ev = self.step()
            spent += 1
            yield ev

    # -- views ---------------------------------------------------------------

    def prefix(self, depth: int) -> Tree:
        """The depth-``depth`` truncation of the limit (see :func:`emit_prefix`)."""
        holes = {m.at for m in self.multicuts.values()}

        def build(pos) -> Tree:
            if pos in holes or pos not in self.emitted:
                raise PrefixUnstable(f"position {list(pos)} is not yet cut-free")
            seq, rule = self.emitted[pos]
            arity = len(_premise_count(seq, rule))
            if arity == 0:
                return Tree(seq, rule)
            if len(pos) == depth:
                return Tree(seq)
            return Tree(seq, rule, tuple(build(pos + (i,)) for i in range(arity)))

        return build(())

    def to_json(self) -> dict:
        return {
            "source": save_proof(self.g),
            "strategy": self.strategy,
            "keepCuts": sorted(self.keep_cuts),
            "star": self.star,
            "slots": {str(k): {"node": c.node, "pos": list(c.pos)} for k, c in self.slots.items()},
            "multicuts": [m.to_json() for _, m in sorted(self.multicuts.items())],
            "queue": list(self.queue),
            "parked": list(self.parked),
            "emitted": [{"pos": list(p), "sequent": [render_formula(f) for f in s],
                         "rule": rule_to_json(r)} for p, (s, r) in sorted(self.emitted.items())],
            "stepCount": self.step_count,
            "depthLog": list(self.depth_log),
            "next": [self._next_slot, self._next_mc],
        }

    @classmethod
    def from_json(cls, obj) -> "Normalizer":
        if isinstance(obj, str):
            obj = json.loads(obj)
        self = cls.__new__(cls)
        self.g = load_proof(obj["source"])
        self.strategy = obj["strategy"]
        self.keep_cuts = frozenset(obj["keepCuts"])
        self.star = obj["star"]
        self.slots = {int(k): Cursor(v["node"], tuple(v["pos"])) for k, v in obj["slots"].items()}
        self.multicuts = {m["id"]: Multicut.from_json(m) for m in obj["multicuts"]}
        self.queue = deque(obj["queue"])
        self.parked = list(obj["parked"])
        self.emitted = {tuple(e["pos"]): (tuple(parse_formula(t) for t in e["sequent"]),
                                          rule_from_json(e["rule"])) for e in obj["emitted"]}
        self.step_count = obj["stepCount"]
        self.depth_log = list(obj["depthLog"])
        self._next_slot, self._next_mc = obj["next"]
        return self


def _negative(phi) -> bool:
    from .formula import Bot, Nu, Par, Top, With
    return isinstance(phi, (Bot, Top, Par, With, Nu))


def _premise_count(seq, rule) -> list:
    from .proof import premises_of
    return premises_of(seq, rule)


def _is_sorted(xs) -> bool:
    return all(a <= b for a, b in zip(xs, xs[1:]))


def _is_lrl(labels) -> bool:
    """Labels match ``0* 1* 0*``."""
    k = _leading(labels, 0)
    r = _leading(labels[k:], 1)
    return all(x == 0 for x in labels[k + r:])


def _leading(xs, v) -> int:
    n = 0
    for x in xs:
        if x != v:
            break
        n += 1
    return n


# --------------------------------------------------------------------------
# Public API


def source_cuts(g: ProofGraph) -> frozenset:
    return frozenset(nid for nid, n in g.nodes.items() if n.rule.name == "cut")


def start(d: ProofGraph, *, auto_wrap: bool = True, strategy: str | None = None,
          keep_source_cuts: bool = False) -> Normalizer:
    """A fresh run on ``d`` (wrapped with identities unless ``auto_wrap`` is off).

    With ``keep_source_cuts`` the cuts of ``d`` itself are copied into the
    output instead of being eliminated; only the identity cuts are reduced.
    """
    src = wrap_with_identities(d) if auto_wrap else d
    keep = frozenset()
    if keep_source_cuts:
        keep = frozenset("d:" + n for n in source_cuts(d)) if auto_wrap else source_cuts(d)
    if strategy is None:
        strategy = "guided" if auto_wrap else "first"
    return Normalizer(src, strategy=strategy, keep_cuts=keep, star=auto_wrap)


def normalize(d: ProofGraph, budget: int = 100_000, target_depth: int | None = None,
              auto_wrap: bool = True, *, strategy: str | None = None,
              keep_source_cuts: bool = False) -> Iterator[tuple]:
    """Stream ``(event, state)`` pairs of a fair multicut reduction run.

    Stops when no multicut is left, when every multicut sits deeper than
    ``target_depth``, or raises :class:`BudgetExhausted` after ``budget``
    events.
    """
    state = start(d, auto_wrap=auto_wrap, strategy=strategy, keep_source_cuts=keep_source_cuts)
    for ev in state.run(budget, target_depth):
        yield ev, state


def run_to_depth(d: ProofGraph, depth: int, budget: int = 100_000, **kw) -> tuple:
    """Run until stable at ``depth``; returns ``(state, events)``."""
    state = start(d, **kw)
    events = list(state.run(budget, depth))
    return state, events


def emit_prefix(state: Normalizer, depth: int) -> Tree:
    """Depth-``depth`` truncation of the limit derivation; cut-free."""
    if not state.settled(depth):
        raise PrefixUnstable(f"an active multicut sits at depth <= {depth}")
    return state.prefix(depth)


def depth_metric(events) -> list:
    """Minimal position length of the reduced multicut, per event."""
    return [ev.depth for ev in events]


def suffix_minima(log: list) -> list:
    out, cur = [], None
    for x in reversed(log):
        cur = x if cur is None else min(cur, x)
        out.append(cur)
    return list(reversed(out))


def events_to_jsonl(events) -> str:
    return "".join(json.dumps(ev.to_json()) + "\n" for ev in events)


from .reduce import reduce_step, NeedsMoreDepth, NotACut  # noqa: E402

__all__ = [
    "KINDS", "BudgetExhausted", "PrefixUnstable", "StarViolation", "Normalizer",
    "Multicut", "ReductionEvent", "Cursor", "wrap_with_identities", "normalize",
    "start", "run_to_depth", "emit_prefix", "depth_metric", "suffix_minima",
    "events_to_jsonl", "reduce_step", "NeedsMoreDepth", "NotACut", "source_cuts",
]
