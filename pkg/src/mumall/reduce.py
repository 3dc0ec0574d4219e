"""One-step cut reductions on finite derivation trees.

Every reduct is rebuilt with explicit exchange rules so that its conclusion
is exactly the conclusion of the reduced cut.
"""
from __future__ import annotations

from typing import Sequence

from .formula import negate
from .proof import Rule, Tree, ancestry, premises_of


class NotACut(ValueError):
    pass


class NeedsMoreDepth(ValueError):
    """A premise of the cut is an open leaf of the truncation."""


def _perm_to(src: Sequence, dst: Sequence) -> list[int]:
    """``perm`` with ``dst[i] == src[perm[i]]``; stable on repeated formulas."""
    used = [False] * len(src)
    perm = []
    if len(src) != len(dst):
        raise ValueError("sequents differ in length")
    for f in dst:
        for i, g in enumerate(src):
            if not used[i] and g == f:
                used[i] = True
                perm.append(i)
                break
        else:
            raise ValueError("sequents are not permutations of each other")
    return perm


def exch_to(t: Tree, target: Sequence) -> Tree:
    """Stack exchange rules under ``t`` until its conclusion is ``target``."""
    target = tuple(target)
    if tuple(t.sequent) == target:
        return t
    perm = _perm_to(t.sequent, target)
    seqs = [tuple(t.sequent)]
    swaps = []
    arr = list(t.sequent)
    order = list(range(len(arr)))  # order[i] = source index now at position i
    for i in range(len(perm)):
        j = order.index(perm[i])
        while j > i:
            order[j - 1], order[j] = order[j], order[j - 1]
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            swaps.append(j - 1)
            seqs.append(tuple(arr))
            j -= 1
    node = t
    for k, s in enumerate(swaps, start=1):
        node = Tree(seqs[k], Rule("exch", index=s), (node,))
    assert node.sequent == target
    return node


def cut_splice(left: Tree, i: int, right: Tree, j: int) -> Tree:
    """Cut ``left``'s occurrence ``i`` against ``right``'s occurrence ``j``.

    The conclusion is ``left[:i] + (right without j) + left[i+1:]``.
    """
    phi = left.sequent[i]
    if right.sequent[j] != negate(phi):
        raise ValueError("cut occurrences are not dual")
    rseq = tuple(right.sequent)
    moved = (rseq[j],) + rseq[:j] + rseq[j + 1:]
    right = exch_to(right, moved)
    delta = moved[1:]
    lseq = tuple(left.sequent)
    concl = lseq[:i] + delta + lseq[i + 1:]
    last = i == len(lseq) - 1
    rule = Rule("cut", cut_formula=phi, left_len=i, right_len=None if last else len(delta))
    return Tree(concl, rule, (left, right))


def _splice_pos(x: int, i: int, rlen: int) -> int:
    """Where position ``x`` of the left premise lands after ``cut_splice``."""
    return x if x < i else x + rlen - 2


def _splice_pos_right(x: int, i: int, j: int) -> int:
    """Where position ``x`` of the right premise lands (``x != j``)."""
    return i + (x if x < j else x - 1)


def _minor_positions(seq, rule, child) -> tuple:
    links = ancestry(seq, rule)[child]
    minors = [k for k, l in enumerate(links) if l.principal]
    cut = [k for k, l in enumerate(links) if l.src is None]
    return links, minors, cut


def _assemble(rule: Rule, principal_formula, kids: list) -> Tree:
    """Reapply ``rule`` (by name) over rebuilt premises.

    ``kids`` holds ``(tree, minors, cutpos)`` per premise.  The rebuilt rule
    uses a canonical layout; callers reorder its conclusion afterwards.
    """
    name = rule.name
    if name in ("bot", "par", "plus0", "plus1", "mu", "nu"):
        (t, minors, _), = kids
        ctx = [f for k, f in enumerate(t.sequent) if k not in minors]
        t = exch_to(t, ctx + [t.sequent[k] for k in minors])
        return Tree(tuple(ctx) + (principal_formula,), Rule(name, principal=len(ctx)), (t,))
    if name == "with":
        (t0, m0, _), (t1, m1, _) = kids
        ctx = [f for k, f in enumerate(t0.sequent) if k not in m0]
        t0 = exch_to(t0, ctx + [t0.sequent[m0[0]]])
        t1 = exch_to(t1, ctx + [t1.sequent[m1[0]]])
        return Tree(tuple(ctx) + (principal_formula,), Rule("with", principal=len(ctx)), (t0, t1))
    if name == "tensor":
        (t0, m0, _), (t1, m1, _) = kids
        c0 = [f for k, f in enumerate(t0.sequent) if k not in m0]
        c1 = [f for k, f in enumerate(t1.sequent) if k not in m1]
        t0 = exch_to(t0, c0 + [t0.sequent[m0[0]]])
        t1 = exch_to(t1, c1 + [t1.sequent[m1[0]]])
        concl = tuple(c0 + c1) + (principal_formula,)
        return Tree(concl, Rule("tensor", principal=len(concl) - 1, left_len=len(c0)), (t0, t1))
    if name == "cut":
        (t0, _, cut0), (t1, _, cut1) = kids
        return cut_splice(t0, cut0[0], t1, cut1[0])
    if name == "exch":
        (t, _, _), = kids
        return t
    raise AssertionError(f"cannot reassemble {name}")


def _commute_left(cut: Tree) -> Tree:
    """Push the cut above the last rule of the left premise."""
    L, R = cut.children
    k = cut.rule.left_len
    rule = L.rule
    if rule.name == "top":
        q = _splice_pos(rule.principal, k, len(R.sequent))
        return Tree(cut.sequent, Rule("top", principal=q))
    kids = []
    for c, Lc in enumerate(L.children):
        links, minors, cutpos = _minor_positions(L.sequent, rule, c)
        idx = next((x for x, l in enumerate(links) if l.src == k), None)
        if idx is None:
            kids.append((Lc, minors, cutpos))
            continue
        N = cut_splice(Lc, idx, R, 0)
        f = lambda x: _splice_pos(x, idx, len(R.sequent))
        kids.append((N, [f(x) for x in minors], [f(x) for x in cutpos]))
    phi = L.sequent[rule.principal] if rule.principal is not None else None
    return exch_to(_assemble(rule, phi, kids), cut.sequent)


def _commute_right(cut: Tree) -> Tree:
    """Push the cut above the last rule of the right premise."""
    L, R = cut.children
    k = cut.rule.left_len
    rule = R.rule
    if rule.name == "top":
        q = k + rule.principal - 1
        return Tree(cut.sequent, Rule("top", principal=q))
    kids = []
    for c, Rc in enumerate(R.children):
        links, minors, cutpos = _minor_positions(R.sequent, rule, c)
        idx = next((x for x, l in enumerate(links) if l.src == 0), None)
        if idx is None:
            kids.append((Rc, minors, cutpos))
            continue
        N = cut_splice(L, k, Rc, idx)
        f = lambda x: _splice_pos_right(x, k, idx)
        kids.append((N, [f(x) for x in minors], [f(x) for x in cutpos]))
    phi = R.sequent[rule.principal] if rule.principal is not None else None
    return exch_to(_assemble(rule, phi, kids), cut.sequent)


def _critical(cut: Tree) -> tuple[str, Tree]:
    L, R = cut.children
    k = cut.rule.left_len
    a, b = L.rule.name, R.rule.name
    if {a, b} == {"mu", "nu"}:
        return "criticalFix", exch_to(cut_splice(L.children[0], k, R.children[0], 0), cut.sequent)
    if {a, b} == {"one", "bot"}:
        rest = R.children[0] if b == "bot" else L.children[0]
        return "criticalUnit", exch_to(rest, cut.sequent)
    if {a, b} <= {"plus0", "plus1", "with"}:
        if a == "with":
            i = int(b[-1])
            return "criticalPlusWith", exch_to(cut_splice(L.children[i], k, R.children[0], 0), cut.sequent)
        i = int(a[-1])
        return "criticalPlusWith", exch_to(cut_splice(L.children[0], k, R.children[i], 0), cut.sequent)
    if {a, b} == {"tensor", "par"}:
        if a == "tensor":
            T0, T1 = L.children
            P = R.children[0]  # A^, B^, Delta
            inner = cut_splice(T0, len(T0.sequent) - 1, P, 0)
            posb = _splice_pos_right(1, len(T0.sequent) - 1, 0)
            outer = cut_splice(T1, len(T1.sequent) - 1, inner, posb)
        else:
            P = L.children[0]  # Gamma, A^, B^, Gamma' with A^ at k
            T0, T1 = R.children
            inner = cut_splice(P, k, T0, len(T0.sequent) - 1)
            posb = _splice_pos(k + 1, k, len(T0.sequent))
            outer = cut_splice(inner, posb, T1, len(T1.sequent) - 1)
        return "criticalTensorPar", exch_to(outer, cut.sequent)
    raise AssertionError(f"no critical reduction for {a}/{b}")


def reducts(t: Tree, pos: Sequence[int] = ()) -> list[tuple[str, Tree]]:
    """All one-step reducts of the cut at ``pos``, as ``(kind, tree)`` pairs."""
    pos = tuple(pos)
    node = t.at(pos)
    if node.is_open or node.rule.name != "cut":
        raise NotACut(f"no cut at position {list(pos)}")
    L, R = node.children
    if L.is_open or R.is_open:
        raise NeedsMoreDepth(f"a premise of the cut at {list(pos)} is truncated")
    k = node.rule.left_len
    lp = L.rule.principal if L.rule.name not in ("cut", "exch") else None
    rp = R.rule.principal if R.rule.name not in ("cut", "exch") else None
    out = []
    if lp == k and rp == 0:
        kind, sub = _critical(node)
        out.append((kind, sub))
    else:
        if lp != k:
            kind = {"with": "commuteWith", "tensor": "commuteBinary", "cut": "commuteBinary"}.get(L.rule.name, "commuteUnary")
            out.append((kind, _commute_left(node)))
        if rp != 0:
            kind = {"with": "commuteWith", "tensor": "commuteBinary", "cut": "commuteBinary"}.get(R.rule.name, "commuteUnary")
            out.append((kind, _commute_right(node)))
    return [(kind, t.replace_at(pos, sub)) for kind, sub in out]


def reduce_step(t: Tree, pos: Sequence[int] = (), choice: str | None = None) -> list[Tree]:
    """One-step reducts at ``pos``; ``choice`` keeps only reducts of that kind."""
    return [r for kind, r in reducts(t, pos) if choice is None or kind == choice]


def count_cuts(t: Tree) -> int:
    return sum(1 for r in t.rules() if r.name == "cut")


__all__ = ["reduce_step", "reducts", "cut_splice", "exch_to", "count_cuts",
           "NotACut", "NeedsMoreDepth", "premises_of"]
