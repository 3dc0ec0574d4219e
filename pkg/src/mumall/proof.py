"""Sequents, rule instances and regular derivations.

A regular (cyclic) derivation is stored as a :class:`ProofGraph`: a finite
map from node ids to ``(sequent, rule, premises)`` where premise references
may point back to any node.  Finite truncations of the unfolding are
:class:`Tree` values; a node whose ``rule`` is ``None`` is an open leaf.

Rule layouts.  Logical rules act in place: the principal formula at index
``principal`` is replaced by its minor formulas.  The tensor rule sends the
first ``leftLen`` context formulas to the left premise and appends the
minors last.  The cut rule has premises ``Gamma, phi, Gamma'`` and
``phi^, Delta`` with conclusion ``Gamma, Delta, Gamma'``; ``|Gamma|`` is
``leftLen`` and ``|Delta|`` is ``rightLen`` (absent means ``Gamma'`` is
empty, the plain two-premise layout).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import (BOT, ONE, TOP, Bot, Formula, Mu, Nu, One, Par, Plus,
                      Tensor, Top, With, Zero, negate, parse_formula,
                      render_formula, unfold)

Sequent = tuple  # tuple[Formula, ...]

RULE_NAMES = ("one", "bot", "top", "tensor", "par", "plus0", "plus1", "with",
              "mu", "nu", "cut", "exch")
_UNARY_IN_PLACE = {"bot", "par", "plus0", "plus1", "mu", "nu"}


class RuleError(ValueError):
    """A rule instance does not fit its conclusion sequent."""


class SchemaError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


@dataclass(frozen=True)
class Rule:
    name: str
    principal: int | None = None
    left_len: int | None = None
    cut_formula: Formula | None = None
    index: int | None = None
    right_len: int | None = None

    def __post_init__(self):
        if self.name not in RULE_NAMES:
            raise RuleError(f"unknown rule {self.name!r}")

    @property
    def arity(self) -> int:
        if self.name in ("one", "top"):
            return 0
        if self.name in ("tensor", "with", "cut"):
            return 2
        return 1

    def short(self) -> str:
        if self.name == "cut":
            return f"cut[{render_formula(self.cut_formula)}]"
        if self.name == "exch":
            return f"exch[{self.index}]"
        return f"{self.name}@{self.principal}"


def seq_str(seq: Sequence[Formula]) -> str:
    return ", ".join(render_formula(f) for f in seq)


# --------------------------------------------------------------------------
# Rule semantics

def premises_of(seq: Sequent, rule: Rule) -> list[Sequent]:
    """Premise sequents of ``rule`` applied with conclusion ``seq``."""
    seq = tuple(seq)
    n = len(seq)
    name = rule.name
    if name == "exch":
        i = rule.index
        if i is None or not 0 <= i < n - 1:
            raise RuleError(f"exchange index {i} out of range")
        return [seq[:i] + (seq[i + 1], seq[i]) + seq[i + 2:]]
    if name == "cut":
        phi, k = rule.cut_formula, rule.left_len
        if phi is None or k is None:
            raise RuleError("cut needs cutFormula and leftLen")
        r = n - k if rule.right_len is None else rule.right_len
        if not (0 <= k <= n and 0 <= r <= n - k):
            raise RuleError("cut context lengths out of range")
        return [seq[:k] + (phi,) + seq[k + r:], (negate(phi),) + seq[k:k + r]]
    p = rule.principal
    if p is None or not 0 <= p < n:
        raise RuleError(f"principal index {p} out of range")
    f = seq[p]
    before, after = seq[:p], seq[p + 1:]
    if name == "one":
        if seq != (ONE,):
            raise RuleError("rule one needs the sequent 1")
        return []
    if name == "top":
        if not isinstance(f, Top):
            raise RuleError("principal formula is not top")
        return []
    if name == "bot":
        if not isinstance(f, Bot):
            raise RuleError("principal formula is not bot")
        return [before + after]
    if name == "par":
        if not isinstance(f, Par):
            raise RuleError("principal formula is not a par")
        return [before + (f.left, f.right) + after]
    if name in ("plus0", "plus1"):
        if not isinstance(f, Plus):
            raise RuleError("principal formula is not a plus")
        return [before + ((f.left if name == "plus0" else f.right),) + after]
    if name == "with":
        if not isinstance(f, With):
            raise RuleError("principal formula is not a with")
        return [before + (f.left,) + after, before + (f.right,) + after]
    if name in ("mu", "nu"):
        cls = Mu if name == "mu" else Nu
        if not isinstance(f, cls):
            raise RuleError(f"principal formula is not a {name} formula")
        return [before + (unfold(name, f),) + after]
    if name == "tensor":
        if not isinstance(f, Tensor):
            raise RuleError("principal formula is not a tensor")
        ctx = before + after
        k = rule.left_len
        if k is None or not 0 <= k <= len(ctx):
            raise RuleError("tensor leftLen out of range")
        return [ctx[:k] + (f.left,), ctx[k:] + (f.right,)]
    raise RuleError(f"unhandled rule {name}")


@dataclass(frozen=True)
class Link:
    """Ancestry of one premise occurrence.

    ``src`` is the conclusion index it descends from (``None`` for a cut
    formula); ``principal`` marks minor formulas of the principal
    occurrence; ``branch`` is which minor of the principal it is.
    """

    src: int | None
    principal: bool = False
    branch: int = 0


def ancestry(seq: Sequent, rule: Rule) -> list[list[Link]]:
    """For each premise, one :class:`Link` per premise occurrence."""
    n = len(seq)
    name = rule.name
    prem = premises_of(seq, rule)
    if name == "exch":
        i = rule.index
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return [[Link(perm[j]) for j in range(n)]]
    if name == "cut":
        k = rule.left_len
        r = len(prem[1]) - 1
        left = [Link(j) for j in range(k)] + [Link(None)]
        left += [Link(j + r) for j in range(k, len(prem[0]) - 1)]
        right = [Link(None)] + [Link(k + j) for j in range(r)]
        return [left, right]
    p = rule.principal
    if name in ("one", "top"):
        return []
    if name == "tensor":
        ctx = [j for j in range(n) if j != p]
        k = rule.left_len
        left = [Link(j) for j in ctx[:k]] + [Link(p, True, 0)]
        right = [Link(j) for j in ctx[k:]] + [Link(p, True, 1)]
        return [left, right]
    if name == "with":
        return [_in_place(n, p, [Link(p, True, b)]) for b in (0, 1)]
    if name == "bot":
        return [_in_place(n, p, [])]
    if name == "par":
        return [_in_place(n, p, [Link(p, True, 0), Link(p, True, 1)])]
    if name in ("plus0", "plus1"):
        return [_in_place(n, p, [Link(p, True, int(name[-1]))])]
    return [_in_place(n, p, [Link(p, True, 0)])]


def _in_place(n: int, p: int, minors: list[Link]) -> list[Link]:
    return [Link(j) for j in range(p)] + minors + [Link(j) for j in range(p + 1, n)]


# --------------------------------------------------------------------------
# Finite trees

@dataclass(frozen=True)
class Tree:
    """A finite derivation tree; ``rule is None`` marks an open leaf."""

    sequent: Sequent
    rule: Rule | None = None
    children: tuple = ()

    @property
    def is_open(self) -> bool:
        return self.rule is None

    def at(self, pos: Sequence[int]) -> "Tree":
        t = self
        for i in pos:
            t = t.children[i]
        return t

    def replace_at(self, pos: Sequence[int], sub: "Tree") -> "Tree":
        if not pos:
            return sub
        i = pos[0]
        kids = list(self.children)
        kids[i] = kids[i].replace_at(pos[1:], sub)
        return replace(self, children=tuple(kids))

    def positions(self) -> Iterator[tuple]:
        stack = [((), self)]
        while stack:
            pos, t = stack.pop()
            yield pos
            for i, c in enumerate(t.children):
                stack.append((pos + (i,), c))

    def labels(self) -> dict:
        return {pos: (self.at(pos).sequent, self.at(pos).rule) for pos in self.positions()}

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=-1)

    def is_prefix_of(self, other: "Tree") -> bool:
        """Every closed node here is identical in ``other``."""
        if self.sequent != other.sequent:
            return False
        if self.is_open:
            return True
        if self.rule != other.rule or len(self.children) != len(other.children):
            return False
        return all(a.is_prefix_of(b) for a, b in zip(self.children, other.children))

    def truncate(self, depth: int) -> "Tree":
        if self.is_open or not self.children:
            return self
        if depth == 0:
            return Tree(self.sequent)
        return replace(self, children=tuple(c.truncate(depth - 1) for c in self.children))

    def rules(self) -> Iterator[Rule]:
        for pos in self.positions():
            r = self.at(pos).rule
            if r is not None:
                yield r


def validate_tree(t: Tree) -> list[tuple]:
    """Defects of a finite tree; open leaves are allowed anywhere."""
    out = []
    for pos in t.positions():
        node = t.at(pos)
        if node.is_open:
            if node.children:
                out.append((pos, "open leaf with children"))
            continue
        try:
            prem = premises_of(node.sequent, node.rule)
        except RuleError as exc:
            out.append((pos, str(exc)))
            continue
        if len(prem) != len(node.children):
            out.append((pos, f"expected {len(prem)} premises, found {len(node.children)}"))
            continue
        for i, (want, child) in enumerate(zip(prem, node.children)):
            if tuple(want) != tuple(child.sequent):
                out.append((pos, f"premise {i} is [{seq_str(child.sequent)}], "
                                 f"rule expects [{seq_str(want)}]"))
    return out


# --------------------------------------------------------------------------
# Proof graphs

@dataclass(frozen=True)
class Node:
    sequent: Sequent
    rule: Rule
    premises: tuple = ()


@dataclass(frozen=True)
class ProofGraph:
    nodes: Mapping[str, Node]
    root: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))

    def __eq__(self, other):
        return isinstance(other, ProofGraph) and self.root == other.root and self.nodes == other.nodes

    def __hash__(self):
        return hash((self.root, tuple(sorted(self.nodes))))

    @property
    def conclusion(self) -> Sequent:
        return self.nodes[self.root].sequent

    def edges(self) -> Iterator[tuple]:
        """``(source, slot, target)`` for every premise reference."""
        for nid in sorted(self.nodes):
            for slot, tgt in enumerate(self.nodes[nid].premises):
                yield nid, slot, tgt

    def formulas(self) -> set:
        out = set()
        for node in self.nodes.values():
            out.update(node.sequent)
            if node.rule.cut_formula is not None:
                out.add(node.rule.cut_formula)
                out.add(negate(node.rule.cut_formula))
        return out

    def max_sequent_length(self) -> int:
        return max(len(n.sequent) for n in self.nodes.values())

    def has_cut(self) -> bool:
        return any(n.rule.name == "cut" for n in self.nodes.values())

    def node_at(self, pos: Sequence[int]) -> str:
        nid = self.root
        for i in pos:
            nid = self.nodes[nid].premises[i]
        return nid

    def reachable(self) -> list[str]:
        seen, order, stack = set(), [], [self.root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            order.append(nid)
            stack.extend(reversed(self.nodes[nid].premises))
        return order


def validate_local(g: ProofGraph) -> list[tuple]:
    """``(nodeId, defect)`` pairs; empty iff every node is a correct rule
    instance whose premise references (back-edges included) match exactly."""
    report = []
    if g.root not in g.nodes:
        report.append((g.root, "root does not name a node"))
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        try:
            want = premises_of(node.sequent, node.rule)
        except RuleError as exc:
            report.append((nid, str(exc)))
            continue
        if len(want) != len(node.premises):
            report.append((nid, f"expected {len(want)} premises, found {len(node.premises)}"))
            continue
        for i, (seq, ref) in enumerate(zip(want, node.premises)):
            if ref not in g.nodes:
                report.append((nid, f"premise {i} refers to missing node {ref!r}"))
            elif tuple(g.nodes[ref].sequent) != tuple(seq):
                report.append((nid, f"premise {i} -> {ref} has [{seq_str(g.nodes[ref].sequent)}], "
                                    f"rule expects [{seq_str(seq)}]"))
    return report


def unfold_to_depth(g: ProofGraph, depth: int, start: str | None = None) -> Tree:
    """Truncation of the infinite unfolding to positions of length <= depth."""
    def build(nid: str, d: int) -> Tree:
        node = g.nodes[nid]
        if not node.premises:
            return Tree(node.sequent, node.rule)
        if d == 0:
            return Tree(node.sequent)
        return Tree(node.sequent, node.rule, tuple(build(p, d - 1) for p in node.premises))

    return build(g.root if start is None else start, depth)


# --------------------------------------------------------------------------
# Identity derivations

_NEGATIVE = (Bot, Top, Par, With, Nu)


def identity_proof(phi: Formula) -> ProofGraph:
    """Regular identity derivation with conclusion ``phi^, phi``.

    Nodes are shared per stage of the identity scheme.  Intermediate nodes
    are keyed by their sequent and by the side still to be decomposed: with
    vacuous binders two stages can meet on the same sequent while needing
    rules on opposite sides.
    """
    nodes: dict[str, Node] = {}
    ids: dict = {}

    def fresh(key) -> tuple[str, bool]:
        if key in ids:
            return ids[key], False
        nid = f"n{len(ids)}"
        ids[key] = nid
        return nid, True

    def pair(a: Formula, b: Formula) -> str:
        nid, new = fresh(("pair", a, b))
        if not new:
            return nid
        q = 0 if isinstance(a, _NEGATIVE) else 1
        o = 1 - q
        seq = (a, b)
        f = seq[q]
        if isinstance(f, Bot):
            one, _ = fresh(("one",))
            nodes[one] = Node((ONE,), Rule("one", principal=0))
            nodes[nid] = Node(seq, Rule("bot", principal=q), (one,))
        elif isinstance(f, Top):
            nodes[nid] = Node(seq, Rule("top", principal=q))
        elif isinstance(f, Par):
            prem = premises_of(seq, Rule("par", principal=q))[0]
            mid, _ = fresh(("tensor", q, prem))
            tp = 2 if q == 0 else 0
            nodes[nid] = Node(seq, Rule("par", principal=q), (mid,))
            nodes[mid] = None  # reserve before recursing
            left = pair(f.left, negate(f.left))
            right = pair(f.right, negate(f.right))
            nodes[mid] = Node(prem, Rule("tensor", principal=tp, left_len=1), (left, right))
        elif isinstance(f, With):
            kids = []
            for b, sub in enumerate((f.left, f.right)):
                prem = seq[:q] + (sub,) + seq[q + 1:]
                mid, _ = fresh(("plus", o, b, prem))
                nodes[mid] = None
                kids.append((mid, prem, b, sub))
            nodes[nid] = Node(seq, Rule("with", principal=q), tuple(k[0] for k in kids))
            for mid, prem, b, sub in kids:
                target = (sub, negate(sub)) if q == 0 else (negate(sub), sub)
                nodes[mid] = Node(prem, Rule(f"plus{b}", principal=o), (pair(*target),))
        elif isinstance(f, Nu):
            prem = premises_of(seq, Rule("nu", principal=q))[0]
            mid, _ = fresh(("mu", o, prem))
            nodes[nid] = Node(seq, Rule("nu", principal=q), (mid,))
            nodes[mid] = None
            after = premises_of(prem, Rule("mu", principal=o))[0]
            nodes[mid] = Node(prem, Rule("mu", principal=o), (pair(*after),))
        else:
            raise AssertionError(f"no negative formula in {seq_str(seq)}")
        return nid

    root = pair(negate(phi), phi)
    return ProofGraph(nodes, root)


# --------------------------------------------------------------------------
# Cut composition

def _rename(g: ProofGraph, prefix: str) -> dict[str, Node]:
    return {prefix + nid: Node(n.sequent, n.rule, tuple(prefix + p for p in n.premises))
            for nid, n in g.nodes.items()}


def compose_cut(d: ProofGraph, cuts: Sequence[tuple]) -> ProofGraph:
    """``<d | e_1, ..., e_n>`` for ``d`` concluding ``Gamma, phi_1..phi_n``
    and each ``e_i`` concluding ``phi_i^, Delta_i``.

    The result concludes ``Gamma, Delta_1, ..., Delta_n``; the first cut sits
    directly below ``d`` and the last one is the new root.  Node ids of ``d``
    are prefixed ``d:``, those of ``e_i`` ``e{i}:``, cut nodes are ``cut{i}``.
    """
    if not cuts:
        return d
    concl = d.conclusion
    n = len(cuts)
    if n > len(concl):
        raise ValueError("more cuts than conclusion formulas")
    gamma = len(concl) - n
    nodes = _rename(d, "d:")
    below = "d:" + d.root
    seq = tuple(concl)
    pos = gamma
    for i, (e, phi) in enumerate(cuts, start=1):
        if seq[pos] != phi:
            raise ValueError(f"cut formula {render_formula(phi)} does not match "
                             f"{render_formula(seq[pos])} at position {pos}")
        econ = e.conclusion
        if not econ or econ[0] != negate(phi):
            raise ValueError(f"cut partner must conclude {render_formula(negate(phi))} first")
        nodes.update(_rename(e, f"e{i}:"))
        delta = tuple(econ[1:])
        last = pos == len(seq) - 1
        seq = seq[:pos] + delta + seq[pos + 1:]
        rule = Rule("cut", cut_formula=phi, left_len=pos,
                    right_len=None if last else len(delta))
        cid = f"cut{i}"
        nodes[cid] = Node(seq, rule, (below, f"e{i}:" + e.root))
        below = cid
        pos += len(delta)
    return ProofGraph(nodes, below)


# --------------------------------------------------------------------------
# JSON and DOT

def rule_to_json(rule: Rule) -> dict:
    out: dict = {"name": rule.name}
    if rule.principal is not None:
        out["principal"] = rule.principal
    if rule.left_len is not None:
        out["leftLen"] = rule.left_len
    if rule.right_len is not None:
        out["rightLen"] = rule.right_len
    if rule.cut_formula is not None:
        out["cutFormula"] = render_formula(rule.cut_formula)
    if rule.index is not None:
        out["index"] = rule.index
    return out


def _int(obj, key, ptr):
    v = obj.get(key)
    if v is None:
        return None
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{ptr}/{key}", "expected an integer")
    return v


def _formula(text, ptr):
    if not isinstance(text, str):
        raise SchemaError(ptr, "expected a formula string")
    try:
        return parse_formula(text)
    except ValueError as exc:
        raise SchemaError(ptr, str(exc)) from None


def rule_from_json(obj, ptr: str = "/rule") -> Rule:
    if not isinstance(obj, dict):
        raise SchemaError(ptr, "expected an object")
    name = obj.get("name")
    if name == "plus":
        side = _int(obj, "side", ptr)
        if side not in (0, 1):
            raise SchemaError(f"{ptr}/side", "expected 0 or 1")
        name = f"plus{side}"
    if name not in RULE_NAMES:
        raise SchemaError(f"{ptr}/name", f"unknown rule {name!r}")
    cut = obj.get("cutFormula")
    return Rule(
        name,
        principal=_int(obj, "principal", ptr),
        left_len=_int(obj, "leftLen", ptr),
        cut_formula=None if cut is None else _formula(cut, f"{ptr}/cutFormula"),
        index=_int(obj, "index", ptr),
        right_len=_int(obj, "rightLen", ptr),
    )


def save_proof(g: ProofGraph) -> dict:
    return {
        "root": g.root,
        "nodes": {
            nid: {
                "sequent": [render_formula(f) for f in n.sequent],
                "rule": rule_to_json(n.rule),
                "premises": list(n.premises),
            }
            for nid, n in sorted(g.nodes.items())
        },
    }


def load_proof(doc) -> ProofGraph:
    """Build a graph from the JSON document (a dict or a JSON string)."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise SchemaError("", "expected an object")
    if "root" not in doc:
        raise SchemaError("/root", "missing key")
    if not isinstance(doc["root"], str):
        raise SchemaError("/root", "expected a string")
    if "nodes" not in doc:
        raise SchemaError("/nodes", "missing key")
    if not isinstance(doc["nodes"], dict):
        raise SchemaError("/nodes", "expected an object")
    nodes = {}
    for nid, obj in doc["nodes"].items():
        ptr = f"/nodes/{_escape(nid)}"
        if not isinstance(obj, dict):
            raise SchemaError(ptr, "expected an object")
        for key in ("sequent", "rule", "premises"):
            if key not in obj:
                raise SchemaError(f"{ptr}/{key}", "missing key")
        if not isinstance(obj["sequent"], list):
            raise SchemaError(f"{ptr}/sequent", "expected a list")
        seq = tuple(_formula(t, f"{ptr}/sequent/{i}") for i, t in enumerate(obj["sequent"]))
        rule = rule_from_json(obj["rule"], f"{ptr}/rule")
        prem = obj["premises"]
        if not isinstance(prem, list) or not all(isinstance(p, str) for p in prem):
            raise SchemaError(f"{ptr}/premises", "expected a list of node ids")
        nodes[nid] = Node(seq, rule, tuple(prem))
    return ProofGraph(nodes, doc["root"])


def _escape(token: str) -> str:
    return token.replace("~", "~0").replace("/", "~1")


def _dot_label(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(obj) -> str:
    """DOT text for a :class:`ProofGraph` (dashed back-edges) or a :class:`Tree`."""
    lines = ["digraph proof {"]
    if isinstance(obj, ProofGraph):
        tree_edges = set()
        seen = {obj.root}
        stack = [obj.root]
        while stack:
            nid = stack.pop()
            for slot, p in enumerate(obj.nodes[nid].premises):
                if p not in seen:
                    seen.add(p)
                    tree_edges.add((nid, slot))
                    stack.append(p)
        for nid in sorted(obj.nodes):
            n = obj.nodes[nid]
            label = _dot_label(f"{nid}: {seq_str(n.sequent)}") + "\\n" + _dot_label(n.rule.short())
            lines.append(f'  "{nid}" [shape=box, label="{label}"];')
        for nid, slot, tgt in obj.edges():
            style = "" if (nid, slot) in tree_edges else " [style=dashed]"
            lines.append(f'  "{nid}" -> "{tgt}"{style};')
    elif isinstance(obj, Tree):
        for pos in sorted(obj.positions()):
            t = obj.at(pos)
            nid = "p" + ".".join(map(str, pos))
            rule = "open" if t.is_open else t.rule.short()
            label = _dot_label(f"{nid}: {seq_str(t.sequent)}") + "\\n" + _dot_label(rule)
            lines.append(f'  "{nid}" [shape=box, label="{label}"];')
            if pos:
                parent = "p" + ".".join(map(str, pos[:-1]))
                lines.append(f'  "{parent}" -> "{nid}";')
    else:
        raise TypeError(f"cannot export {type(obj).__name__}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(t: Tree) -> dict:
    out: dict = {"sequent": [render_formula(f) for f in t.sequent]}
    if t.is_open:
        out["open"] = True
    else:
        out["rule"] = rule_to_json(t.rule)
        out["children"] = [tree_to_json(c) for c in t.children]
    return out


def tree_from_json(obj) -> Tree:
    seq = tuple(parse_formula(s) for s in obj["sequent"])
    if obj.get("open"):
        return Tree(seq)
    return Tree(seq, rule_from_json(obj["rule"]), tuple(tree_from_json(c) for c in obj["children"]))


def tree_to_graph(t: Tree) -> ProofGraph:
    """A finite tree without open leaves as a proof graph (ids ``p0.1...``)."""
    nodes = {}
    for pos in t.positions():
        node = t.at(pos)
        if node.is_open:
            raise ValueError("open leaf cannot be stored in a proof graph")
        nid = "p" + ".".join(map(str, pos))
        kids = tuple("p" + ".".join(map(str, pos + (i,))) for i in range(len(node.children)))
        nodes[nid] = Node(node.sequent, node.rule, kids)
    return ProofGraph(nodes, "p")
