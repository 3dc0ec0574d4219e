"""Regular encodings of the worked example derivations.

Every fixture is a function returning a fresh :class:`ProofGraph`.  The
names follow the figure they encode; ``FIXTURES`` lists them all together
with the verdict stated for each in the text.
"""
from __future__ import annotations

from .formula import parse_formula
from .proof import Node, ProofGraph, Rule, identity_proof


def build(nodes: dict, root: str) -> ProofGraph:
    """``nodes`` maps ids to ``(sequent strings, rule, premises)``."""
    out = {}
    for nid, (seq, rule, prem) in nodes.items():
        out[nid] = Node(tuple(parse_formula(s) for s in seq), rule, tuple(prem))
    return ProofGraph(out, root)


def R(name, **kw) -> Rule:
    if "cut" in kw:
        kw["cut_formula"] = parse_formula(kw.pop("cut"))
    return Rule(name, **kw)


# identity cases -------------------------------------------------------------

def id_one() -> ProofGraph:
    return identity_proof(parse_formula("1"))


def id_top() -> ProofGraph:
    return identity_proof(parse_formula("top"))


def id_mu() -> ProofGraph:
    return identity_proof(parse_formula("mu X. X"))


def id_tensor() -> ProofGraph:
    return identity_proof(parse_formula("1 * top"))


def id_plus() -> ProofGraph:
    return identity_proof(parse_formula("1 + top"))


def id_nu() -> ProofGraph:
    return identity_proof(parse_formula("nu X. (X * 1)"))


# examples of derivations ------------------------------------------------------

def left_example() -> ProofGraph:
    """Cut of a nu X.X loop against a mu X.X loop, with Gamma = bot."""
    return build({
        "r": (["bot"], R("cut", cut="nu X. X", left_len=1), ["l", "m"]),
        "l": (["bot", "nu X. X"], R("nu", principal=1), ["l"]),
        "m": (["mu X. X"], R("mu", principal=0), ["m"]),
    }, "r")


def centre_example(sigma: str) -> ProofGraph:
    """``A := sigma X. B(X)`` with ``B(X) := nu Y (X + Y)``, looping via the left summand."""
    a = f"{sigma} X. nu Y. (X + Y)"
    ba = f"nu Y. (({a}) + Y)"
    return build({
        "a": ([a], R(sigma, principal=0), ["b"]),
        "b": ([ba], R("nu", principal=0), ["p"]),
        "p": ([f"({a}) + ({ba})"], R("plus0", principal=0), ["a"]),
    }, "a")


# IC sets and their cut elimination behaviour ----------------------------------

def ic_case(case: int) -> ProofGraph:
    """The cut of a ``nu X.X`` side against a ``mu X.X`` side, with
    ``Gamma = nu Z.Z`` and ``Delta = nu W.W``.

    Left loop unfolds ``nu X.X`` (cases 1, 2) or ``nu Z.Z`` (cases 3, 4);
    right loop unfolds ``mu X.X`` (cases 1, 3) or ``nu W.W`` (cases 2, 4).
    """
    lp = 1 if case in (1, 2) else 0
    rp = (0, "mu") if case in (1, 3) else (1, "nu")
    return build({
        "r": (["nu Z. Z", "nu W. W"], R("cut", cut="nu X. X", left_len=1), ["l", "m"]),
        "l": (["nu Z. Z", "nu X. X"], R("nu", principal=lp), ["l"]),
        "m": (["mu X. X", "nu W. W"], R(rp[1], principal=rp[0]), ["m"]),
    }, "r")


def ic_remark() -> ProofGraph:
    """Only the first left rule works on the cut formula; the right side
    never touches ``mu X.X``: the pair of branches is an IC set no run visits."""
    return build({
        "r": (["nu Z. Z", "nu W. W"], R("cut", cut="nu X. X", left_len=1), ["l0", "m"]),
        "l0": (["nu Z. Z", "nu X. X"], R("nu", principal=1), ["l1"]),
        "l1": (["nu Z. Z", "nu X. X"], R("nu", principal=0), ["l1"]),
        "m": (["mu X. X", "nu W. W"], R("nu", principal=1), ["m"]),
    }, "r")


def external_example() -> ProofGraph:
    """Externally progressing but not progressing."""
    return build({
        "r": (["nu X. X"], R("cut", cut="nu Y. Y", left_len=1), ["a", "m"]),
        "a": (["nu X. X", "nu Y. Y"], R("nu", principal=0), ["b"]),
        "b": (["nu X. X", "nu Y. Y"], R("nu", principal=1), ["a"]),
        "m": (["mu Y. Y"], R("mu", principal=0), ["m"]),
    }, "r")


# small cut fixtures -------------------------------------------------------------

def unit_cut() -> ProofGraph:
    """``1`` against ``bot`` over ``1``: conclusion ``1``."""
    return build({
        "r": (["1"], R("cut", cut="1", left_len=0), ["o", "b"]),
        "o": (["1"], R("one", principal=0), []),
        "b": (["bot", "1"], R("bot", principal=0), ["p"]),
        "p": (["1"], R("one", principal=0), []),
    }, "r")


def cut_loop() -> ProofGraph:
    """A cut inside a nu-loop: progressing, with a cut on every turn."""
    return build({
        "n0": (["nu X. X"], R("nu", principal=0), ["n1"]),
        "n1": (["nu X. X"], R("cut", cut="bot", left_len=1), ["n2", "n3"]),
        "n2": (["nu X. X", "bot"], R("bot", principal=1), ["n0"]),
        "n3": (["1"], R("one", principal=0), []),
    }, "n0")


def cut_id_id() -> ProofGraph:
    """``id_1`` cut against ``id_1``: conclusion ``bot, 1``."""
    return build({
        "r": (["bot", "1"], R("cut", cut="1", left_len=1), ["a", "b"]),
        "a": (["bot", "1"], R("bot", principal=0), ["a1"]),
        "a1": (["1"], R("one", principal=0), []),
        "b": (["bot", "1"], R("bot", principal=0), ["b1"]),
        "b1": (["1"], R("one", principal=0), []),
    }, "r")


def bad_backedge() -> ProofGraph:
    """A nu-loop whose back-edge points at a node with a different sequent."""
    return build({
        "a": (["nu X. X", "1"], R("nu", principal=0), ["b"]),
        "b": (["nu X. X"], R("nu", principal=0), ["b"]),
    }, "a")


# catalogue ----------------------------------------------------------------------

# name -> (constructor, progressing?, has cuts?)
FIXTURES = {
    "id_1": (id_one, True),
    "id_top": (id_top, True),
    "id_mu": (id_mu, True),
    "id_tensor": (id_tensor, True),
    "id_plus": (id_plus, True),
    "id_nu": (id_nu, True),
    "left": (left_example, False),
    "centre_nu": (lambda: centre_example("nu"), True),
    "centre_mu": (lambda: centre_example("mu"), False),
    "ic_case1": (lambda: ic_case(1), False),
    "ic_case2": (lambda: ic_case(2), True),
    "ic_case3": (lambda: ic_case(3), False),
    "ic_case4": (lambda: ic_case(4), True),
    "ic_remark": (ic_remark, True),
    "external": (external_example, False),
    "unit_cut": (unit_cut, True),
    "cut_loop": (cut_loop, True),
    "cut_id_id": (cut_id_id, True),
}


def fixture(name: str) -> ProofGraph:
    return FIXTURES[name][0]()


def progressing_fixtures() -> list[str]:
    return [n for n, (_, ok) in FIXTURES.items() if ok]


def fixtures_with_cuts() -> list[str]:
    return [n for n, (mk, _) in FIXTURES.items() if mk().has_cut()]
