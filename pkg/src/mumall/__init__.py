"""Ill-founded proofs for multiplicative-additive linear logic with fixed points.

Submodules:

``formula``   formulas, negation, Fischer-Ladner closures and priorities
``proof``     rules, regular proof graphs, local validity, JSON and DOT
``progress``  threads, the progressivity checker and its brute-force oracle
``cutelim``   productive multicut elimination with identity wrapping
``reduce``    one-step cut reductions on finite trees
``icsets``    frontiers, coverings, coherence and bounded IC-set checks
``fixtures``  encodings of the worked example derivations
``randgen``   seeded random formulas, graphs, trees and threads
"""
from .formula import Formula, fl_closure, negate, parse_formula, render_formula
from .proof import (ProofGraph, Rule, Tree, identity_proof, load_proof, save_proof,
                    unfold_to_depth, validate_local)
from .progress import (brute_force_progressivity, check_progressivity, classify_thread)
from .cutelim import normalize, run_to_depth, wrap_with_identities
from .reduce import reduce_step
from .icsets import (check_coherence, covering, external_progressivity_witness,
                     verify_ic_candidate)

__version__ = "0.1.0"

__all__ = [
    "Formula", "parse_formula", "render_formula", "negate", "fl_closure",
    "ProofGraph", "Rule", "Tree", "identity_proof", "load_proof", "save_proof",
    "unfold_to_depth", "validate_local", "check_progressivity",
    "brute_force_progressivity", "classify_thread", "normalize", "run_to_depth",
    "wrap_with_identities", "reduce_step", "check_coherence", "covering",
    "external_progressivity_witness", "verify_ic_candidate",
]
