"""Proportional budgeting toolkit for approval-based participatory budgeting.

Budgeting rules with representation guarantees, checkers for ten
proportionality axioms with violation witnesses, and exact brute-force
oracles for desk-scale certification.
"""

from .axioms import (
    AxiomReport,
    AxiomWitness,
    check_axiom,
    check_bjr_poly,
    check_bpjr,
    check_local_bpjr,
    check_strong_bpjr,
    evaluate_axioms,
    implied_by,
    max_bundle_weight,
    recheck_witness,
)
from .harness import GenSpec, InstanceFile, generate, parse_instance
from .model import (
    ALL_AXIOMS,
    TOL,
    AxiomId,
    Budget,
    Instance,
    Profile,
    is_exhaustive,
    is_feasible,
    normalize,
)
from .oracle import (
    ExistenceReport,
    certify_existence,
    enumerate_feasible,
    verify_implications,
)
from .rules import (
    LoadAssignment,
    RuleTrace,
    SequentialStep,
    TIE_POLICIES,
    bpjr_construct,
    gpseq,
    greedy_bjr_l,
    min_max_load,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_AXIOMS",
    "AxiomId",
    "AxiomReport",
    "AxiomWitness",
    "Budget",
    "ExistenceReport",
    "GenSpec",
    "Instance",
    "InstanceFile",
    "LoadAssignment",
    "Profile",
    "RuleTrace",
    "SequentialStep",
    "TIE_POLICIES",
    "TOL",
    "bpjr_construct",
    "certify_existence",
    "check_axiom",
    "check_bjr_poly",
    "check_bpjr",
    "check_local_bpjr",
    "check_strong_bpjr",
    "enumerate_feasible",
    "evaluate_axioms",
    "generate",
    "gpseq",
    "greedy_bjr_l",
    "implied_by",
    "is_exhaustive",
    "is_feasible",
    "max_bundle_weight",
    "min_max_load",
    "normalize",
    "parse_instance",
    "recheck_witness",
    "verify_implications",
]
