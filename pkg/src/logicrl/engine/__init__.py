"""Prolog-subset rule engine: parsing, resolution, verification, oracle."""

from .oracle import OracleInapplicable, brute_force_entailment, is_stratified, perfect_model, predicate_strata
from .parser import ParseError, parse_program, parse_query
from .solver import (
    DEFAULT_DEPTH_LIMIT,
    ENTAILED,
    NAF_CHECK,
    NOT_ENTAILED,
    ProofChain,
    ProofStep,
    Verdict,
    enumerate_solutions,
    solve,
)
from .terms import (
    Clause,
    Literal,
    Program,
    Subst,
    Term,
    apply_subst,
    atom,
    compose,
    compound,
    const,
    format_clause,
    format_literal,
    format_program,
    format_term,
    is_ground,
    program_is_ground,
    rename_clause,
    term_variables,
    unify,
    var,
)
from .verify import ChainReport, verify_chain

__all__ = [
    "ChainReport",
    "Clause",
    "DEFAULT_DEPTH_LIMIT",
    "ENTAILED",
    "Literal",
    "NAF_CHECK",
    "NOT_ENTAILED",
    "OracleInapplicable",
    "ParseError",
    "Program",
    "ProofChain",
    "ProofStep",
    "Subst",
    "Term",
    "Verdict",
    "apply_subst",
    "atom",
    "brute_force_entailment",
    "compose",
    "compound",
    "const",
    "enumerate_solutions",
    "format_clause",
    "format_literal",
    "format_program",
    "format_term",
    "is_ground",
    "is_stratified",
    "parse_program",
    "parse_query",
    "perfect_model",
    "predicate_strata",
    "program_is_ground",
    "rename_clause",
    "solve",
    "term_variables",
    "unify",
    "var",
    "verify_chain",
]
