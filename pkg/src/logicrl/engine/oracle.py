"""Brute-force entailment oracle for ground stratified programs.

Computes the perfect model by stratum-wise fixpoint iteration over the
finite ground-atom universe and answers membership queries. Deliberately
independent of the SLD solver: this is the reference the solver is
validated against.
"""

from __future__ import annotations

from typing import Optional

from .solver import ENTAILED, NOT_ENTAILED, Verdict
from .terms import Program, Term, is_ground, program_is_ground


class OracleInapplicable(Exception):
    """The program is not ground, not stratified, or the query is not ground."""


def predicate_strata(program: Program) -> Optional[dict[tuple[str, int], int]]:
    """Stratum number per predicate, or None when no stratification exists.

    Standard iterative assignment: a head predicate must sit at least as
    high as every positive body predicate and strictly higher than every
    negated one. A level that climbs past the predicate count certifies a
    negative cycle.
    """
    preds: set[tuple[str, int]] = set()
    for clause in program.clauses:
        preds.add(clause.head.predicate)
        for lit in clause.body:
            preds.add(lit.atom.predicate)
    strata = {p: 0 for p in preds}
    limit = len(preds) + 1
    changed = True
    while changed:
        changed = False
        for clause in program.clauses:
            head = clause.head.predicate
            for lit in clause.body:
                need = strata[lit.atom.predicate] + (1 if lit.negated else 0)
                if strata[head] < need:
                    strata[head] = need
                    if strata[head] > limit:
                        return None
                    changed = True
    return strata


def is_stratified(program: Program) -> bool:
    return predicate_strata(program) is not None


def perfect_model(program: Program) -> set[Term]:
    """The unique perfect model of a ground stratified program."""
    if not program_is_ground(program):
        raise OracleInapplicable("program contains variables")
    strata = predicate_strata(program)
    if strata is None:
        raise OracleInapplicable("program is not stratified")

    model: set[Term] = set()
    max_stratum = max(strata.values(), default=0)
    for level in range(max_stratum + 1):
        layer = [c for c in program.clauses if strata[c.head.predicate] == level]
        changed = True
        while changed:
            changed = False
            for clause in layer:
                if clause.head in model:
                    continue
                fires = all(
                    (lit.atom not in model) if lit.negated else (lit.atom in model)
                    for lit in clause.body
                )
                if fires:
                    model.add(clause.head)
                    changed = True
    return model


def brute_force_entailment(program: Program, query: Term) -> Verdict:
    """Entailment by model membership; the solver's independent test oracle."""
    if not is_ground(query):
        raise OracleInapplicable("query contains variables")
    model = perfect_model(program)
    value = ENTAILED if query in model else NOT_ENTAILED
    return Verdict(value, None, depth_exceeded=False)
