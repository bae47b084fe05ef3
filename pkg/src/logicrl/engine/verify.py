"""Replay-based verification of proof chains.

A chain is replayed against the program from the original query: the
verifier maintains its own goal stack and accumulated substitution, renames
clause variables with the same position scheme the solver uses, and checks
each step's goal, clause choice, and recorded unifier against its own
computation. Negation-as-failure steps are re-checked by running the
negated goal and requiring finite failure.

Invalid steps are reported, never raised. An invalid apply step leaves the
replay state untouched (the goal stays open), so later steps can still be
judged; this is what makes valid_steps/total_steps a usable partial-credit
signal. Answer consistency compares the chain's final answer with the
solver's verdict on the same query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .solver import NAF_CHECK, NOT_ENTAILED, ProofChain, solve
from .terms import (
    Literal,
    Program,
    Subst,
    Term,
    apply_subst,
    compose,
    is_ground,
    rename_clause,
    unify,
)


@dataclass
class ChainReport:
    valid_steps: int
    total_steps: int
    answer_consistent: bool
    first_invalid_index: Optional[int]
    warnings: list[str] = field(default_factory=list)


def verify_chain(
    program: Program,
    query: Term,
    chain: ProofChain,
    depth_limit: int = 64,
    _solve=solve,
) -> ChainReport:
    # _solve is an injection point for verdict caching; it must behave
    # exactly like solver.solve.
    valid = 0
    first_invalid: Optional[int] = None
    warnings: list[str] = []

    stack: list[Literal] = [Literal(False, query)]
    acc: Subst = {}
    # clause renaming is tagged by the number of state-modifying steps so
    # far, matching the solver and the rollout environment; invalid steps
    # leave the state untouched and so do not shift later steps' tags
    applied = 0

    for i, step in enumerate(chain.steps):
        ok = False
        if stack:
            lit = stack[0]
            instantiated = apply_subst(acc, lit.atom)
            if step.clause_index == NAF_CHECK:
                if lit.negated and step.goal == instantiated:
                    if not is_ground(instantiated):
                        warnings.append(
                            f"step {i}: negation applied to non-ground goal "
                            f"{instantiated} (floundering risk)"
                        )
                    sub = _solve(program, instantiated, depth_limit)
                    ok = sub.value == NOT_ENTAILED and not sub.depth_exceeded
                # a naf step consumes its literal whether or not the check held
                if lit.negated:
                    stack.pop(0)
                    applied += 1
            elif (
                not lit.negated
                and isinstance(step.clause_index, int)
                and 0 <= step.clause_index < len(program.clauses)
                and step.goal == instantiated
            ):
                renamed = rename_clause(program.clauses[step.clause_index], applied)
                mgu = unify(instantiated, renamed.head)
                if mgu is not None and mgu == step.unifier:
                    ok = True
                    stack.pop(0)
                    stack[:0] = list(renamed.body)
                    acc = compose(acc, mgu)
                    applied += 1
        if ok:
            valid += 1
        elif first_invalid is None:
            first_invalid = i

    verdict = _solve(program, query, depth_limit)
    if verdict.unstratified_warning:
        warnings.append("negation through an enclosing predicate (unstratified use)")
    consistent = chain.final_answer == verdict.value

    return ChainReport(
        valid_steps=valid,
        total_steps=len(chain.steps),
        answer_consistent=consistent,
        first_invalid_index=first_invalid,
        warnings=warnings,
    )
