"""SLD resolution with negation as failure under the closed-world assumption.

Search is depth-first with leftmost literal selection and in-order clause
trial. A successful derivation is returned as a replayable proof chain:
each step records the instantiated goal it resolved, the clause index it
used (or the ``naf_check`` marker), and the unifier it computed. Clause
variables are renamed deterministically by step position so that
verification can reproduce identical unifiers.

Every query maps to "entailed" or "not_entailed"; there is no "unknown".
When the depth limit cut off part of the search, the verdict flags
``depth_exceeded`` so the caller can tell a genuine finite failure from a
truncated one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .terms import (
    Clause,
    Literal,
    Program,
    Subst,
    Term,
    apply_subst,
    compose,
    is_ground,
    rename_clause,
    restrict_subst,
    term_variables,
    unify,
)

ENTAILED = "entailed"
NOT_ENTAILED = "not_entailed"

NAF_CHECK = "naf_check"

DEFAULT_DEPTH_LIMIT = 64


@dataclass
class ProofStep:
    """One resolution event: goal, clause index (or naf marker), unifier."""

    goal: Term
    clause_index: Union[int, str]
    unifier: Subst


@dataclass
class ProofChain:
    steps: list[ProofStep]
    final_answer: str  # ENTAILED or NOT_ENTAILED


@dataclass
class Verdict:
    value: str  # ENTAILED or NOT_ENTAILED
    proof: Optional[ProofChain]
    depth_exceeded: bool
    unstratified_warning: bool = False
    floundered: bool = False


class _SearchCtx:
    __slots__ = ("truncated", "unstratified", "floundered")

    def __init__(self) -> None:
        self.truncated = False
        self.unstratified = False
        self.floundered = False


def _clause_index(program: Program) -> dict[tuple[str, int], list[tuple[int, Clause]]]:
    index: dict[tuple[str, int], list[tuple[int, Clause]]] = {}
    for i, clause in enumerate(program.clauses):
        index.setdefault(clause.head.predicate, []).append((i, clause))
    return index


# A pending goal is (literal, remaining_depth, ancestor_predicates,
# ancestor_goals). Ancestor goals hold the instantiated atoms on the
# derivation path: re-encountering an identical subgoal cannot lead to a
# smaller proof, so such branches are pruned as finite failures. This keeps
# ground programs with positive cycles (p :- p, p.) decidable without
# burning the depth budget on exponential regrowth.
_Goal = tuple[Literal, int, frozenset, frozenset]


def _solve_goals(
    program: Program,
    index: dict[tuple[str, int], list[tuple[int, Clause]]],
    goals: tuple[_Goal, ...],
    subst: Subst,
    ctx: _SearchCtx,
    steps: list[ProofStep],
) -> Iterator[Subst]:
    if not goals:
        yield subst
        return
    (lit, depth, ancestors, ancestor_goals), rest = goals[0], goals[1:]
    goal_atom = apply_subst(subst, lit.atom)

    if lit.negated:
        if not is_ground(goal_atom):
            ctx.floundered = True
        if goal_atom.predicate in ancestors:
            ctx.unstratified = True
        inner_goal: tuple[_Goal, ...] = (
            (
                Literal(False, goal_atom),
                depth - 1,
                ancestors | {goal_atom.predicate},
                ancestor_goals,
            ),
        )
        scratch: list[ProofStep] = []
        for _ in _solve_goals(program, index, inner_goal, {}, ctx, scratch):
            return  # the negated goal is provable: NAF fails
        mark = len(steps)
        steps.append(ProofStep(goal_atom, NAF_CHECK, {}))
        yield from _solve_goals(program, index, rest, subst, ctx, steps)
        del steps[mark:]
        return

    if goal_atom in ancestor_goals:
        return  # self-ancestral subgoal: a genuine finite failure, not truncation
    if depth <= 0:
        ctx.truncated = True
        return
    child_ancestors = ancestors | {goal_atom.predicate}
    child_goals = ancestor_goals | {goal_atom}
    mark = len(steps)
    for ci, clause in index.get(goal_atom.predicate, ()):
        renamed = rename_clause(clause, mark)
        mgu = unify(goal_atom, renamed.head)
        if mgu is None:
            continue
        steps.append(ProofStep(goal_atom, ci, mgu))
        body_goals = tuple((bl, depth - 1, child_ancestors, child_goals) for bl in renamed.body)
        yield from _solve_goals(
            program, index, body_goals + rest, compose(subst, mgu), ctx, steps
        )
        del steps[mark:]


def solve(program: Program, query: Term, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Decide whether the program entails the query (closed world).

    Returns an entailed verdict with a proof chain that ``verify_chain``
    accepts, or a not_entailed verdict with no proof.
    """
    if depth_limit < 1:
        raise ValueError("depth_limit must be >= 1")
    if query.kind == "variable":
        raise ValueError("query cannot be a bare variable")
    ctx = _SearchCtx()
    steps: list[ProofStep] = []
    goals: tuple[_Goal, ...] = ((Literal(False, query), depth_limit, frozenset(), frozenset()),)
    gen = _solve_goals(program, _clause_index(program), goals, {}, ctx, steps)
    found = next(gen, None)
    if found is not None:
        proof = ProofChain(list(steps), ENTAILED)
        gen.close()
        return Verdict(
            ENTAILED,
            proof,
            depth_exceeded=ctx.truncated,
            unstratified_warning=ctx.unstratified,
            floundered=ctx.floundered,
        )
    return Verdict(
        NOT_ENTAILED,
        None,
        depth_exceeded=ctx.truncated,
        unstratified_warning=ctx.unstratified,
        floundered=ctx.floundered,
    )


def enumerate_solutions(
    program: Program,
    query: Term,
    max_solutions: int,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> list[Subst]:
    """Answer substitutions for the query's variables, in discovery order."""
    if max_solutions < 1:
        raise ValueError("max_solutions must be >= 1")
    if depth_limit < 1:
        raise ValueError("depth_limit must be >= 1")
    query_vars = term_variables(query)
    ctx = _SearchCtx()
    goals: tuple[_Goal, ...] = ((Literal(False, query), depth_limit, frozenset(), frozenset()),)
    out: list[Subst] = []
    for s in _solve_goals(program, _clause_index(program), goals, {}, ctx, []):
        out.append(restrict_subst(s, query_vars))
        if len(out) >= max_solutions:
            break
    return out
