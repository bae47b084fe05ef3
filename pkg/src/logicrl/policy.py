"""Linear-softmax policy over proof-step actions.

The policy stands in for the language model at desk scale: it walks a goal
stack, choosing at each step either a clause to apply to the current goal
or a final answer. Invalid clause applications are representable on
purpose (the goal stays open and the transcript records the garbage step),
so the logic teacher has something to penalize. Negative body literals are
discharged automatically by a bounded negation-as-failure check the moment
they surface at the top of the stack; they are environment bookkeeping,
not policy actions, but they do become checkable steps of the emitted
proof chain.

Scores are linear in a fixed feature map shared with the reward model, so
log-probability gradients are exact and cheap to verify against finite
differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import (
    ENTAILED,
    NAF_CHECK,
    NOT_ENTAILED,
    Literal,
    Program,
    ProofChain,
    ProofStep,
    Subst,
    Term,
    Verdict,
    apply_subst,
    compose,
    const,
    format_term,
    rename_clause,
    solve,
    unify,
)
from .taskgen import TaskInstance

DEFAULT_MAX_STEPS = 16
DEFAULT_DEPTH_LIMIT = 64

APPLY_CLAUSE = "apply_clause"
ANSWER = "answer"

# Feature layout. Raw state features cancel in the policy softmax (they are
# shared by all candidates) but matter to the reward model. The answer's
# value (entailed vs not_entailed) appears only in interactions with the
# {empty, stuck, open} state partition, so a preference for one answer in
# one kind of state cannot leak into states of another kind; the action
# kind one-hot distinguishes applying a clause from answering.
FEATURE_NAMES: tuple[str, ...] = (
    "bias",
    "kind_apply",
    "kind_answer",
    "clause_bucket_0",
    "clause_bucket_1",
    "clause_bucket_2",
    "clause_bucket_3",
    "head_unifies",
    "stack_depth",
    "steps_frac",
    "stuck",
    "depth_x_apply",
    "depth_x_answer",
    "steps_x_apply",
    "steps_x_answer",
    "empty_x_apply",
    "stuck_x_apply",
    "open_x_apply",
    "empty_x_answer_entailed",
    "empty_x_answer_not_entailed",
    "stuck_x_answer_entailed",
    "stuck_x_answer_not_entailed",
    "open_x_answer_entailed",
    "open_x_answer_not_entailed",
    # fires when the answer agrees with the trivial closed-world reading of
    # the state: not_entailed while no clause applies to the open goal,
    # entailed once the goal stack has been emptied
    "answer_matches_cwa_state",
)
FEATURE_DIM = len(FEATURE_NAMES)

_NO_GOAL = const("no_open_goal")


@dataclass(frozen=True)
class Action:
    kind: str  # APPLY_CLAUSE or ANSWER
    clause_index: Optional[int] = None
    answer: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind == APPLY_CLAUSE:
            if self.clause_index is None or self.clause_index < 0:
                raise ValueError("apply_clause needs a non-negative clause_index")
        elif self.kind == ANSWER:
            if self.answer not in (ENTAILED, NOT_ENTAILED):
                raise ValueError("answer must be entailed or not_entailed")
        else:
            raise ValueError(f"unknown action kind {self.kind!r}")


def apply_clause(index: int) -> Action:
    return Action(APPLY_CLAUSE, clause_index=index)


def answer_action(value: str) -> Action:
    return Action(ANSWER, answer=value)


ANSWER_ENTAILED = answer_action(ENTAILED)
ANSWER_NOT_ENTAILED = answer_action(NOT_ENTAILED)


@dataclass(frozen=True)
class State:
    instance_ref: str
    goal_stack: tuple[Term, ...]
    steps_taken: int


@dataclass
class PolicyParams:
    weights: np.ndarray
    temperature: float = 1.0

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (FEATURE_DIM,):
            raise ValueError(f"weights must have shape ({FEATURE_DIM},)")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")

    @staticmethod
    def zeros() -> "PolicyParams":
        return PolicyParams(np.zeros(FEATURE_DIM))


@dataclass
class Response:
    """A segment: the (state, action) trace of one rollout plus transcript."""

    instance_ref: str
    steps: list[tuple[State, Action]]
    raw_text: str
    max_steps: int = DEFAULT_MAX_STEPS

    @property
    def answer(self) -> str:
        final = self.steps[-1][1]
        if final.kind != ANSWER:
            raise ValueError("response does not end in an answer action")
        return final.answer  # type: ignore[return-value]

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self, query_text: str = "") -> dict:
        steps = []
        for state, action in self.steps:
            goal = format_term(state.goal_stack[0]) if state.goal_stack else ""
            entry: dict = {"goal": goal, "action": action.kind}
            if action.kind == APPLY_CLAUSE:
                entry["clause_index"] = action.clause_index
            steps.append(entry)
        return {
            "instance_id": self.instance_ref,
            "query": query_text,
            "steps": steps,
            "answer": self.answer,
            "raw_text": self.raw_text,
            "max_steps": self.max_steps,
        }


def featurize(
    state: State,
    action: Action,
    instance: TaskInstance,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Fixed-dimension features of one (state, action) pair."""
    clauses = instance.program.clauses
    top = state.goal_stack[0] if state.goal_stack else None

    is_apply = 1.0 if action.kind == APPLY_CLAUSE else 0.0
    is_ans_e = 1.0 if action.kind == ANSWER and action.answer == ENTAILED else 0.0
    is_ans_n = 1.0 if action.kind == ANSWER and action.answer == NOT_ENTAILED else 0.0

    bucket = np.zeros(4)
    unifies = 0.0
    if action.kind == APPLY_CLAUSE and clauses:
        idx = min(action.clause_index, len(clauses) - 1)  # type: ignore[arg-type]
        bucket[min(3, (4 * idx) // len(clauses))] = 1.0
        if top is not None:
            head = rename_clause(clauses[idx], 0).head
            unifies = 1.0 if unify(top, head) is not None else 0.0

    depth = min(len(state.goal_stack), 8) / 8.0
    empty = 1.0 if not state.goal_stack else 0.0
    steps_frac = min(state.steps_taken, max_steps) / max(max_steps, 1)
    stuck = 0.0
    if top is not None:
        stuck = 1.0
        for clause in clauses:
            if unify(top, rename_clause(clause, 0).head) is not None:
                stuck = 0.0
                break

    is_answer = is_ans_e + is_ans_n
    open_goal = 1.0 if (state.goal_stack and not stuck) else 0.0
    answer_cwa = stuck * is_ans_n + empty * is_ans_e

    return np.array(
        [
            1.0,
            is_apply,
            is_answer,
            bucket[0],
            bucket[1],
            bucket[2],
            bucket[3],
            unifies,
            depth,
            steps_frac,
            stuck,
            depth * is_apply,
            depth * is_answer,
            steps_frac * is_apply,
            steps_frac * is_answer,
            empty * is_apply,
            stuck * is_apply,
            open_goal * is_apply,
            empty * is_ans_e,
            empty * is_ans_n,
            stuck * is_ans_e,
            stuck * is_ans_n,
            open_goal * is_ans_e,
            open_goal * is_ans_n,
            answer_cwa,
        ]
    )


class InstanceContext:
    """Per-instance caches for the hot rollout / scoring paths.

    Feature matrices, clause-head unification masks, and engine verdicts
    are all pure functions of the instance, so they are memoized here and
    shared by sampling, evaluation, the teacher, and the reward model.
    """

    def __init__(
        self,
        instance: TaskInstance,
        max_steps: int = DEFAULT_MAX_STEPS,
        depth_limit: int = DEFAULT_DEPTH_LIMIT,
    ):
        self.instance = instance
        self.program: Program = instance.program
        self.query: Term = instance.query
        self.max_steps = max_steps
        self.depth_limit = depth_limit
        n = len(self.program.clauses)
        self._apply_actions = [apply_clause(i) for i in range(n)]
        self._answers = [ANSWER_ENTAILED, ANSWER_NOT_ENTAILED]
        self._masks: dict[Term, tuple[bool, ...]] = {}
        self._matrices: dict[tuple, np.ndarray] = {}
        self._verdicts: dict[tuple[Term, int], Verdict] = {}

    def candidates(self, forced: bool) -> list[Action]:
        if forced:
            return self._answers
        return self._apply_actions + self._answers

    def verdict(self, query: Optional[Term] = None, depth_limit: Optional[int] = None) -> Verdict:
        query = self.query if query is None else query
        depth = self.depth_limit if depth_limit is None else depth_limit
        key = (query, depth)
        got = self._verdicts.get(key)
        if got is None:
            got = solve(self.program, query, depth)
            self._verdicts[key] = got
        return got

    def unify_mask(self, goal: Term) -> tuple[bool, ...]:
        mask = self._masks.get(goal)
        if mask is None:
            mask = tuple(
                unify(goal, rename_clause(c, 0).head) is not None
                for c in self.program.clauses
            )
            self._masks[goal] = mask
        return mask

    def feature_matrix(self, state: State, forced: bool) -> np.ndarray:
        top = state.goal_stack[0] if state.goal_stack else None
        key = (top, min(len(state.goal_stack), 8), state.steps_taken, forced)
        got = self._matrices.get(key)
        if got is None:
            cands = self.candidates(forced)
            got = np.stack(
                [featurize(state, a, self.instance, self.max_steps) for a in cands]
            )
            self._matrices[key] = got
        return got

    def segment_features(self, response: Response) -> np.ndarray:
        """Summed step features of a segment, cached on the response."""
        got = getattr(response, "_feature_sum", None)
        if got is None:
            got = np.zeros(FEATURE_DIM)
            for state, action in response.steps:
                got += featurize(state, action, self.instance, response.max_steps)
            response._feature_sum = got
        return got


class _Derivation:
    """Replayable goal-stack machine shared by rollout and chain building.

    Maintains the literal stack and accumulated substitution exactly the
    way chain verification replays them, and auto-discharges negative
    literals via bounded NAF checks as soon as they surface.
    """

    def __init__(self, ctx: InstanceContext):
        self.ctx = ctx
        self.stack: list[Literal] = [Literal(False, ctx.query)]
        self.acc: Subst = {}
        self.chain_steps: list[ProofStep] = []
        self.lines: list[str] = []
        # count of state-modifying steps; the clause-renaming tag shared
        # with the solver and the chain verifier
        self.applied = 0

    def state(self, instance_ref: str, steps_taken: int) -> State:
        goals = tuple(apply_subst(self.acc, lit.atom) for lit in self.stack)
        return State(instance_ref, goals, steps_taken)

    def _drain_negatives(self) -> None:
        while self.stack and self.stack[0].negated:
            goal = apply_subst(self.acc, self.stack[0].atom)
            self.chain_steps.append(ProofStep(goal, NAF_CHECK, {}))
            verdict = self.ctx.verdict(goal)
            ok = verdict.value == NOT_ENTAILED and not verdict.depth_exceeded
            note = "ok" if ok else "failed (goal is provable)"
            self.lines.append(f"    naf \\+ {format_term(goal)}: {note}")
            self.stack.pop(0)
            self.applied += 1

    def apply(self, step_no: int, clause_index: int) -> int:
        """Apply a clause to the top goal; returns the emitted chain index."""
        pos = len(self.chain_steps)
        clauses = self.ctx.program.clauses
        if not self.stack or not (0 <= clause_index < len(clauses)):
            self.chain_steps.append(ProofStep(_NO_GOAL, clause_index, {}))
            reason = "no open goal" if not self.stack else "clause index out of range"
            self.lines.append(f"[{step_no}] apply {clause_index}: {reason} (invalid step)")
            return pos
        goal = apply_subst(self.acc, self.stack[0].atom)
        renamed = rename_clause(clauses[clause_index], self.applied)
        mgu = unify(goal, renamed.head)
        if mgu is None:
            self.chain_steps.append(ProofStep(goal, clause_index, {}))
            self.lines.append(
                f"[{step_no}] apply {clause_index}: head does not match goal "
                f"{format_term(goal)} (invalid step)"
            )
            return pos
        self.chain_steps.append(ProofStep(goal, clause_index, mgu))
        self.lines.append(
            f"[{step_no}] apply {clause_index}: "
            f"{format_term(goal)} via {clauses[clause_index]}"
        )
        self.stack.pop(0)
        self.stack[:0] = list(renamed.body)
        self.acc = compose(self.acc, mgu)
        self.applied += 1
        self._drain_negatives()
        return pos


def _softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max()
    e = np.exp(z)
    return e / e.sum()


def action_probabilities(
    params: PolicyParams,
    state: State,
    candidates: Sequence[Action],
    instance: TaskInstance,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """Softmax over weights . features for each candidate."""
    if not candidates:
        raise ValueError("candidates must be nonempty")
    phi = np.stack([featurize(state, a, instance, max_steps) for a in candidates])
    return _softmax(phi @ params.weights / params.temperature)


def sample_response(
    params: PolicyParams,
    instance: TaskInstance,
    rng_seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    ctx: Optional[InstanceContext] = None,
) -> Response:
    """Roll out one response; deterministic in (params, instance, rng_seed)."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    ctx = ctx or InstanceContext(instance, max_steps)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    der = _Derivation(ctx)
    der.lines.append(f"?- {format_term(ctx.query)}.")
    steps: list[tuple[State, Action]] = []
    for t in range(max_steps):
        state = der.state(instance.id, t)
        forced = t == max_steps - 1
        cands = ctx.candidates(forced)
        probs = _softmax(ctx.feature_matrix(state, forced) @ params.weights / params.temperature)
        choice = int(rng.choice(len(cands), p=probs / probs.sum()))
        action = cands[choice]
        steps.append((state, action))
        if action.kind == ANSWER:
            der.lines.append(f"[{t}] answer {action.answer}")
            break
        der.apply(t, action.clause_index)  # type: ignore[arg-type]
    return Response(instance.id, steps, "\n".join(der.lines), max_steps)


def greedy_response(
    params: PolicyParams,
    instance: TaskInstance,
    max_steps: int = DEFAULT_MAX_STEPS,
    ctx: Optional[InstanceContext] = None,
) -> Response:
    """Argmax-action decoding; ties resolve to the lowest candidate index."""
    ctx = ctx or InstanceContext(instance, max_steps)
    der = _Derivation(ctx)
    der.lines.append(f"?- {format_term(ctx.query)}.")
    steps: list[tuple[State, Action]] = []
    for t in range(max_steps):
        state = der.state(instance.id, t)
        forced = t == max_steps - 1
        cands = ctx.candidates(forced)
        scores = ctx.feature_matrix(state, forced) @ params.weights
        action = cands[int(np.argmax(scores))]
        steps.append((state, action))
        if action.kind == ANSWER:
            der.lines.append(f"[{t}] answer {action.answer}")
            break
        der.apply(t, action.clause_index)  # type: ignore[arg-type]
    return Response(instance.id, steps, "\n".join(der.lines), max_steps)


def replay_actions_to_chain(
    instance: TaskInstance,
    actions: Sequence[Action],
    max_steps: int = DEFAULT_MAX_STEPS,
    ctx: Optional[InstanceContext] = None,
) -> tuple[ProofChain, list[Optional[int]]]:
    """Rebuild the proof chain for an action sequence.

    Returns the chain plus, per action, the chain index of the step it
    produced (None for answer actions). NAF checks are inserted where the
    replay surfaces negative literals, mirroring the rollout environment.
    """
    ctx = ctx or InstanceContext(instance, max_steps)
    der = _Derivation(ctx)
    final: Optional[str] = None
    positions: list[Optional[int]] = []
    for t, action in enumerate(actions):
        if action.kind == ANSWER:
            positions.append(None)
            final = action.answer
            break
        positions.append(der.apply(t, action.clause_index))  # type: ignore[arg-type]
    if final is None:
        raise ValueError("action sequence has no terminal answer")
    return ProofChain(der.chain_steps, final), positions


def response_to_chain(
    response: Response,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> ProofChain:
    """Map a response to a verifiable proof chain."""
    actions = [a for _, a in response.steps]
    chain, _ = replay_actions_to_chain(instance, actions, response.max_steps, ctx)
    return chain


def response_log_prob(
    params: PolicyParams,
    response: Response,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> float:
    """Sum of log pi(a_t | s_t) for the response's recorded trajectory."""
    ctx = ctx or InstanceContext(instance, response.max_steps)
    total = 0.0
    for state, action in response.steps:
        forced = state.steps_taken == response.max_steps - 1
        cands = ctx.candidates(forced)
        probs = _softmax(ctx.feature_matrix(state, forced) @ params.weights / params.temperature)
        total += float(np.log(probs[cands.index(action)]))
    return total


def log_prob_gradient(
    params: PolicyParams,
    response: Response,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> np.ndarray:
    """Exact gradient of the response log-probability in the weights."""
    ctx = ctx or InstanceContext(instance, response.max_steps)
    grad = np.zeros(FEATURE_DIM)
    for state, action in response.steps:
        forced = state.steps_taken == response.max_steps - 1
        cands = ctx.candidates(forced)
        phi = ctx.feature_matrix(state, forced)
        probs = _softmax(phi @ params.weights / params.temperature)
        grad += (phi[cands.index(action)] - probs @ phi) / params.temperature
    return grad


def write_transcripts(path, responses_with_queries) -> int:
    """Line-delimited transcripts: (response, query_text) pairs."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for response, query_text in responses_with_queries:
            fh.write(json.dumps(response.to_json(query_text), sort_keys=True) + "\n")
            count += 1
    return count
