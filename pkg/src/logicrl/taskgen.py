"""Synthetic legal-entailment task generation.

Each instance is a ground, stratified rule base with legal-flavored
vocabulary plus one ground query; the gold verdict is verified against the
brute-force model oracle before the instance is emitted. Predicates are
layered so that every body literal refers to a strictly lower layer, which
makes stratification hold by construction while still exercising negation
as failure.

Generation is a pure function of (config, seed). Dataset items derive
per-index sub-seeds via :func:`logicrl.seeds.derive_seed`, so datasets are
order-independent and safely parallelizable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .engine import (
    ENTAILED,
    Clause,
    Literal,
    Program,
    Term,
    atom,
    brute_force_entailment,
    format_program,
    format_term,
    is_stratified,
    parse_program,
    parse_query,
    program_is_ground,
)
from .seeds import derive_seed

# Cosmetic vocabulary; the logic does not depend on the word choice.
PREDICATE_VOCAB: tuple[tuple[str, int], ...] = (
    ("party", 1),
    ("contract", 1),
    ("breach", 1),
    ("liable", 1),
    ("obligation", 2),
    ("waiver", 1),
    ("exempt", 1),
    ("remedy", 1),
    ("penalty", 1),
    ("notice", 1),
    ("consent", 1),
    ("valid_claim", 1),
    ("damages", 1),
    ("enforceable", 1),
    ("defaulted", 1),
    ("cured", 1),
    ("negligent", 1),
    ("indemnified", 1),
    ("licensed", 1),
    ("insured", 1),
    ("bound_by", 2),
    ("owes", 2),
)

CONSTANT_VOCAB: tuple[str, ...] = (
    "acme",
    "birchwood",
    "cobalt_ltd",
    "dunmore",
    "eastfield",
    "fairview",
    "grantham",
    "holloway",
    "ironside",
    "juniper",
)

MAX_ATTEMPTS = 1000


class GenerationExhausted(Exception):
    """Rejection sampling failed to produce a valid instance."""


@dataclass(frozen=True)
class GenConfig:
    n_predicates: int = 6
    max_rule_body: int = 2
    rule_depth: int = 2
    negation_rate: float = 0.15
    n_constants: int = 3
    balance: float = 0.5

    def __post_init__(self) -> None:
        if self.n_predicates < 1:
            raise ValueError("n_predicates must be >= 1")
        if self.n_constants < 1:
            raise ValueError("n_constants must be >= 1")
        if self.max_rule_body < 0 or self.rule_depth < 0:
            raise ValueError("counts must be >= 0")
        if not 0.0 <= self.negation_rate <= 1.0:
            raise ValueError("negation_rate must be in [0, 1]")
        if not 0.0 <= self.balance <= 1.0:
            raise ValueError("balance must be in [0, 1]")

    def key(self) -> str:
        return (
            f"p{self.n_predicates}b{self.max_rule_body}d{self.rule_depth}"
            f"n{self.negation_rate}c{self.n_constants}bal{self.balance}"
        )


@dataclass
class TaskInstance:
    id: str
    program: Program
    query: Term
    gold: str  # ENTAILED or NOT_ENTAILED
    meta: dict = field(default_factory=dict)

    @property
    def program_text(self) -> str:
        return self.program.source_text or format_program(self.program)

    @property
    def query_text(self) -> str:
        return format_term(self.query) + "."

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "program_text": self.program_text,
            "query_text": self.query_text,
            "gold": self.gold,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TaskInstance":
        return cls(
            id=obj["id"],
            program=parse_program(obj["program_text"]),
            query=parse_query(obj["query_text"]),
            gold=obj["gold"],
            meta=obj.get("meta", {}),
        )


@dataclass
class ValidationResult:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _ground_atom(rng: random.Random, pred: tuple[str, int], consts: list[str]) -> Term:
    name, arity = pred
    return atom(name, *(atom(rng.choice(consts)) for _ in range(arity)))


def _candidate(rng: random.Random, config: GenConfig) -> tuple[Program, Term, dict]:
    preds = rng.sample(PREDICATE_VOCAB, min(config.n_predicates, len(PREDICATE_VOCAB)))
    consts = rng.sample(CONSTANT_VOCAB, min(config.n_constants, len(CONSTANT_VOCAB)))

    depth = min(config.rule_depth, len(preds) - 1)
    # layer 0 holds fact predicates; higher layers hold derived ones
    layers: list[list[tuple[str, int]]] = [[] for _ in range(depth + 1)]
    for i, p in enumerate(preds):
        if i <= depth:
            layers[i].append(p)
        elif depth == 0:
            layers[0].append(p)
        else:
            layers[rng.randint(1, depth)].append(p)

    clauses: list[Clause] = []
    negations = 0

    for pred in layers[0]:
        n_facts = rng.randint(1, max(1, len(consts)))
        seen: set[Term] = set()
        for _ in range(n_facts):
            fact = _ground_atom(rng, pred, consts)
            if fact not in seen and rng.random() < 0.7:
                seen.add(fact)
                clauses.append(Clause(fact))

    for level in range(1, depth + 1):
        lower = [p for l in layers[:level] for p in l]
        for pred in layers[level]:
            for _ in range(rng.choice((1, 1, 2))):
                head = _ground_atom(rng, pred, consts)
                body_len = rng.randint(1, max(1, config.max_rule_body))
                body = []
                for _ in range(body_len):
                    target = rng.choice(lower)
                    negated = rng.random() < config.negation_rate
                    if negated:
                        negations += 1
                    body.append(Literal(negated, _ground_atom(rng, target, consts)))
                clauses.append(Clause(head, tuple(body)))

    # query a derived predicate when there is one, else any predicate
    query_pool = layers[depth] if depth > 0 else layers[0]
    query = _ground_atom(rng, rng.choice(query_pool), consts)

    program = parse_program(format_program(Program(tuple(clauses))))
    meta = {"rule_depth": depth, "negations": negations}
    return program, query, meta


def generate_instance(config: GenConfig, seed: int) -> TaskInstance:
    """Generate one oracle-verified instance, deterministic in (config, seed)."""
    want_entailed = random.Random(derive_seed(seed, "gold")).random() < config.balance
    want = ENTAILED if want_entailed else "not_entailed"
    for attempt in range(MAX_ATTEMPTS):
        rng = random.Random(derive_seed(seed, f"attempt{attempt}"))
        program, query, meta = _candidate(rng, config)
        gold = brute_force_entailment(program, query).value
        if gold != want:
            continue
        meta["seed"] = seed
        instance = TaskInstance(
            id=f"t{derive_seed(seed, config.key()):016x}",
            program=program,
            query=query,
            gold=gold,
            meta=meta,
        )
        report = validate_instance(instance)
        if not report:
            continue
        return instance
    raise GenerationExhausted(
        f"no {want} instance found in {MAX_ATTEMPTS} attempts for seed {seed}"
    )


def generate_dataset(config: GenConfig, n: int, seed: int) -> list[TaskInstance]:
    """n instances with per-index sub-seeds; reproducible and order-independent."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: list[TaskInstance] = []
    for i in range(n):
        try:
            out.append(generate_instance(config, derive_seed(seed, i)))
        except GenerationExhausted as exc:
            raise GenerationExhausted(f"index {i}: {exc}") from exc
    ids = {inst.id for inst in out}
    if len(ids) != len(out):
        raise GenerationExhausted("sub-seed collision produced duplicate instance ids")
    return out


def validate_instance(instance: TaskInstance) -> ValidationResult:
    """Parseable, ground, stratified, and gold matches the oracle."""
    diagnostics: list[str] = []
    try:
        program = parse_program(instance.program_text)
        query = parse_query(instance.query_text)
    except Exception as exc:
        diagnostics.append(f"parse failure: {exc}")
        return ValidationResult(False, diagnostics)
    if not program_is_ground(program):
        diagnostics.append("program is not ground")
    if not is_stratified(program):
        diagnostics.append("program is not stratified")
    if diagnostics:
        return ValidationResult(False, diagnostics)
    oracle = brute_force_entailment(program, query).value
    if oracle != instance.gold:
        diagnostics.append(f"gold is {instance.gold} but the oracle says {oracle}")
        return ValidationResult(False, diagnostics)
    return ValidationResult(True)


def write_dataset(path: str | Path, instances: Iterable[TaskInstance]) -> int:
    """One instance per line, JSON; returns the number written."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), sort_keys=True) + "\n")
            count += 1
    return count


def read_dataset(path: str | Path) -> list[TaskInstance]:
    out: list[TaskInstance] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(TaskInstance.from_json(json.loads(line)))
    return out
