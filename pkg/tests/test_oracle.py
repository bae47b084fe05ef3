import random

import pytest

from logicrl.engine import (
    ENTAILED,
    NOT_ENTAILED,
    OracleInapplicable,
    brute_force_entailment,
    is_stratified,
    parse_program,
    parse_query,
    perfect_model,
    predicate_strata,
    solve,
)


def test_naf_fact_positive():
    program = parse_program("p :- \\+ q.")
    assert brute_force_entailment(program, parse_query("p")).value == ENTAILED


def test_naf_fact_blocked():
    program = parse_program("q.\np :- \\+ q.")
    assert brute_force_entailment(program, parse_query("p")).value == NOT_ENTAILED


def test_plain_fact():
    program = parse_program("a.")
    assert brute_force_entailment(program, parse_query("a")).value == ENTAILED


def test_two_strata_model():
    program = parse_program("b :- \\+ a.\nc :- b.\n")
    model = perfect_model(program)
    names = {t.name for t in model}
    assert names == {"b", "c"}


def test_strata_assignment():
    program = parse_program("p :- \\+ q.\nq :- r.\nr.")
    strata = predicate_strata(program)
    assert strata[("q", 0)] == strata[("r", 0)]
    assert strata[("p", 0)] > strata[("q", 0)]


def test_unstratified_detected():
    program = parse_program("p :- \\+ q.\nq :- \\+ p.")
    assert not is_stratified(program)
    with pytest.raises(OracleInapplicable):
        brute_force_entailment(program, parse_query("p"))


def test_positive_recursion_is_stratified():
    program = parse_program("p :- p.")
    assert is_stratified(program)
    assert brute_force_entailment(program, parse_query("p")).value == NOT_ENTAILED


def test_nonground_program_rejected():
    program = parse_program("p(X) :- q(X).")
    with pytest.raises(OracleInapplicable):
        brute_force_entailment(program, parse_query("p(a)"))


def test_nonground_query_rejected():
    program = parse_program("p(a).")
    with pytest.raises(OracleInapplicable):
        brute_force_entailment(program, parse_query("p(X)"))


def random_ground_program(rng: random.Random) -> tuple[str, list[str]]:
    """Small ground stratified program plus candidate ground queries.

    Predicates p0..p3 over constants a, b; negation only points at
    strictly lower predicate indices, positive cycles allowed.
    """
    preds = [f"p{i}" for i in range(rng.randint(2, 4))]
    consts = ["a", "b"]
    atoms = [f"{p}({c})" for p in preds for c in consts]

    def atom_of(level: int) -> str:
        pred = preds[level]
        return f"{pred}({rng.choice(consts)})"

    lines = []
    for _ in range(rng.randint(1, 10)):
        head_level = rng.randrange(len(preds))
        head = atom_of(head_level)
        if rng.random() < 0.4:
            lines.append(f"{head}.")
            continue
        body = []
        for _ in range(rng.randint(1, 3)):
            if head_level > 0 and rng.random() < 0.3:
                body.append(f"\\+ {atom_of(rng.randrange(head_level))}")
            else:
                # positive literal may point anywhere, including cycles
                body.append(atom_of(rng.randrange(len(preds))))
        lines.append(f"{head} :- {', '.join(body)}.")
    return "\n".join(lines) + "\n", atoms


def test_solver_agrees_with_oracle_on_random_programs():
    rng = random.Random(20240817)
    checked = 0
    for _ in range(120):
        text, atoms = random_ground_program(rng)
        program = parse_program(text)
        if not is_stratified(program):
            continue
        for query_text in rng.sample(atoms, min(5, len(atoms))):
            query = parse_query(query_text)
            expected = brute_force_entailment(program, query).value
            got = solve(program, query, depth_limit=64)
            assert got.value == expected, f"{text} ?- {query_text}"
            checked += 1
    assert checked >= 300
