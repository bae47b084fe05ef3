from logicrl.engine import (
    ENTAILED,
    NOT_ENTAILED,
    ProofChain,
    ProofStep,
    parse_program,
    parse_query,
    solve,
    verify_chain,
)
from logicrl.engine.solver import NAF_CHECK
from logicrl.engine.terms import compound, const

SOCRATES = "mortal(X) :- human(X).\nhuman(socrates).\nhuman(plato)."


def _solved_chain(text, query_text):
    program = parse_program(text)
    query = parse_query(query_text)
    verdict = solve(program, query)
    assert verdict.value == ENTAILED
    return program, query, verdict.proof


def test_solver_chain_fully_valid():
    program, query, chain = _solved_chain(SOCRATES, "mortal(socrates)")
    report = verify_chain(program, query, chain)
    assert report.valid_steps == report.total_steps == 2
    assert report.answer_consistent
    assert report.first_invalid_index is None


def test_tampered_clause_index_detected():
    program, query, chain = _solved_chain(SOCRATES, "mortal(socrates)")
    chain.steps[1].clause_index = 0  # mortal rule cannot resolve human(socrates)
    report = verify_chain(program, query, chain)
    assert report.first_invalid_index == 1
    assert report.valid_steps == 1


def test_tampered_unifier_detected():
    program, query, chain = _solved_chain(SOCRATES, "mortal(socrates)")
    chain.steps[0].unifier = {"_V0_X": const("plato")}
    report = verify_chain(program, query, chain)
    assert report.first_invalid_index == 0


def test_empty_chain_cwa_negative_is_consistent():
    program = parse_program("parent(tom, bob).")
    query = parse_query("parent(bob, tom)")
    chain = ProofChain([], NOT_ENTAILED)
    report = verify_chain(program, query, chain)
    assert report.valid_steps == 0
    assert report.total_steps == 0
    assert report.answer_consistent


def test_empty_chain_wrong_claim_is_inconsistent():
    program = parse_program("parent(tom, bob).")
    chain = ProofChain([], ENTAILED)
    report = verify_chain(program, parse_query("parent(bob, tom)"), chain)
    assert not report.answer_consistent


def test_extra_steps_after_completion_are_invalid():
    program, query, chain = _solved_chain("p.", "p")
    chain.steps.append(ProofStep(const("p"), 0, {}))
    report = verify_chain(program, query, chain)
    assert report.valid_steps == 1
    assert report.total_steps == 2
    assert report.first_invalid_index == 1


def test_invalid_step_leaves_goal_open_for_later_step():
    # step 0 tries a clause that does not match; step 1 then resolves the
    # original goal correctly and must still count as valid
    program = parse_program("q(a).\np(X) :- q(X).")
    query = parse_query("p(a)")
    good = solve(program, query).proof
    bad_step = ProofStep(good.steps[0].goal, 0, {})  # q(a) head vs p(a) goal
    chain = ProofChain([bad_step] + good.steps, ENTAILED)
    report = verify_chain(program, query, chain)
    assert report.first_invalid_index == 0
    assert report.valid_steps == 2


def test_naf_check_on_provable_goal_is_invalid():
    program = parse_program("q.\np :- \\+ q.")
    query = parse_query("p")
    chain = ProofChain(
        [
            ProofStep(const("p"), 1, {}),
            ProofStep(const("q"), NAF_CHECK, {}),
        ],
        ENTAILED,
    )
    report = verify_chain(program, query, chain)
    assert report.valid_steps == 1  # the rule application is fine
    assert report.first_invalid_index == 1
    assert not report.answer_consistent  # p is not derivable


def test_chain_goal_mismatch_detected():
    program, query, chain = _solved_chain(SOCRATES, "mortal(socrates)")
    chain.steps[1].goal = compound("human", const("plato"))
    report = verify_chain(program, query, chain)
    assert report.first_invalid_index == 1
