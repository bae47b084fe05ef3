import pytest
from hypothesis import given, strategies as st

from logicrl.engine import ParseError, format_program, parse_program, parse_query
from logicrl.engine.terms import Clause, Literal, Program, compound, const, var


def test_parse_single_fact():
    program = parse_program("parent(tom, bob).")
    assert len(program.clauses) == 1
    assert program.clauses[0].is_fact
    assert program.clauses[0].head == compound("parent", const("tom"), const("bob"))


def test_parse_unclosed_parenthesis():
    with pytest.raises(ParseError) as exc_info:
        parse_program("p(a")
    err = exc_info.value
    assert err.line == 1
    assert "unclosed parenthesis" in err.message


def test_parse_comment_only_program():
    assert parse_program("% only a comment\n").clauses == ()


def test_parse_rule_with_negation():
    program = parse_program("p(X) :- q(X), \\+ r(X).")
    clause = program.clauses[0]
    assert clause.head == compound("p", var("X"))
    assert clause.body[0] == Literal(False, compound("q", var("X")))
    assert clause.body[1] == Literal(True, compound("r", var("X")))


def test_parse_preserves_clause_order():
    text = "b.\na.\nc :- a.\n"
    program = parse_program(text)
    assert [c.head.name for c in program.clauses] == ["b", "a", "c"]


def test_parse_query_forms():
    assert parse_query("parent(tom, X).") == compound("parent", const("tom"), var("X"))
    assert parse_query("q.") == const("q")
    assert parse_query("q") == const("q")
    with pytest.raises(ParseError):
        parse_query("p(")
    with pytest.raises(ParseError):
        parse_query("p. q.")


def test_parse_error_positions():
    with pytest.raises(ParseError) as exc_info:
        parse_program("a.\nb :- c\nd.")
    # the '.' is missing after c, error lands where 'd' begins or at '\n' token
    assert exc_info.value.line >= 2


def test_error_message_contains_position():
    with pytest.raises(ParseError) as exc_info:
        parse_program("p :- .")
    assert "line 1" in str(exc_info.value)


def test_whitespace_and_comments_insignificant():
    a = parse_program("p(a).\nq :- p(a).")
    b = parse_program("  p( a ) .  % fact\n\n q \t:-   p(a) . ")
    assert a.clauses == b.clauses


_name = st.sampled_from(["p", "q", "r", "holds", "f"])
_const = st.sampled_from(["a", "b", "c", "tom"])
_var = st.sampled_from(["X", "Y", "Z"])


def _term_strategy(depth: int):
    if depth == 0:
        return st.one_of(_const.map(const), _var.map(var))
    sub = _term_strategy(depth - 1)
    return st.one_of(
        _const.map(const),
        _var.map(var),
        st.builds(lambda n, args: compound(n, *args), _name, st.lists(sub, min_size=1, max_size=2)),
    )


_atom_strategy = st.one_of(
    _name.map(const),
    st.builds(lambda n, args: compound(n, *args), _name, st.lists(_term_strategy(1), min_size=1, max_size=2)),
)

_clause_strategy = st.builds(
    lambda head, body: Clause(head, tuple(body)),
    _atom_strategy,
    st.lists(st.builds(Literal, st.booleans(), _atom_strategy), max_size=3),
)


@given(st.lists(_clause_strategy, max_size=5))
def test_print_parse_round_trip(clauses):
    program = Program(tuple(clauses))
    printed = format_program(program)
    reparsed = parse_program(printed)
    assert reparsed.clauses == program.clauses
    # and a second round trip is a fixed point
    assert parse_program(format_program(reparsed)).clauses == reparsed.clauses
