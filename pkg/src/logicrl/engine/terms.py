"""Term representation, substitutions, and unification for the rule engine.

Terms follow Prolog naming conventions: variables start with an uppercase
letter or underscore, constants and functors with a lowercase letter.
Substitutions are plain dicts mapping variable names to terms, kept
idempotent by construction (every right-hand side is fully resolved and
never mentions a bound variable).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

VARIABLE = "variable"
CONSTANT = "constant"
COMPOUND = "compound"

_VAR_NAME = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
_ATOM_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

Subst = dict[str, "Term"]


@dataclass(frozen=True)
class Term:
    kind: str
    name: str
    args: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if self.kind == VARIABLE:
            if self.args:
                raise ValueError(f"variable {self.name!r} takes no arguments")
            if not _VAR_NAME.match(self.name):
                raise ValueError(f"bad variable name {self.name!r}")
        elif self.kind == CONSTANT:
            if self.args:
                raise ValueError(f"constant {self.name!r} takes no arguments")
            if not _ATOM_NAME.match(self.name):
                raise ValueError(f"bad constant name {self.name!r}")
        elif self.kind == COMPOUND:
            if not self.args:
                raise ValueError(f"compound {self.name!r} needs at least one argument")
            if not _ATOM_NAME.match(self.name):
                raise ValueError(f"bad functor name {self.name!r}")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def predicate(self) -> tuple[str, int]:
        """(name, arity) key; only meaningful for constants and compounds."""
        return (self.name, len(self.args))

    def __str__(self) -> str:
        return format_term(self)


def var(name: str) -> Term:
    return Term(VARIABLE, name)


def const(name: str) -> Term:
    return Term(CONSTANT, name)


def compound(name: str, *args: Term) -> Term:
    return Term(COMPOUND, name, tuple(args))


def atom(name: str, *args: Term) -> Term:
    """Constant for arity 0, compound otherwise."""
    return compound(name, *args) if args else const(name)


@dataclass(frozen=True)
class Literal:
    """A possibly negated atom; negation is negation as failure."""

    negated: bool
    atom: Term

    def __post_init__(self) -> None:
        if self.atom.kind == VARIABLE:
            raise ValueError("literal atom cannot be a bare variable")

    def __str__(self) -> str:
        return format_literal(self)


@dataclass(frozen=True)
class Clause:
    """head :- body. A fact has an empty body."""

    head: Term
    body: tuple[Literal, ...] = ()

    def __post_init__(self) -> None:
        if self.head.kind == VARIABLE:
            raise ValueError("clause head cannot be a variable")

    @property
    def is_fact(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        return format_clause(self)


@dataclass(frozen=True)
class Program:
    """An ordered collection of clauses; resolution tries clauses in order."""

    clauses: tuple[Clause, ...]
    source_text: str = ""

    def __str__(self) -> str:
        return format_program(self)


def format_term(t: Term) -> str:
    if t.args:
        return f"{t.name}({', '.join(format_term(a) for a in t.args)})"
    return t.name


def format_literal(lit: Literal) -> str:
    text = format_term(lit.atom)
    return f"\\+ {text}" if lit.negated else text


def format_clause(c: Clause) -> str:
    if c.is_fact:
        return f"{format_term(c.head)}."
    body = ", ".join(format_literal(l) for l in c.body)
    return f"{format_term(c.head)} :- {body}."


def format_program(p: Program) -> str:
    return "\n".join(format_clause(c) for c in p.clauses) + ("\n" if p.clauses else "")


def term_variables(t: Term) -> set[str]:
    if t.kind == VARIABLE:
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def is_ground(t: Term) -> bool:
    if t.kind == VARIABLE:
        return False
    return all(is_ground(a) for a in t.args)


def clause_is_ground(c: Clause) -> bool:
    return is_ground(c.head) and all(is_ground(l.atom) for l in c.body)


def program_is_ground(p: Program) -> bool:
    return all(clause_is_ground(c) for c in p.clauses)


def apply_subst(s: Subst, t: Term) -> Term:
    """Apply a substitution. Idempotent substitutions need a single pass."""
    if not s:
        return t
    if t.kind == VARIABLE:
        return s.get(t.name, t)
    if not t.args:
        return t
    new_args = tuple(apply_subst(s, a) for a in t.args)
    if new_args == t.args:
        return t
    return Term(t.kind, t.name, new_args)


def apply_subst_literal(s: Subst, lit: Literal) -> Literal:
    new_atom = apply_subst(s, lit.atom)
    return lit if new_atom is lit.atom else Literal(lit.negated, new_atom)


def occurs_in(name: str, t: Term) -> bool:
    if t.kind == VARIABLE:
        return t.name == name
    return any(occurs_in(name, a) for a in t.args)


def _bind(s: Subst, name: str, value: Term) -> Optional[Subst]:
    # value is already fully resolved against s; keep all RHS resolved.
    if occurs_in(name, value):
        return None
    one = {name: value}
    out = {v: apply_subst(one, rhs) for v, rhs in s.items()}
    out[name] = value
    return out


def unify(t1: Term, t2: Term, subst: Optional[Subst] = None) -> Optional[Subst]:
    """Most general unifier of t1 and t2 extending `subst`, or None.

    The occurs check is always on. On success, applying the result to t1
    and to t2 yields identical terms.
    """
    s: Subst = dict(subst) if subst else {}
    stack: list[tuple[Term, Term]] = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = apply_subst(s, a)
        b = apply_subst(s, b)
        if a == b:
            continue
        if a.kind == VARIABLE:
            next_s = _bind(s, a.name, b)
            if next_s is None:
                return None
            s = next_s
        elif b.kind == VARIABLE:
            next_s = _bind(s, b.name, a)
            if next_s is None:
                return None
            s = next_s
        elif a.name == b.name and len(a.args) == len(b.args) and a.args:
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return s


def compose(outer: Subst, inner: Subst) -> Subst:
    """outer then inner: apply(result, t) == apply(inner, apply(outer, t)).

    Stays idempotent when inner binds only variables free after outer,
    which is how the solver always produces it.
    """
    if not outer:
        return dict(inner)
    if not inner:
        return dict(outer)
    out = {v: apply_subst(inner, rhs) for v, rhs in outer.items()}
    for v, rhs in inner.items():
        if v not in out:
            out[v] = rhs
    return out


def restrict_subst(s: Subst, names: set[str]) -> Subst:
    return {v: t for v, t in s.items() if v in names}


def rename_clause(c: Clause, tag: int) -> Clause:
    """Fresh-rename clause variables deterministically by position tag.

    Ground clauses are returned unchanged, which keeps the hot path for
    generated task programs allocation-free.
    """
    names: set[str] = term_variables(c.head)
    for lit in c.body:
        names |= term_variables(lit.atom)
    if not names:
        return c
    ren: Subst = {n: var(f"_V{tag}_{n}") for n in names}
    head = apply_subst(ren, c.head)
    body = tuple(Literal(l.negated, apply_subst(ren, l.atom)) for l in c.body)
    return Clause(head, body)
