"""Parser for the rule-base language.

Grammar (bit-exact):

    program   :=  { clause }
    clause    :=  atom "."  |  atom ":-" literal { "," literal } "."
    literal   :=  [ "\\+" ] atom
    atom      :=  NAME [ "(" term { "," term } ")" ]
    term      :=  NAME [ "(" term { "," term } ")" ]  |  VARIABLE

NAME matches [a-z][A-Za-z0-9_]*, VARIABLE matches [A-Z_][A-Za-z0-9_]*.
Comments run from "%" to end of line; whitespace between tokens is
insignificant. Errors carry a 1-based line and column and never abort
the process.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import Clause, Literal, Program, Term, const, compound, var


class ParseError(Exception):
    """Syntax error with 1-based position information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # "name", "variable", "punct", "eof"
    text: str
    line: int
    column: int


_PUNCT_TWO = (":-", "\\+")
_PUNCT_ONE = ".,()"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT_TWO:
            tokens.append(_Token("punct", two, line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_ONE:
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            word = text[start:i]
            kind = "variable" if word[0].isupper() or word[0] == "_" else "name"
            tokens.append(_Token(kind, word, line, start_col))
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.current
        return ParseError(message, tok.line, tok.column)

    def _expect_punct(self, text: str, context: str) -> _Token:
        tok = self.current
        if tok.kind == "punct" and tok.text == text:
            return self._advance()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self._error(f"expected {text!r} {context}, found {found}", tok)

    def parse_term(self) -> Term:
        tok = self.current
        if tok.kind == "variable":
            self._advance()
            return var(tok.text)
        if tok.kind == "name":
            return self.parse_atom()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self._error(f"expected a term, found {found}", tok)

    def parse_atom(self) -> Term:
        tok = self.current
        if tok.kind != "name":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self._error(f"expected an atom, found {found}", tok)
        self._advance()
        cur = self.current
        if not (cur.kind == "punct" and cur.text == "("):
            return const(tok.text)
        open_tok = self._advance()
        args = [self.parse_term()]
        while True:
            cur = self.current
            if cur.kind == "punct" and cur.text == ",":
                self._advance()
                args.append(self.parse_term())
                continue
            if cur.kind == "punct" and cur.text == ")":
                self._advance()
                break
            if cur.kind == "eof":
                raise self._error(
                    "unclosed parenthesis in argument list "
                    f"(opened at line {open_tok.line}, column {open_tok.column})",
                    cur,
                )
            raise self._error(f"expected ',' or ')', found {cur.text!r}", cur)
        return compound(tok.text, *args)

    def parse_literal(self) -> Literal:
        tok = self.current
        negated = tok.kind == "punct" and tok.text == "\\+"
        if negated:
            self._advance()
        return Literal(negated, self.parse_atom())

    def parse_clause(self) -> Clause:
        head = self.parse_atom()
        tok = self.current
        if tok.kind == "punct" and tok.text == ".":
            self._advance()
            return Clause(head)
        if tok.kind == "punct" and tok.text == ":-":
            self._advance()
            body = [self.parse_literal()]
            while True:
                cur = self.current
                if cur.kind == "punct" and cur.text == ",":
                    self._advance()
                    body.append(self.parse_literal())
                    continue
                break
            self._expect_punct(".", "to terminate the clause")
            return Clause(head, tuple(body))
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self._error(f"expected '.' or ':-' after clause head, found {found}", tok)

    def parse_program(self) -> list[Clause]:
        clauses: list[Clause] = []
        while self.current.kind != "eof":
            clauses.append(self.parse_clause())
        return clauses


def parse_program(text: str) -> Program:
    """Parse a full rule base, preserving clause order."""
    return Program(tuple(_Parser(text).parse_program()), source_text=text)


def parse_query(text: str) -> Term:
    """Parse one query atom, with an optional trailing period."""
    parser = _Parser(text)
    term = parser.parse_atom()
    tok = parser.current
    if tok.kind == "punct" and tok.text == ".":
        parser._advance()
        tok = parser.current
    if tok.kind != "eof":
        raise parser._error(f"unexpected trailing input {tok.text!r}", tok)
    return term
