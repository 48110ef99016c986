"""Concrete syntax for RankPL programs.

The textual rendering is deliberately plain ASCII: ``:=`` assignment, ``==``
``<`` ``<=`` ``>`` ``>=`` ``!=`` comparisons, ``!`` ``&&`` ``||`` boolean
operators, ``rank(b)`` rank expressions, ``either { s1 } or (e) { s2 }``
ranked choice with the sugars ``x := e1 or(e) e2`` and ``x := any_of(lo ..
hi)``, and ``observeJ(x, b)`` / ``observeL(x, b)`` for the generalized
observations.  ``//`` starts a line comment.  Simple statements end with
``;`` (omittable before ``}`` or end of input); block statements may carry an
optional ``;``.

Operator precedence, tightest first: unary ``!`` on booleans; ``*`` ``/``
``%``; ``+`` ``-``; ``xor`` ``band`` ``bor``; comparisons; ``&&``; ``||``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ranking import INF
from .syntax import (
    And,
    Assign,
    BinOp,
    BoolExpr,
    ChoiceAssign,
    Cmp,
    IfThen,
    IfThenElse,
    IntLit,
    Not,
    NumExpr,
    Observe,
    ObserveJ,
    ObserveL,
    Or,
    RankedChoice,
    RankOf,
    Seq,
    Skip,
    Stmt,
    UniformPick,
    Var,
    While,
)

KEYWORDS = frozenset(
    {
        "skip",
        "observe",
        "observeJ",
        "observeL",
        "if",
        "then",
        "else",
        "while",
        "do",
        "either",
        "or",
        "rank",
        "inf",
        "any_of",
        "xor",
        "band",
        "bor",
    }
)

_TWO_CHAR = (":=", "==", "!=", "<=", ">=", "&&", "||", "..")
_ONE_CHAR = "+-*/%<>!(){}[];,"


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | integer | symbol | eof
    text: str
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, message, line, column, expected=frozenset()):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, column = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            column = 1
            continue
        if ch in " \t\r":
            i += 1
            column += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_col = column
        two = source[i : i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token("symbol", two, line, start_col))
            i += 2
            column += 2
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("integer", source[i:j], line, start_col))
            column += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(Token(kind, text, line, start_col))
            column += j - i
            i = j
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("symbol", ch, line, start_col))
            i += 1
            column += 1
            continue
        if ch == "=":
            raise ParseError("'=' is not an operator (use '==' or ':=')", line, start_col)
        if ch == ":":
            raise ParseError("':' is not an operator (use ':=')", line, start_col)
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(Token("eof", "", line, column))
    return tokens


_CMP_TOKENS = ("==", "!=", "<", "<=", ">", ">=")
_NUM_FOLLOW = set(_CMP_TOKENS) | {"+", "-", "*", "/", "%", "xor", "band", "bor", ".."}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("symbol", "keyword") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            shown = tok.text if tok.kind != "eof" else "end of input"
            raise ParseError(
                f"expected '{text}', found '{shown}'",
                tok.line,
                tok.column,
                expected={text},
            )
        return self.advance()

    def fail(self, message: str, expected=frozenset()):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column, expected)

    # statements

    def program(self) -> Stmt:
        body = self.sequence(("eof",))
        self.expect_eof()
        return body

    def expect_eof(self):
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected '{tok.text}'", tok.line, tok.column)

    def sequence(self, stop: tuple) -> Stmt:
        def done() -> bool:
            tok = self.peek()
            return tok.kind == "eof" or ("}" in stop and self.at("}"))

        statements = []
        while not done():
            statements.append(self.statement(at_end=done))
        if not statements:
            return Skip(pos=(self.peek().line, self.peek().column))
        result = statements[-1]
        for stmt in reversed(statements[:-1]):
            result = Seq(stmt, result, pos=stmt.pos)
        return result

    def block(self) -> Stmt:
        self.expect("{")
        body = self.sequence(("}",))
        self.expect("}")
        return body

    def statement(self, at_end) -> Stmt:
        tok = self.peek()
        where = (tok.line, tok.column)
        if self.at("{"):
            body = self.block()
            self.accept(";")
            return body
        if self.accept("skip"):
            self.terminator(at_end)
            return Skip(pos=where)
        if self.accept("observe"):
            cond = self.bool_expr()
            self.terminator(at_end)
            return Observe(cond, pos=where)
        if self.at("observeJ") or self.at("observeL"):
            form = self.advance().text
            self.expect("(")
            strength = self.num_expr()
            self.expect(",")
            cond = self.bool_expr()
            self.expect(")")
            self.terminator(at_end)
            node = ObserveJ if form == "observeJ" else ObserveL
            return node(strength, cond, pos=where)
        if self.accept("if"):
            return self.if_statement(where)
        if self.accept("while"):
            cond = self.bool_expr()
            self.expect("do")
            body = self.block()
            self.accept(";")
            return While(cond, body, pos=where)
        if self.accept("either"):
            first = self.block()
            self.expect("or")
            self.expect("(")
            rank = self.num_expr()
            self.expect(")")
            second = self.block()
            self.accept(";")
            return RankedChoice(first, rank, second, pos=where)
        if tok.kind == "identifier":
            return self.assignment(at_end)
        self.fail(f"expected a statement, found '{tok.text or 'end of input'}'")

    def if_statement(self, where) -> Stmt:
        cond = self.bool_expr()
        self.expect("then")
        then_branch = self.block()
        if self.accept("else"):
            if self.at("if"):
                if_tok = self.advance()
                else_branch = self.if_statement((if_tok.line, if_tok.column))
            else:
                else_branch = self.block()
                self.accept(";")
            return IfThenElse(cond, then_branch, else_branch, pos=where)
        self.accept(";")
        return IfThen(cond, then_branch, pos=where)

    def terminator(self, at_end):
        if not self.accept(";") and not at_end():
            self.fail("expected ';'", expected={";"})

    def assignment(self, at_end) -> Stmt:
        name_tok = self.advance()
        where = (name_tok.line, name_tok.column)
        indices = []
        while self.accept("["):
            indices.append(self.num_expr())
            self.expect("]")
        self.expect(":=")
        if self.at("any_of"):
            self.advance()
            self.expect("(")
            lower = self.int_literal()
            self.expect("..")
            upper = self.int_literal()
            self.expect(")")
            self.terminator(at_end)
            return UniformPick(name_tok.text, tuple(indices), lower, upper, pos=where)
        value = self.num_expr()
        if self.accept("or"):
            self.expect("(")
            rank = self.num_expr()
            self.expect(")")
            second = self.num_expr()
            self.terminator(at_end)
            return ChoiceAssign(
                name_tok.text, tuple(indices), value, rank, second, pos=where
            )
        self.terminator(at_end)
        return Assign(name_tok.text, tuple(indices), value, pos=where)

    def int_literal(self) -> int:
        tok = self.peek()
        if tok.kind != "integer":
            self.fail("expected an integer literal")
        self.advance()
        return int(tok.text)

    # boolean expressions

    def bool_expr(self) -> BoolExpr:
        return self.bool_or()

    def bool_or(self) -> BoolExpr:
        left = self.bool_and()
        while self.at("||"):
            tok = self.advance()
            left = Or(left, self.bool_and(), pos=(tok.line, tok.column))
        return left

    def bool_and(self) -> BoolExpr:
        left = self.bool_unary()
        while self.at("&&"):
            tok = self.advance()
            left = And(left, self.bool_unary(), pos=(tok.line, tok.column))
        return left

    def bool_unary(self) -> BoolExpr:
        tok = self.peek()
        if self.accept("!"):
            return Not(self.bool_unary(), pos=(tok.line, tok.column))
        if self.at("("):
            # '(' is ambiguous: a parenthesized boolean or the start of a
            # numeric comparison.  Try the boolean reading, fall back.
            saved = self.pos
            try:
                self.advance()
                inner = self.bool_or()
                self.expect(")")
                follow = self.peek()
                if not (follow.text in _NUM_FOLLOW and follow.kind in ("symbol", "keyword")):
                    return inner
            except ParseError:
                pass
            self.pos = saved
        return self.comparison()

    def comparison(self) -> BoolExpr:
        left = self.num_expr()
        tok = self.peek()
        if not (tok.kind in ("symbol",) and tok.text in _CMP_TOKENS):
            self.fail(
                "expected a comparison operator", expected=set(_CMP_TOKENS)
            )
        self.advance()
        right = self.num_expr()
        where = (tok.line, tok.column)
        if tok.text == "==":
            return Cmp("==", left, right, pos=where)
        if tok.text == "<":
            return Cmp("<", left, right, pos=where)
        if tok.text == "<=":
            return Cmp("<=", left, right, pos=where)
        if tok.text == ">":
            return Cmp("<", right, left, pos=where)
        if tok.text == ">=":
            return Cmp("<=", right, left, pos=where)
        return Not(Cmp("==", left, right, pos=where), pos=where)

    # numeric expressions

    def num_expr(self) -> NumExpr:
        left = self.num_additive()
        while self.at("xor") or self.at("band") or self.at("bor"):
            tok = self.advance()
            left = BinOp(tok.text, left, self.num_additive(), pos=(tok.line, tok.column))
        return left

    def num_additive(self) -> NumExpr:
        left = self.num_multiplicative()
        while self.at("+") or self.at("-"):
            tok = self.advance()
            left = BinOp(
                tok.text, left, self.num_multiplicative(), pos=(tok.line, tok.column)
            )
        return left

    def num_multiplicative(self) -> NumExpr:
        left = self.num_atom()
        while self.at("*") or self.at("/") or self.at("%"):
            tok = self.advance()
            left = BinOp(tok.text, left, self.num_atom(), pos=(tok.line, tok.column))
        return left

    def num_atom(self) -> NumExpr:
        tok = self.peek()
        where = (tok.line, tok.column)
        if tok.kind == "integer":
            self.advance()
            return IntLit(int(tok.text), pos=where)
        if self.accept("inf"):
            return IntLit(INF, pos=where)
        if self.accept("rank"):
            self.expect("(")
            cond = self.bool_expr()
            self.expect(")")
            return RankOf(cond, pos=where)
        if tok.kind == "identifier":
            self.advance()
            indices = []
            while self.accept("["):
                indices.append(self.num_expr())
                self.expect("]")
            return Var(tok.text, tuple(indices), pos=where)
        if self.accept("("):
            inner = self.num_expr()
            self.expect(")")
            return inner
        self.fail(f"expected an expression, found '{tok.text or 'end of input'}'")


def parse_program(source: str) -> Stmt:
    """Parse a whole program into one statement tree.

    Sequences come out right-nested and sugar survives for ``desugar``.  An
    empty program is accepted and behaves like ``skip``.
    """
    return _Parser(tokenize(source)).program()
