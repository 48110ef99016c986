"""Abstract syntax for RankPL programs, desugaring and pretty-printing.

Statements come in seven core forms (skip, sequence, assignment, conditional,
loop, ranked choice, observation) plus sugar that :func:`desugar` lowers onto
them.  Trees are immutable; source positions ride along for error reporting
but never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .ranking import INF, _Infinity

Pos = "tuple[int, int]"


class DesugarError(ValueError):
    """A statically detectable problem while lowering sugar."""


# -- expressions --------------------------------------------------------------


class NumExpr:
    __slots__ = ()


class BoolExpr:
    __slots__ = ()


@dataclass(frozen=True)
class IntLit(NumExpr):
    value: "int | _Infinity"
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Var(NumExpr):
    name: str
    indices: tuple = ()
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class RankOf(NumExpr):
    cond: BoolExpr
    pos: Pos = field(default=None, compare=False)


#: numeric operators: the four arithmetic ones plus the bit extension set
NUM_OPS = ("+", "-", "*", "/", "%", "xor", "band", "bor")


@dataclass(frozen=True)
class BinOp(NumExpr):
    op: str
    left: NumExpr
    right: NumExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Not(BoolExpr):
    operand: BoolExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr
    pos: Pos = field(default=None, compare=False)


#: comparison operators; only == and < survive desugaring
CMP_OPS = ("==", "<", "<=")


@dataclass(frozen=True)
class Cmp(BoolExpr):
    op: str
    left: NumExpr
    right: NumExpr
    pos: Pos = field(default=None, compare=False)


# -- statements ---------------------------------------------------------------


class Stmt:
    __slots__ = ()


@dataclass(frozen=True)
class Skip(Stmt):
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Seq(Stmt):
    first: Stmt
    second: Stmt
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    indices: tuple
    value: NumExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class IfThenElse(Stmt):
    cond: BoolExpr
    then_branch: Stmt
    else_branch: Stmt
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class While(Stmt):
    cond: BoolExpr
    body: Stmt
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class RankedChoice(Stmt):
    first: Stmt
    rank: NumExpr
    second: Stmt
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Observe(Stmt):
    cond: BoolExpr
    pos: Pos = field(default=None, compare=False)


# sugar


@dataclass(frozen=True)
class IfThen(Stmt):
    cond: BoolExpr
    then_branch: Stmt
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class ChoiceAssign(Stmt):
    """``x := e1 or(e) e2``: assign the first normally, the second at rank e."""

    name: str
    indices: tuple
    first: NumExpr
    rank: NumExpr
    second: NumExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class UniformPick(Stmt):
    """``x := any_of(lo .. hi)``: a rank-0 draw from an integer interval."""

    name: str
    indices: tuple
    lower: int
    upper: int
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class ObserveJ(Stmt):
    """Observe with firmness: afterwards the condition is believed exactly
    that firmly instead of irrevocably."""

    strength: NumExpr
    cond: BoolExpr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class ObserveL(Stmt):
    """Observe with impact: the condition improves by the given number of
    ranks relative to its negation, reversibly."""

    strength: NumExpr
    cond: BoolExpr
    pos: Pos = field(default=None, compare=False)


CORE_STMTS = (Skip, Seq, Assign, IfThenElse, While, RankedChoice, Observe)


# -- expansions ---------------------------------------------------------------


def expand_observe_j(strength: NumExpr, cond: BoolExpr, pos: Pos = None) -> Stmt:
    """Lower an observe-with-firmness into core constructs: a ranked choice
    between observing the condition and observing its negation."""
    return RankedChoice(
        Observe(cond, pos=pos),
        strength,
        Observe(Not(cond, pos=pos), pos=pos),
        pos=pos,
    )


def expand_observe_l(strength: NumExpr, cond: BoolExpr, pos: Pos = None) -> Stmt:
    """Lower an observe-with-impact into core constructs plus rank
    expressions.

    When the condition is no more surprising than the requested impact, the
    evidence is taken at face value and its negation kept around at a rank
    that preserves relative standing; otherwise the roles flip.
    """
    rank_b = RankOf(cond, pos=pos)
    rank_not_b = RankOf(Not(cond, pos=pos), pos=pos)
    taken = RankedChoice(
        Observe(cond, pos=pos),
        BinOp("+", BinOp("-", strength, rank_b, pos=pos), rank_not_b, pos=pos),
        Observe(Not(cond, pos=pos), pos=pos),
        pos=pos,
    )
    flipped = RankedChoice(
        Observe(Not(cond, pos=pos), pos=pos),
        BinOp("-", rank_b, strength, pos=pos),
        Observe(cond, pos=pos),
        pos=pos,
    )
    return IfThenElse(Cmp("<=", rank_b, strength, pos=pos), taken, flipped, pos=pos)


# -- desugaring ---------------------------------------------------------------


def desugar_num(e: NumExpr) -> NumExpr:
    if isinstance(e, IntLit):
        return e
    if isinstance(e, Var):
        if not e.indices:
            return e
        return Var(e.name, tuple(desugar_num(i) for i in e.indices), pos=e.pos)
    if isinstance(e, RankOf):
        return RankOf(desugar_bool(e.cond), pos=e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.op, desugar_num(e.left), desugar_num(e.right), pos=e.pos)
    raise TypeError(f"not a numeric expression: {e!r}")


def desugar_bool(b: BoolExpr) -> BoolExpr:
    if isinstance(b, Not):
        return Not(desugar_bool(b.operand), pos=b.pos)
    if isinstance(b, Or):
        return Or(desugar_bool(b.left), desugar_bool(b.right), pos=b.pos)
    if isinstance(b, And):
        # conjunction is defined through disjunction and negation
        return Not(
            Or(
                Not(desugar_bool(b.left), pos=b.pos),
                Not(desugar_bool(b.right), pos=b.pos),
                pos=b.pos,
            ),
            pos=b.pos,
        )
    if isinstance(b, Cmp):
        left, right = desugar_num(b.left), desugar_num(b.right)
        if b.op == "<=":
            return Not(Cmp("<", right, left, pos=b.pos), pos=b.pos)
        return Cmp(b.op, left, right, pos=b.pos)
    raise TypeError(f"not a boolean expression: {b!r}")


def desugar(s: Stmt, *, keep_observe_forms: bool = False) -> Stmt:
    """Lower a statement onto the core constructors.

    With ``keep_observe_forms`` the observeJ/observeL statements survive (with
    desugared children) so an evaluator can check their definedness against
    the ranking they actually run on; everything else is always lowered.
    """
    if isinstance(s, Skip):
        return s
    if isinstance(s, Seq):
        first = desugar(s.first, keep_observe_forms=keep_observe_forms)
        second = desugar(s.second, keep_observe_forms=keep_observe_forms)
        # canonicalize to the parser's right-nested shape (composition is
        # associative, so this is meaning-preserving)
        while isinstance(first, Seq):
            second = Seq(first.second, second, pos=second.pos)
            first = first.first
        return Seq(first, second, pos=s.pos)
    if isinstance(s, Assign):
        return Assign(
            s.name,
            tuple(desugar_num(i) for i in s.indices),
            desugar_num(s.value),
            pos=s.pos,
        )
    if isinstance(s, IfThenElse):
        return IfThenElse(
            desugar_bool(s.cond),
            desugar(s.then_branch, keep_observe_forms=keep_observe_forms),
            desugar(s.else_branch, keep_observe_forms=keep_observe_forms),
            pos=s.pos,
        )
    if isinstance(s, While):
        return While(
            desugar_bool(s.cond),
            desugar(s.body, keep_observe_forms=keep_observe_forms),
            pos=s.pos,
        )
    if isinstance(s, RankedChoice):
        return RankedChoice(
            desugar(s.first, keep_observe_forms=keep_observe_forms),
            desugar_num(s.rank),
            desugar(s.second, keep_observe_forms=keep_observe_forms),
            pos=s.pos,
        )
    if isinstance(s, Observe):
        return Observe(desugar_bool(s.cond), pos=s.pos)
    if isinstance(s, IfThen):
        return desugar(
            IfThenElse(s.cond, s.then_branch, Skip(pos=s.pos), pos=s.pos),
            keep_observe_forms=keep_observe_forms,
        )
    if isinstance(s, ChoiceAssign):
        return desugar(
            RankedChoice(
                Assign(s.name, s.indices, s.first, pos=s.pos),
                s.rank,
                Assign(s.name, s.indices, s.second, pos=s.pos),
                pos=s.pos,
            ),
            keep_observe_forms=keep_observe_forms,
        )
    if isinstance(s, UniformPick):
        if s.lower > s.upper:
            raise DesugarError(
                f"empty range in any_of({s.lower} .. {s.upper})"
            )
        picks = Assign(s.name, s.indices, IntLit(s.upper, pos=s.pos), pos=s.pos)
        for n in range(s.upper - 1, s.lower - 1, -1):
            picks = RankedChoice(
                Assign(s.name, s.indices, IntLit(n, pos=s.pos), pos=s.pos),
                IntLit(0, pos=s.pos),
                picks,
                pos=s.pos,
            )
        return desugar(picks, keep_observe_forms=keep_observe_forms)
    if isinstance(s, ObserveJ):
        strength = desugar_num(s.strength)
        cond = desugar_bool(s.cond)
        if keep_observe_forms:
            return ObserveJ(strength, cond, pos=s.pos)
        return desugar(expand_observe_j(strength, cond, pos=s.pos))
    if isinstance(s, ObserveL):
        strength = desugar_num(s.strength)
        cond = desugar_bool(s.cond)
        if keep_observe_forms:
            return ObserveL(strength, cond, pos=s.pos)
        return desugar(expand_observe_l(strength, cond, pos=s.pos))
    raise TypeError(f"not a statement: {s!r}")


# -- pretty-printing ----------------------------------------------------------


def _pp_num(e: NumExpr) -> str:
    if isinstance(e, IntLit):
        if e.value is INF:
            return "inf"
        if e.value < 0:
            # integer tokens are non-negative; negative literals only enter
            # trees programmatically and print as a subtraction
            return f"(0 - {-e.value})"
        return str(e.value)
    if isinstance(e, Var):
        return e.name + "".join(f"[{_pp_num(i)}]" for i in e.indices)
    if isinstance(e, RankOf):
        return f"rank({_pp_bool(e.cond)})"
    if isinstance(e, BinOp):
        return f"({_pp_num(e.left)} {e.op} {_pp_num(e.right)})"
    raise TypeError(f"not a numeric expression: {e!r}")


def _pp_bool(b: BoolExpr) -> str:
    if isinstance(b, Not):
        return f"!({_pp_bool(b.operand)})"
    if isinstance(b, Or):
        return f"({_pp_bool(b.left)} || {_pp_bool(b.right)})"
    if isinstance(b, And):
        return f"({_pp_bool(b.left)} && {_pp_bool(b.right)})"
    if isinstance(b, Cmp):
        return f"{_pp_num(b.left)} {b.op} {_pp_num(b.right)}"
    raise TypeError(f"not a boolean expression: {b!r}")


def _lvalue(name: str, indices: tuple) -> str:
    return name + "".join(f"[{_pp_num(i)}]" for i in indices)


def pretty_print(s: Stmt) -> str:
    """Emit concrete syntax; parsing it back reproduces the (desugared) tree.

    The one exception is negative integer literals, which the concrete
    syntax cannot express: they print as ``(0 - n)``, which parses to the
    equivalent subtraction.
    """
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Seq):
        return f"{pretty_print(s.first)}; {pretty_print(s.second)}"
    if isinstance(s, Assign):
        return f"{_lvalue(s.name, s.indices)} := {_pp_num(s.value)}"
    if isinstance(s, IfThenElse):
        return (
            f"if {_pp_bool(s.cond)} then {{ {pretty_print(s.then_branch)} }}"
            f" else {{ {pretty_print(s.else_branch)} }}"
        )
    if isinstance(s, While):
        return f"while {_pp_bool(s.cond)} do {{ {pretty_print(s.body)} }}"
    if isinstance(s, RankedChoice):
        return (
            f"either {{ {pretty_print(s.first)} }}"
            f" or ({_pp_num(s.rank)}) {{ {pretty_print(s.second)} }}"
        )
    if isinstance(s, Observe):
        return f"observe {_pp_bool(s.cond)}"
    if isinstance(s, IfThen):
        return f"if {_pp_bool(s.cond)} then {{ {pretty_print(s.then_branch)} }}"
    if isinstance(s, ChoiceAssign):
        return (
            f"{_lvalue(s.name, s.indices)} := {_pp_num(s.first)}"
            f" or({_pp_num(s.rank)}) {_pp_num(s.second)}"
        )
    if isinstance(s, UniformPick):
        return f"{_lvalue(s.name, s.indices)} := any_of({s.lower} .. {s.upper})"
    if isinstance(s, ObserveJ):
        return f"observeJ({_pp_num(s.strength)}, {_pp_bool(s.cond)})"
    if isinstance(s, ObserveL):
        return f"observeL({_pp_num(s.strength)}, {_pp_bool(s.cond)})"
    raise TypeError(f"not a statement: {s!r}")
