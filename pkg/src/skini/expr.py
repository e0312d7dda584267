"""Signal expressions: the pure condition language used by the orchestration DSL.

An expression reads only the broadcast environment (``S.now`` for status,
``S.nowval`` for the persistent value) plus literals and the usual arithmetic,
comparison, and boolean connectives.  Evaluation is total once every referenced
signal is settled for the instant; before that it reports ``NotReady`` with the
set of signals still in flight, which is what drives micro-scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ExprTypeError, UninitializedValueRead


@dataclass(frozen=True)
class Lit:
    value: object  # bool | int | float | str


@dataclass(frozen=True)
class Now:
    signal: str


@dataclass(frozen=True)
class NowVal:
    signal: str


@dataclass(frozen=True)
class Unary:
    op: str  # '!' | '-'
    operand: "SigExpr"


@dataclass(frozen=True)
class Binary:
    op: str  # '||' '&&' '==' '!=' '<' '<=' '>' '>=' '+' '-' '*' '%'
    left: "SigExpr"
    right: "SigExpr"


SigExpr = Union[Lit, Now, NowVal, Unary, Binary]


@dataclass(frozen=True)
class NotReady:
    """Evaluation outcome when referenced signals are not yet settled."""

    missing: frozenset


def signals_of(expr) -> frozenset:
    """All signal names an expression reads (status or value)."""
    out = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, (Now, NowVal)):
            out.add(e.signal)
        elif isinstance(e, Unary):
            stack.append(e.operand)
        elif isinstance(e, Binary):
            stack.append(e.left)
            stack.append(e.right)
    return frozenset(out)


def rename_signals(expr, mapping):
    """Rewrite every signal reference through ``mapping`` (name -> name)."""
    if isinstance(expr, Now):
        return Now(mapping.get(expr.signal, expr.signal))
    if isinstance(expr, NowVal):
        return NowVal(mapping.get(expr.signal, expr.signal))
    if isinstance(expr, Unary):
        return Unary(expr.op, rename_signals(expr.operand, mapping))
    if isinstance(expr, Binary):
        return Binary(
            expr.op,
            rename_signals(expr.left, mapping),
            rename_signals(expr.right, mapping),
        )
    return expr


# --- evaluation -------------------------------------------------------------

_UNKNOWN = object()


def _kind(v):
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, (int, float)):
        return "number"
    if isinstance(v, str):
        return "string"
    return "other"


def _num(v, op):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ExprTypeError(f"operator {op!r} needs numbers, got {v!r}")
    return v


def _strict_eq(a, b):
    if _kind(a) != _kind(b):
        return False
    return a == b


def _trunc_rem(a, b):
    # remainder truncated toward zero, matching the DSL's JS-flavored `%`
    if b == 0:
        raise ExprTypeError("modulo by zero")
    if isinstance(a, int) and isinstance(b, int):
        return a - b * int(a / b)
    return math.fmod(a, b)


class SignalReader:
    """What evaluation needs from a broadcast environment.

    ``try_status`` returns True/False once the status is known for the
    instant, None while emitters may still run.  ``try_value`` follows the
    same convention and raises UninitializedValueRead for a settled signal
    that never carried a value.
    """

    def try_status(self, name):  # pragma: no cover - interface
        raise NotImplementedError

    def try_value(self, name):  # pragma: no cover - interface
        raise NotImplementedError


def eval_expr(expr, env):
    """Evaluate ``expr`` against ``env``; a value, or NotReady(missing).

    All referenced signals must settle before any result is produced (no
    short-circuiting), so the answer never depends on evaluation order.
    """
    missing = set()
    val = _ev(expr, env, missing)
    if missing:
        return NotReady(frozenset(missing))
    return val


def eval_bool(expr, env):
    v = eval_expr(expr, env)
    if isinstance(v, NotReady):
        return v
    if not isinstance(v, bool):
        raise ExprTypeError(f"condition evaluated to non-boolean {v!r}")
    return v


def _ev(expr, env, missing):
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Now):
        st = env.try_status(expr.signal)
        if st is None:
            missing.add(expr.signal)
            return _UNKNOWN
        return st
    if isinstance(expr, NowVal):
        st = env.try_status(expr.signal)
        if st is None:
            missing.add(expr.signal)
            return _UNKNOWN
        return env.try_value(expr.signal)
    if isinstance(expr, Unary):
        v = _ev(expr.operand, env, missing)
        if missing:
            return _UNKNOWN
        if expr.op == "!":
            if not isinstance(v, bool):
                raise ExprTypeError(f"operator '!' needs a boolean, got {v!r}")
            return not v
        return -_num(v, "-")
    if isinstance(expr, Binary):
        lhs = _ev(expr.left, env, missing)
        rhs = _ev(expr.right, env, missing)
        if missing:
            return _UNKNOWN
        return _apply(expr.op, lhs, rhs)
    raise TypeError(f"not a signal expression: {expr!r}")


def _apply(op, a, b):
    if op == "||" or op == "&&":
        if not (isinstance(a, bool) and isinstance(b, bool)):
            raise ExprTypeError(f"operator {op!r} needs booleans")
        return (a or b) if op == "||" else (a and b)
    if op == "==":
        return _strict_eq(a, b)
    if op == "!=":
        return not _strict_eq(a, b)
    if op in ("<", "<=", ">", ">="):
        if _kind(a) == _kind(b) == "string":
            pass
        else:
            a, b = _num(a, op), _num(b, op)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    a, b = _num(a, op), _num(b, op)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "%":
        return _trunc_rem(a, b)
    raise TypeError(f"unknown operator {op!r}")


# --- printing ---------------------------------------------------------------

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "%": 6,
}
_UNARY_PREC = 7


def format_literal(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        s = v.replace("\\", "\\\\").replace('"', '\\"')
        s = s.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{s}"'
    if isinstance(v, float):
        if v == int(v) and abs(v) < 1e15:
            return f"{v:.1f}"  # keep the dot so the token stays a float
        text = repr(v)
        if "e" in text or "E" in text:
            text = f"{v:.12f}".rstrip("0")
        return text
    return repr(v)


def to_source(expr, parent_prec=0) -> str:
    if isinstance(expr, Lit):
        return format_literal(expr.value)
    if isinstance(expr, Now):
        return f"{expr.signal}.now"
    if isinstance(expr, NowVal):
        return f"{expr.signal}.nowval"
    if isinstance(expr, Unary):
        s = expr.op + to_source(expr.operand, _UNARY_PREC)
        return f"({s})" if parent_prec > _UNARY_PREC else s
    if isinstance(expr, Binary):
        prec = _PREC[expr.op]
        op = {"==": "===", "!=": "!=="}.get(expr.op, expr.op)
        # left-associative: the right child needs strictly higher precedence
        s = (
            to_source(expr.left, prec)
            + f" {op} "
            + to_source(expr.right, prec + 1)
        )
        return f"({s})" if parent_prec > prec else s
    raise TypeError(f"not a signal expression: {expr!r}")
