"""Signal expression evaluation and printing."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as hs

from skini import expr as ex
from skini.errors import ExprTypeError, UninitializedValueRead


class FakeEnv(ex.SignalReader):
    """status: True/False/None (None = unsettled); values: name -> literal."""

    def __init__(self, status=None, values=None):
        self.status = status or {}
        self.values = values or {}

    def try_status(self, name):
        return self.status.get(name)

    def try_value(self, name):
        if name not in self.values:
            raise UninitializedValueRead(name)
        return self.values[name]


def test_absent_signal_status_is_false():
    env = FakeEnv(status={"S": False})
    assert ex.eval_expr(ex.Now("S"), env) is False


def test_present_value_comparison():
    env = FakeEnv(status={"sax": True}, values={"sax": 30})
    assert ex.eval_expr(
        ex.Binary(">", ex.NowVal("sax"), ex.Lit(20)), env
    ) is True


def test_unsettled_reports_missing_signals():
    env = FakeEnv(status={"A": None, "B": True}, values={"B": 1})
    out = ex.eval_expr(
        ex.Binary("&&", ex.Now("A"), ex.Now("B")), env
    )
    assert isinstance(out, ex.NotReady)
    assert out.missing == frozenset({"A"})


def test_no_short_circuit_both_sides_must_settle():
    env = FakeEnv(status={"A": False, "B": None})
    out = ex.eval_expr(ex.Binary("&&", ex.Now("A"), ex.Now("B")), env)
    assert isinstance(out, ex.NotReady)
    assert out.missing == frozenset({"B"})


def test_persisted_value_readable_when_absent():
    env = FakeEnv(status={"S": False}, values={"S": 7})
    assert ex.eval_expr(ex.NowVal("S"), env) == 7


def test_uninitialized_value_read():
    env = FakeEnv(status={"S": False})
    with pytest.raises(UninitializedValueRead):
        ex.eval_expr(ex.NowVal("S"), env)


def test_strict_equality_is_kind_aware():
    env = FakeEnv()
    assert ex.eval_expr(ex.Binary("==", ex.Lit(1), ex.Lit(True)), env) is False
    assert ex.eval_expr(ex.Binary("==", ex.Lit(1), ex.Lit(1.0)), env) is True
    assert ex.eval_expr(ex.Binary("!=", ex.Lit("a"), ex.Lit("b")), env) is True


def test_modulo_truncates_toward_zero():
    env = FakeEnv()
    assert ex.eval_expr(ex.Binary("%", ex.Lit(7), ex.Lit(3)), env) == 1
    assert ex.eval_expr(ex.Binary("%", ex.Lit(-7), ex.Lit(3)), env) == -1


def test_modulo_by_zero_raises():
    with pytest.raises(ExprTypeError):
        ex.eval_expr(ex.Binary("%", ex.Lit(1), ex.Lit(0)), FakeEnv())


def test_arithmetic_type_errors():
    with pytest.raises(ExprTypeError):
        ex.eval_expr(ex.Binary("+", ex.Lit("x"), ex.Lit(1)), FakeEnv())
    with pytest.raises(ExprTypeError):
        ex.eval_expr(ex.Unary("!", ex.Lit(3)), FakeEnv())


def test_signals_of_collects_all_references():
    e = ex.Binary(
        "||",
        ex.Binary(">", ex.NowVal("a"), ex.Lit(1)),
        ex.Unary("!", ex.Now("b")),
    )
    assert ex.signals_of(e) == frozenset({"a", "b"})


# --- printing round trip -------------------------------------------------------

# non-negative numbers only: "-5" in source is unary minus over a literal,
# so a negative Lit cannot survive a print/parse cycle unchanged
_names = hs.sampled_from(["A", "beat", "sax", "pulse", "x1"])
_literals = hs.one_of(
    hs.booleans(),
    hs.integers(min_value=0, max_value=999),
    hs.floats(min_value=0, max_value=100, allow_nan=False,
              allow_infinity=False).map(lambda f: round(f, 3)),
    hs.text(alphabet="abcXYZ ", max_size=6),
)


def _exprs(depth):
    if depth == 0:
        return hs.one_of(
            _literals.map(ex.Lit),
            _names.map(ex.Now),
            _names.map(ex.NowVal),
        )
    sub = _exprs(depth - 1)
    return hs.one_of(
        sub,
        hs.tuples(hs.sampled_from(["!", "-"]), sub).map(
            lambda t: ex.Unary(*t)
        ),
        hs.tuples(
            hs.sampled_from(list(ex._PREC)), sub, sub
        ).map(lambda t: ex.Binary(*t)),
    )


@given(_exprs(3))
def test_expr_print_parse_round_trip(e):
    from skini.dsl import _Parser

    text = ex.to_source(e)
    parsed = _Parser(text).expression()
    assert parsed == e
