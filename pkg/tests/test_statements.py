"""Module elaboration: inlining, binding rules, and their failure modes."""

from __future__ import annotations

import pytest

from skini import expr as ex
from skini import statements as st
from skini.errors import (
    RecursiveInstantiation,
    UnboundInterfaceSignal,
    UnknownModule,
    UnknownSignal,
)


def module(name, signals, body):
    return st.ModuleDef(
        name,
        tuple(st.SignalDecl(n, d) for n, d in signals),
        body,
    )


def test_implicit_binding_keeps_same_name():
    mods = {
        "Main": module("Main", [("A", "out")], st.Run("M", None)),
        "M": module("M", [("A", "out")], st.Emit("A", ex.Lit(1))),
    }
    assert st.elaborate(mods, "Main") == st.Emit("A", ex.Lit(1))


def test_explicit_rename_rewrites_every_occurrence():
    body = st.Seq((
        st.Await(ex.Now("solo")),
        st.Emit("solo", ex.Lit("x")),
    ))
    mods = {
        "Main": module(
            "Main", [("leadChoice", "in")],
            st.Run("M", (st.Binding("solo", "leadChoice", "as"),)),
        ),
        "M": module("M", [("solo", "in")], body),
    }
    out = st.elaborate(mods, "Main")
    assert out == st.Seq((
        st.Await(ex.Now("leadChoice")),
        st.Emit("leadChoice", ex.Lit("x")),
    ))


def test_unknown_module():
    mods = {"Main": module("Main", [], st.Run("Ghost", None))}
    with pytest.raises(UnknownModule):
        st.elaborate(mods, "Main")
    with pytest.raises(UnknownModule):
        st.elaborate(mods, "Nope")


def test_unbound_interface_signal_implicit():
    mods = {
        "Main": module("Main", [("B", "out")], st.Run("M", None)),
        "M": module("M", [("A", "out")], st.Emit("A")),
    }
    with pytest.raises(UnboundInterfaceSignal):
        st.elaborate(mods, "Main")


def test_unbound_interface_signal_explicit_partial():
    mods = {
        "Main": module(
            "Main", [("X", "out")],
            st.Run("M", (st.Binding("A", "X", "as"),)),
        ),
        "M": module("M", [("A", "out"), ("B", "out")], st.Emit("A")),
    }
    with pytest.raises(UnboundInterfaceSignal):
        st.elaborate(mods, "Main")


def test_recursive_instantiation_detected():
    mods = {
        "Main": module("Main", [], st.Run("M", None)),
        "M": module("M", [], st.Run("Main", None)),
    }
    with pytest.raises(RecursiveInstantiation):
        st.elaborate(mods, "Main")


def test_locals_renamed_apart_across_instances():
    inner = st.Local(
        st.SignalDecl("x", "local", 0),
        st.Emit("A", ex.NowVal("x")),
        display="x",
    )
    mods = {
        "Main": module(
            "Main", [("A", "out")],
            st.Seq((st.Run("M", None), st.Run("M", None))),
        ),
        "M": module("M", [("A", "out")], inner),
    }
    out = st.elaborate(mods, "Main")
    first, second = out.body
    assert first.decl.name != second.decl.name
    assert first.display == second.display == "x"
    # each body reads its own renamed local
    assert first.body.value == ex.NowVal(first.decl.name)
    assert second.body.value == ex.NowVal(second.decl.name)


def test_undeclared_signal_reference_rejected():
    mods = {"Main": module("Main", [("A", "out")], st.Emit("B"))}
    with pytest.raises(UnknownSignal):
        st.elaborate(mods, "Main")


def test_local_shadows_interface_signal():
    prog = st.Local(
        st.SignalDecl("A", "local", None),
        st.Emit("A"),
        display="A",
    )
    mods = {"Main": module("Main", [("A", "out")], prog)}
    out = st.elaborate(mods, "Main")
    assert out.decl.name != "A"  # renamed apart from the interface signal
    assert out.body.signal == out.decl.name
