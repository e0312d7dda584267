"""Statement trees for the synchronous reactive kernel, plus module elaboration.

A program is a tree of statements over broadcast signals.  Module instantiation
(``run``) is resolved before execution by inlining the callee body with its
interface signals renamed into the caller's scope; local signals are renamed
apart so the executing machine sees one flat namespace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

from . import expr as ex
from .errors import (
    RecursiveInstantiation,
    UnboundInterfaceSignal,
    UnknownModule,
    UnknownSignal,
)

SrcPos = Tuple[int, int]  # (line, col), 1-based


@dataclass(frozen=True)
class SignalDecl:
    name: str
    direction: str  # 'in' | 'out' | 'local'
    initial: object = None  # literal, or None for "no initial value"


@dataclass(frozen=True)
class TaskSpec:
    """Host-side asynchronous task attached to an ``async`` statement.

    ``on_start(handle)`` runs once the spawning reaction has completed;
    ``on_kill(handle)`` runs exactly once if the statement is preempted or the
    machine is disposed before the task completed.  A task signals completion
    by injecting a reaction in which ``completion_signal`` is present.
    """

    name: str
    on_start: Optional[Callable] = None
    on_kill: Optional[Callable] = None
    completion_signal: Optional[str] = None


@dataclass(frozen=True)
class Binding:
    callee: str
    caller: str
    form: str = "as"  # 'as' (signal rename) | '=' (staging argument)


@dataclass(frozen=True)
class Nothing:
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Emit:
    signal: str
    value: Optional[ex.SigExpr] = None
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Await:
    cond: ex.SigExpr
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AwaitCount:
    count: int
    cond: ex.SigExpr
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("await count needs n >= 1")


@dataclass(frozen=True)
class Seq:
    body: Tuple["Stmt", ...]
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Fork:
    branches: Tuple["Stmt", ...]
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError("fork needs at least two branches")


@dataclass(frozen=True)
class Every:
    cond: ex.SigExpr
    body: "Stmt"
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: ex.SigExpr
    then: "Stmt"
    orelse: Optional["Stmt"] = None
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Loop:
    body: "Stmt"
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Abort:
    cond: ex.SigExpr
    body: "Stmt"
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Suspend:
    cond: ex.SigExpr
    body: "Stmt"
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Run:
    module: str
    bindings: Optional[Tuple[Binding, ...]]  # None means the implicit "..."
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Local:
    decl: SignalDecl
    body: "Stmt"
    display: str = ""  # source-level name, kept for diagnostics
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AsyncRun:
    task: TaskSpec
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


Stmt = Union[
    Nothing, Emit, Await, AwaitCount, Seq, Fork, Every, If, Loop,
    Abort, Suspend, Run, Local, AsyncRun,
]


@dataclass(frozen=True)
class ModuleDef:
    name: str
    interface: Tuple[SignalDecl, ...]
    body: Stmt
    pos: Optional[SrcPos] = field(default=None, compare=False, repr=False)


# --- tree helpers -----------------------------------------------------------

def children(stmt):
    if isinstance(stmt, Seq):
        return stmt.body
    if isinstance(stmt, Fork):
        return stmt.branches
    if isinstance(stmt, (Every, Loop, Abort, Suspend, Local)):
        return (stmt.body,)
    if isinstance(stmt, If):
        return (stmt.then,) if stmt.orelse is None else (stmt.then, stmt.orelse)
    return ()


def walk(stmt):
    stack = [stmt]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(children(s))


def local_decls(stmt):
    """Every Local declaration in the tree, in no particular order."""
    return [s for s in walk(stmt) if isinstance(s, Local)]


def referenced_signals(stmt) -> frozenset:
    """Signal names a statement tree emits or reads, before scoping."""
    out = set()
    for s in walk(stmt):
        if isinstance(s, Emit):
            out.add(s.signal)
            if s.value is not None:
                out |= ex.signals_of(s.value)
        elif isinstance(s, (Await, Every, If, Abort, Suspend)):
            out |= ex.signals_of(s.cond)
        elif isinstance(s, AwaitCount):
            out |= ex.signals_of(s.cond)
        elif isinstance(s, AsyncRun) and s.task.completion_signal:
            out.add(s.task.completion_signal)
    return frozenset(out)


def free_signals(stmt) -> frozenset:
    """Signals referenced but not bound by an enclosing ``signal`` decl."""

    def go(s, bound):
        acc = set()
        if isinstance(s, Local):
            inner = dict(bound)
            inner[s.display or s.decl.name] = True
            return go(s.body, inner)
        if isinstance(s, Emit):
            acc.add(s.signal)
            if s.value is not None:
                acc |= ex.signals_of(s.value)
        elif isinstance(s, (Await, AwaitCount, Every, If, Abort, Suspend)):
            acc |= ex.signals_of(s.cond)
        elif isinstance(s, AsyncRun) and s.task.completion_signal:
            acc.add(s.task.completion_signal)
        acc = {n for n in acc if n not in bound}
        for c in children(s):
            acc |= go(c, bound)
        return acc

    return frozenset(go(stmt, {}))


# --- elaboration ------------------------------------------------------------

LOCAL_SEP = "."  # machine-level local names are "<source-name>.<counter>"


def display_name(machine_name: str) -> str:
    return machine_name.split(LOCAL_SEP, 1)[0]


def elaborate(modules, entry):
    """Inline every ``run`` reachable from ``entry`` and rename signals.

    Returns the elaborated statement; the machine interface is the entry
    module's own interface.  Raises UnknownModule, UnboundInterfaceSignal,
    RecursiveInstantiation, or UnknownSignal.
    """
    if entry not in modules:
        raise UnknownModule(f"entry module {entry!r} is not defined")
    counter = [0]

    def fresh(name):
        counter[0] += 1
        return f"{name}{LOCAL_SEP}{counter[0]}"

    def inline(module, subst, stack):
        # subst: source name -> machine name, for everything in scope
        def rename(name, subst, pos):
            try:
                return subst[name]
            except KeyError:
                raise UnknownSignal(
                    f"signal {name!r} is not declared in module "
                    f"{module.name!r}" + _at(pos)
                ) from None

        def go(s, subst):
            if isinstance(s, Nothing):
                return s
            if isinstance(s, Emit):
                value = (
                    None if s.value is None
                    else ex.rename_signals(s.value, subst)
                )
                _check_expr(s.value, subst, module, s.pos)
                return Emit(rename(s.signal, subst, s.pos), value, pos=s.pos)
            if isinstance(s, Await):
                _check_expr(s.cond, subst, module, s.pos)
                return Await(ex.rename_signals(s.cond, subst), pos=s.pos)
            if isinstance(s, AwaitCount):
                _check_expr(s.cond, subst, module, s.pos)
                return AwaitCount(
                    s.count, ex.rename_signals(s.cond, subst), pos=s.pos
                )
            if isinstance(s, Seq):
                return Seq(tuple(go(c, subst) for c in s.body), pos=s.pos)
            if isinstance(s, Fork):
                return Fork(tuple(go(c, subst) for c in s.branches), pos=s.pos)
            if isinstance(s, Every):
                _check_expr(s.cond, subst, module, s.pos)
                return Every(
                    ex.rename_signals(s.cond, subst), go(s.body, subst),
                    pos=s.pos,
                )
            if isinstance(s, If):
                _check_expr(s.cond, subst, module, s.pos)
                return If(
                    ex.rename_signals(s.cond, subst),
                    go(s.then, subst),
                    None if s.orelse is None else go(s.orelse, subst),
                    pos=s.pos,
                )
            if isinstance(s, Loop):
                return Loop(go(s.body, subst), pos=s.pos)
            if isinstance(s, Abort):
                _check_expr(s.cond, subst, module, s.pos)
                return Abort(
                    ex.rename_signals(s.cond, subst), go(s.body, subst),
                    pos=s.pos,
                )
            if isinstance(s, Suspend):
                _check_expr(s.cond, subst, module, s.pos)
                return Suspend(
                    ex.rename_signals(s.cond, subst), go(s.body, subst),
                    pos=s.pos,
                )
            if isinstance(s, Local):
                src = s.display or s.decl.name
                machine = fresh(src)
                inner = dict(subst)
                inner[src] = machine
                return Local(
                    SignalDecl(machine, "local", s.decl.initial),
                    go(s.body, inner),
                    display=src,
                    pos=s.pos,
                )
            if isinstance(s, AsyncRun):
                task = s.task
                if task.completion_signal is not None:
                    comp = task.completion_signal
                    if comp not in subst:
                        raise UnknownSignal(
                            f"completion signal {comp!r} is not in scope"
                            + _at(s.pos)
                        )
                    task = TaskSpec(
                        task.name, task.on_start, task.on_kill, subst[comp]
                    )
                return AsyncRun(task, pos=s.pos)
            if isinstance(s, Run):
                return run_site(s, subst)
            raise TypeError(f"cannot elaborate {s!r}")

        def run_site(s, subst):
            if s.module not in modules:
                raise UnknownModule(
                    f"module {s.module!r} is not defined" + _at(s.pos)
                )
            if s.module in stack:
                raise RecursiveInstantiation(
                    " -> ".join(stack + [s.module]) + _at(s.pos)
                )
            callee = modules[s.module]
            callee_subst = {}
            if s.bindings is None:
                # "...": each interface signal binds to the same source name
                for decl in callee.interface:
                    if decl.name not in subst:
                        raise UnboundInterfaceSignal(
                            f"run {s.module}(...): caller has no signal named "
                            f"{decl.name!r}" + _at(s.pos)
                        )
                    callee_subst[decl.name] = subst[decl.name]
            else:
                explicit = {}
                for b in s.bindings:
                    if b.caller not in subst:
                        raise UnknownSignal(
                            f"run {s.module}: caller signal {b.caller!r} is "
                            f"not in scope" + _at(s.pos)
                        )
                    explicit[b.callee] = subst[b.caller]
                for decl in callee.interface:
                    if decl.name not in explicit:
                        raise UnboundInterfaceSignal(
                            f"run {s.module}: interface signal "
                            f"{decl.name!r} has no binding" + _at(s.pos)
                        )
                    callee_subst[decl.name] = explicit[decl.name]
            return inline(callee, callee_subst, stack + [s.module])

        return go(module.body, subst)

    root = modules[entry]
    subst = {decl.name: decl.name for decl in root.interface}
    return inline(root, subst, [entry])


def _check_expr(e, subst, module, pos):
    if e is None:
        return
    for name in ex.signals_of(e):
        if name not in subst:
            raise UnknownSignal(
                f"signal {name!r} is not declared in module {module.name!r}"
                + _at(pos)
            )


def _at(pos):
    return f" (line {pos[0]}, col {pos[1]})" if pos else ""
