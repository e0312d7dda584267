"""The synchronous reactive execution engine.

A machine executes an elaborated statement tree one *instant* (reaction) at a
time.  Within an instant every signal carries a single present/absent status
and at most one value, observed identically by all statements regardless of
execution order (the synchrony hypothesis).  This is enforced by construction:

- presence is monotone: once a signal is emitted it stays present for the
  rest of the instant, and conflicting re-emissions are an error;
- an expression only evaluates once every signal it references is *settled*:
  present, or provably un-emittable by any live statement this instant.

Settledness of absent signals is decided by a runtime "can emit" analysis
over the residual program.  When blocked statements remain and no signal can
be settled, the instant has no consistent schedule and a CausalityError is
raised (never a silent drop).

Statement activation is re-entrant within an instant: the scheduler repeats
passes over the tree until everything is terminated, paused until the next
instant, or provably stuck.  Branch visit order inside ``fork`` is pluggable
(``schedule_rng``) and, because reads wait for settledness, can never change
the outcome — the conformance suite exercises randomized orders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from . import expr as ex
from . import statements as st
from .errors import (
    CausalityError,
    DoubleEmission,
    InstantaneousLoop,
    MachineTerminated,
    UninitializedValueRead,
    UnknownInputSignal,
)

TERM = "term"
PAUSE = "pause"
BLOCK = "block"

_BLOCKED = object()  # sentinel returned by _Ctx.eval while deps are unsettled


class TaskHandle:
    """Identity of one spawned asynchronous task."""

    _ids = itertools.count(1)

    def __init__(self, spec: st.TaskSpec, inject):
        self.id = next(TaskHandle._ids)
        self.spec = spec
        self.completed = False
        self.killed = False
        self._inject = inject

    @property
    def alive(self):
        return not (self.completed or self.killed)

    def inject(self, inputs):
        """Ask the host to schedule a future reaction with these inputs."""
        if self._inject is None:
            raise RuntimeError(
                f"task {self.spec.name!r} has no host injection channel"
            )
        self._inject(inputs)

    def __repr__(self):
        return f"TaskHandle({self.spec.name!r}, id={self.id})"


@dataclass
class ReactionResult:
    instant: int
    emitted: Dict[str, object]
    terminated: bool
    spawned_tasks: Tuple[TaskHandle, ...] = ()
    killed_tasks: Tuple[TaskHandle, ...] = ()


class _Signal:
    __slots__ = (
        "name", "display", "direction", "initial", "present", "settled",
        "valued", "value", "ever_valued", "emit_kind",
    )

    def __init__(self, decl: st.SignalDecl):
        self.name = decl.name
        self.display = st.display_name(decl.name)
        self.direction = decl.direction
        self.initial = decl.initial
        self.reset_persistent()

    def reset_persistent(self):
        self.present = False
        self.settled = False
        self.valued = False
        self.emit_kind = None
        self.value = self.initial
        self.ever_valued = self.initial is not None

    def begin_instant(self):
        self.present = False
        self.settled = False
        self.valued = False
        self.emit_kind = None


class _Env(ex.SignalReader):
    def __init__(self, decls):
        self.signals: Dict[str, _Signal] = {}
        for decl in decls:
            if decl.name in self.signals:
                raise ValueError(f"duplicate signal {decl.name!r}")
            self.signals[decl.name] = _Signal(decl)
        self.version = 0
        self.instant = -1

    def begin_instant(self, inputs):
        self.instant += 1
        for sig in self.signals.values():
            sig.begin_instant()
        for name, value in inputs.items():
            sig = self.signals.get(name)
            if sig is None or sig.direction != "in":
                raise UnknownInputSignal(
                    f"{name!r} is not a declared input signal"
                )
            self._set(sig, value, valued=value is not None)
        self.version += 1

    def emit(self, name, value, valued):
        self._set(self.signals[name], value, valued)
        self.version += 1

    def _set(self, sig, value, valued):
        if valued:
            if sig.emit_kind == "pure":
                raise DoubleEmission(sig.display, None, value)
            if sig.emit_kind == "valued" and not _same_value(sig.value, value):
                raise DoubleEmission(sig.display, sig.value, value)
            sig.value = value
            sig.valued = True
            sig.ever_valued = True
            sig.emit_kind = "valued"
        else:
            if sig.emit_kind == "valued":
                raise DoubleEmission(sig.display, sig.value, None)
            sig.emit_kind = "pure"
        sig.present = True

    # SignalReader interface -------------------------------------------------
    def try_status(self, name):
        sig = self.signals[name]
        if sig.present:
            return True
        if sig.settled:
            return False
        return None

    def try_value(self, name):
        sig = self.signals[name]
        if not sig.ever_valued:
            raise UninitializedValueRead(sig.display)
        return sig.value

    # settling ----------------------------------------------------------------
    def settle_absent_except(self, can_emit) -> int:
        settled = 0
        for sig in self.signals.values():
            if not sig.present and not sig.settled and sig.name not in can_emit:
                sig.settled = True
                settled += 1
        if settled:
            self.version += 1
        return settled

    def reset_signal(self, name):
        self.signals[name].reset_persistent()
        self.version += 1


def _same_value(a, b):
    return type(a) is type(b) and a == b


class _Ctx:
    """Per-reaction scratch state handed to activation frames."""

    def __init__(self, env, rng, machine):
        self.env = env
        self.rng = rng
        self.machine = machine
        self.blocked: Dict[str, List] = {}
        self.spawned: List[TaskHandle] = []
        self.killed: List[TaskHandle] = []

    @property
    def instant(self):
        return self.env.instant

    def order(self, n):
        if self.rng is None:
            return range(n)
        return self.rng.sample(range(n), n)

    def begin_pass(self):
        self.blocked.clear()

    def eval(self, expr, pos, want_bool):
        fn = ex.eval_bool if want_bool else ex.eval_expr
        v = fn(expr, self.env)
        if isinstance(v, ex.NotReady):
            for name in v.missing:
                self.blocked.setdefault(name, []).append(pos)
            return _BLOCKED
        return v

    def spawn(self, spec):
        handle = TaskHandle(spec, self.machine._inject)
        self.spawned.append(handle)
        self.machine._live_tasks[handle.id] = handle
        return handle

    def kill_task(self, handle):
        if not handle.alive:
            return
        handle.killed = True
        self.machine._live_tasks.pop(handle.id, None)
        self.killed.append(handle)
        if handle.spec.on_kill is not None:
            handle.spec.on_kill(handle)


# --- activation frames -------------------------------------------------------
#
# One frame per *live instance* of a statement.  Restarting a body (loop,
# every) builds fresh frames, which is what resets local signals and await
# counters.  Frames tolerate re-activation within an instant: decisions that
# must happen once per instant are memoized on the instant index.


class _Frame:
    __slots__ = ()

    def kill(self, ctx):
        pass


class _NothingF(_Frame):
    __slots__ = ()

    def __init__(self, stmt):
        pass

    def activate(self, ctx):
        return TERM

    def can(self, ctx):
        return frozenset(), True


class _EmitF(_Frame):
    __slots__ = ("stmt", "done")

    def __init__(self, stmt):
        self.stmt = stmt
        self.done = False

    def activate(self, ctx):
        if self.done:
            return TERM
        if self.stmt.value is None:
            ctx.env.emit(self.stmt.signal, None, valued=False)
        else:
            v = ctx.eval(self.stmt.value, self.stmt.pos, want_bool=False)
            if v is _BLOCKED:
                return BLOCK
            ctx.env.emit(self.stmt.signal, v, valued=True)
        self.done = True
        return TERM

    def can(self, ctx):
        if self.done:
            return frozenset(), True
        return frozenset((self.stmt.signal,)), True


class _AwaitF(_Frame):
    __slots__ = ("stmt", "memo_instant", "memo_val")

    def __init__(self, stmt):
        self.stmt = stmt
        self.memo_instant = -1
        self.memo_val = False

    def activate(self, ctx):
        if self.memo_instant == ctx.instant:
            return TERM if self.memo_val else PAUSE
        v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
        if v is _BLOCKED:
            return BLOCK
        self.memo_instant = ctx.instant
        self.memo_val = v
        ctx.env.version += 1
        return TERM if v else PAUSE

    def can(self, ctx):
        if self.memo_instant == ctx.instant and not self.memo_val:
            return frozenset(), False
        return frozenset(), True


class _AwaitCountF(_Frame):
    __slots__ = ("stmt", "remaining", "memo_instant")

    def __init__(self, stmt):
        self.stmt = stmt
        self.remaining = stmt.count
        self.memo_instant = -1

    def activate(self, ctx):
        if self.memo_instant == ctx.instant:
            return TERM if self.remaining == 0 else PAUSE
        v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
        if v is _BLOCKED:
            return BLOCK
        self.memo_instant = ctx.instant
        if v:
            self.remaining -= 1
        ctx.env.version += 1
        return TERM if self.remaining == 0 else PAUSE

    def can(self, ctx):
        if self.memo_instant == ctx.instant:
            return frozenset(), self.remaining == 0
        return frozenset(), self.remaining <= 1


class _SeqF(_Frame):
    __slots__ = ("stmt", "idx", "cur")

    def __init__(self, stmt):
        self.stmt = stmt
        self.idx = 0
        self.cur = None

    def activate(self, ctx):
        body = self.stmt.body
        while True:
            if self.idx >= len(body):
                return TERM
            if self.cur is None:
                self.cur = _frame(body[self.idx])
            status = self.cur.activate(ctx)
            if status is not TERM:
                return status
            self.idx += 1
            self.cur = None
            ctx.env.version += 1

    def can(self, ctx):
        emits = set()
        body = self.stmt.body
        for i in range(self.idx, len(body)):
            if i == self.idx and self.cur is not None:
                e, t = self.cur.can(ctx)
            else:
                e, t = _can_fresh(body[i])
            emits |= e
            if not t:
                return frozenset(emits), False
        return frozenset(emits), True

    def kill(self, ctx):
        if self.cur is not None:
            self.cur.kill(ctx)


class _ForkF(_Frame):
    __slots__ = ("branches", "done")

    def __init__(self, stmt):
        self.branches = [_frame(b) for b in stmt.branches]
        self.done = [False] * len(self.branches)

    def activate(self, ctx):
        any_block = False
        for i in ctx.order(len(self.branches)):
            if self.done[i]:
                continue
            status = self.branches[i].activate(ctx)
            if status is TERM:
                self.done[i] = True
                ctx.env.version += 1
            elif status is BLOCK:
                any_block = True
        if all(self.done):
            return TERM
        return BLOCK if any_block else PAUSE

    def can(self, ctx):
        emits = set()
        all_term = True
        for frame, done in zip(self.branches, self.done):
            if done:
                continue
            e, t = frame.can(ctx)
            emits |= e
            all_term = all_term and t
        return frozenset(emits), all_term

    def kill(self, ctx):
        for frame, done in zip(self.branches, self.done):
            if not done:
                frame.kill(ctx)


class _IfF(_Frame):
    __slots__ = ("stmt", "decided", "chosen")

    def __init__(self, stmt):
        self.stmt = stmt
        self.decided = False
        self.chosen = None

    def activate(self, ctx):
        if not self.decided:
            v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
            if v is _BLOCKED:
                return BLOCK
            self.decided = True
            taken = self.stmt.then if v else self.stmt.orelse
            self.chosen = None if taken is None else _frame(taken)
            ctx.env.version += 1
        if self.chosen is None:
            return TERM
        return self.chosen.activate(ctx)

    def can(self, ctx):
        if not self.decided:
            e1, t1 = _can_fresh(self.stmt.then)
            if self.stmt.orelse is None:
                e2, t2 = frozenset(), True
            else:
                e2, t2 = _can_fresh(self.stmt.orelse)
            return e1 | e2, t1 or t2
        if self.chosen is None:
            return frozenset(), True
        return self.chosen.can(ctx)

    def kill(self, ctx):
        if self.chosen is not None:
            self.chosen.kill(ctx)


class _LoopF(_Frame):
    __slots__ = ("stmt", "body", "started_instant")

    def __init__(self, stmt):
        self.stmt = stmt
        self.body = _frame(stmt.body)
        self.started_instant = None

    def activate(self, ctx):
        if self.started_instant is None:
            self.started_instant = ctx.instant
        while True:
            status = self.body.activate(ctx)
            if status is not TERM:
                return status
            if self.started_instant == ctx.instant:
                raise InstantaneousLoop(
                    "loop body terminated in the instant it started"
                    + st._at(self.stmt.pos)
                )
            self.body = _frame(self.stmt.body)
            self.started_instant = ctx.instant
            ctx.env.version += 1

    def can(self, ctx):
        emits, _ = self.body.can(ctx)
        fresh, _ = _can_fresh(self.stmt.body)
        return emits | fresh, False

    def kill(self, ctx):
        self.body.kill(ctx)


class _EveryF(_Frame):
    __slots__ = ("stmt", "memo_instant", "memo_val", "body")

    def __init__(self, stmt):
        self.stmt = stmt
        self.memo_instant = -1
        self.memo_val = False
        self.body = None

    def activate(self, ctx):
        if self.memo_instant != ctx.instant:
            # strong preemption: the body may not run until the condition
            # for this instant is known
            v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
            if v is _BLOCKED:
                return BLOCK
            self.memo_instant = ctx.instant
            self.memo_val = v
            ctx.env.version += 1
            if v:
                if self.body is not None:
                    self.body.kill(ctx)
                self.body = _frame(self.stmt.body)
        if self.body is None:
            return PAUSE
        status = self.body.activate(ctx)
        if status is TERM:
            self.body = None
            ctx.env.version += 1
            return PAUSE
        return status

    def can(self, ctx):
        if self.memo_instant != ctx.instant:
            emits = set(_can_fresh(self.stmt.body)[0])
            if self.body is not None:
                emits |= self.body.can(ctx)[0]
            return frozenset(emits), False
        if self.body is None:
            return frozenset(), False
        return self.body.can(ctx)[0], False

    def kill(self, ctx):
        if self.body is not None:
            self.body.kill(ctx)


class _AbortF(_Frame):
    __slots__ = ("stmt", "memo_instant", "memo_val", "body", "finished")

    def __init__(self, stmt):
        self.stmt = stmt
        self.memo_instant = -1
        self.memo_val = False
        self.body = _frame(stmt.body)
        self.finished = False

    def activate(self, ctx):
        if self.finished:
            return TERM
        if self.memo_instant != ctx.instant:
            v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
            if v is _BLOCKED:
                return BLOCK
            self.memo_instant = ctx.instant
            self.memo_val = v
            ctx.env.version += 1
            if v:
                self.body.kill(ctx)
                self.finished = True
                return TERM
        status = self.body.activate(ctx)
        if status is TERM:
            self.finished = True
        return status

    def can(self, ctx):
        if self.finished:
            return frozenset(), True
        if self.memo_instant != ctx.instant:
            return self.body.can(ctx)[0], True
        return self.body.can(ctx)

    def kill(self, ctx):
        if not self.finished:
            self.body.kill(ctx)


class _SuspendF(_Frame):
    __slots__ = ("stmt", "memo_instant", "memo_val", "body")

    def __init__(self, stmt):
        self.stmt = stmt
        self.memo_instant = -1
        self.memo_val = False
        self.body = _frame(stmt.body)

    def activate(self, ctx):
        if self.memo_instant != ctx.instant:
            v = ctx.eval(self.stmt.cond, self.stmt.pos, want_bool=True)
            if v is _BLOCKED:
                return BLOCK
            self.memo_instant = ctx.instant
            self.memo_val = v
            ctx.env.version += 1
        if self.memo_val:
            return PAUSE  # frozen this instant
        return self.body.activate(ctx)

    def can(self, ctx):
        emits, term = self.body.can(ctx)
        if self.memo_instant != ctx.instant:
            return emits, term
        if self.memo_val:
            return frozenset(), False
        return emits, term

    def kill(self, ctx):
        self.body.kill(ctx)


class _LocalF(_Frame):
    __slots__ = ("stmt", "entered", "body")

    def __init__(self, stmt):
        self.stmt = stmt
        self.entered = False
        self.body = _frame(stmt.body)

    def activate(self, ctx):
        if not self.entered:
            ctx.env.reset_signal(self.stmt.decl.name)
            self.entered = True
        return self.body.activate(ctx)

    def can(self, ctx):
        return self.body.can(ctx)

    def kill(self, ctx):
        self.body.kill(ctx)


class _AsyncF(_Frame):
    __slots__ = ("stmt", "handle")

    def __init__(self, stmt):
        self.stmt = stmt
        self.handle = None

    def activate(self, ctx):
        if self.handle is None:
            self.handle = ctx.spawn(self.stmt.task)
            ctx.env.version += 1
        comp = self.stmt.task.completion_signal
        if comp is None:
            return PAUSE
        v = ctx.eval(ex.Now(comp), self.stmt.pos, want_bool=True)
        if v is _BLOCKED:
            return BLOCK
        if v:
            self.handle.completed = True
            ctx.machine._live_tasks.pop(self.handle.id, None)
            return TERM
        return PAUSE

    def can(self, ctx):
        comp = self.stmt.task.completion_signal
        if comp is None:
            return frozenset(), False
        return frozenset(), ctx.env.try_status(comp) is not False

    def kill(self, ctx):
        if self.handle is not None:
            ctx.kill_task(self.handle)


_FRAMES = {
    st.Nothing: _NothingF,
    st.Emit: _EmitF,
    st.Await: _AwaitF,
    st.AwaitCount: _AwaitCountF,
    st.Seq: _SeqF,
    st.Fork: _ForkF,
    st.If: _IfF,
    st.Loop: _LoopF,
    st.Every: _EveryF,
    st.Abort: _AbortF,
    st.Suspend: _SuspendF,
    st.Local: _LocalF,
    st.AsyncRun: _AsyncF,
}


def _frame(stmt):
    try:
        return _FRAMES[type(stmt)](stmt)
    except KeyError:
        raise TypeError(
            f"statement {type(stmt).__name__} cannot execute; did elaboration "
            f"run?"
        ) from None


def _can_fresh(stmt):
    """Over-approximate (emittable signals, may-terminate) of an unstarted
    statement within the current instant."""
    if isinstance(stmt, st.Nothing):
        return frozenset(), True
    if isinstance(stmt, st.Emit):
        return frozenset((stmt.signal,)), True
    if isinstance(stmt, st.Await):
        return frozenset(), True
    if isinstance(stmt, st.AwaitCount):
        return frozenset(), stmt.count <= 1
    if isinstance(stmt, st.Seq):
        emits = set()
        for child in stmt.body:
            e, t = _can_fresh(child)
            emits |= e
            if not t:
                return frozenset(emits), False
        return frozenset(emits), True
    if isinstance(stmt, st.Fork):
        emits = set()
        all_term = True
        for b in stmt.branches:
            e, t = _can_fresh(b)
            emits |= e
            all_term = all_term and t
        return frozenset(emits), all_term
    if isinstance(stmt, st.If):
        e1, t1 = _can_fresh(stmt.then)
        if stmt.orelse is None:
            e2, t2 = frozenset(), True
        else:
            e2, t2 = _can_fresh(stmt.orelse)
        return e1 | e2, t1 or t2
    if isinstance(stmt, st.Loop):
        return _can_fresh(stmt.body)[0], False
    if isinstance(stmt, st.Every):
        return _can_fresh(stmt.body)[0], False
    if isinstance(stmt, st.Abort):
        return _can_fresh(stmt.body)[0], True
    if isinstance(stmt, st.Suspend):
        return _can_fresh(stmt.body)
    if isinstance(stmt, st.Local):
        return _can_fresh(stmt.body)
    if isinstance(stmt, st.AsyncRun):
        return frozenset(), stmt.task.completion_signal is not None
    raise TypeError(f"cannot analyze {stmt!r}")


# --- the machine -------------------------------------------------------------

RUNNING = "running"
TERMINATED = "terminated"


class ReactiveMachine:
    """Deterministic instant-by-instant executor for one program.

    ``react`` calls must be externally serialized; the machine itself never
    spawns threads.  Asynchronous tasks influence it only through the host's
    ``inject`` callback, which should enqueue inputs for a *future* reaction.
    """

    def __init__(self, program, interface, *, inject=None, schedule_rng=None):
        self.program = program
        self.interface = tuple(interface)
        decls = list(self.interface)
        decls.extend(loc.decl for loc in st.local_decls(program))
        self._env = _Env(decls)
        self._root = _frame(program)
        self._status = RUNNING
        self._inject = inject
        self._live_tasks: Dict[int, TaskHandle] = {}
        self._rng = schedule_rng
        self._outputs = tuple(
            d.name for d in self.interface if d.direction == "out"
        )

    @property
    def status(self):
        return self._status

    @property
    def terminated(self):
        return self._status == TERMINATED

    @property
    def instant(self):
        """Index of the most recent reaction (-1 before the first)."""
        return self._env.instant

    @property
    def next_instant(self):
        return self._env.instant + 1

    @property
    def pending_tasks(self):
        return tuple(self._live_tasks.values())

    def react(self, inputs: Optional[Mapping[str, object]] = None):
        """Run one complete instant.  ``inputs`` maps input-signal names to a
        value, or None for a pure (valueless) presence."""
        if self.terminated:
            raise MachineTerminated(
                "react() called on a terminated machine"
            )
        self._env.begin_instant(dict(inputs or {}))
        ctx = _Ctx(self._env, self._rng, self)

        while True:
            ctx.begin_pass()
            v0 = self._env.version
            status = self._root.activate(ctx)
            if status is not BLOCK:
                break
            if self._env.version != v0:
                continue  # something advanced; retry before settling
            can_emit, _ = self._root.can(ctx)
            if self._env.settle_absent_except(can_emit) == 0:
                names = sorted(
                    self._env.signals[n].display for n in ctx.blocked
                )
                locations = []
                for n in ctx.blocked:
                    locations.extend(p for p in ctx.blocked[n] if p)
                raise CausalityError(
                    names, self._env.instant, sorted(set(locations))
                )

        if status is TERM:
            self._status = TERMINATED

        emitted = {}
        for name in self._outputs:
            sig = self._env.signals[name]
            if sig.present:
                emitted[name] = sig.value if sig.valued else None

        result = ReactionResult(
            instant=self._env.instant,
            emitted=emitted,
            terminated=self.terminated,
            spawned_tasks=tuple(ctx.spawned),
            killed_tasks=tuple(ctx.killed),
        )
        # start task drivers only after the instant is complete; they must
        # inject future reactions, never re-enter this one
        for handle in ctx.spawned:
            if handle.spec.on_start is not None:
                handle.spec.on_start(handle)
        return result

    def eval_after(self, expr):
        """Evaluate an expression against the last completed instant."""
        return ex.eval_expr(expr, _SettledView(self._env))

    def dispose(self):
        """Preempt everything; kill handlers of live tasks run exactly once."""
        ctx = _Ctx(self._env, self._rng, self)
        self._root.kill(ctx)
        self._status = TERMINATED
        return list(ctx.killed)


class _SettledView(ex.SignalReader):
    """Read-only view where every signal counts as settled (instant is over)."""

    def __init__(self, env):
        self._env = env

    def try_status(self, name):
        return self._env.signals[name].present

    def try_value(self, name):
        return self._env.try_value(name)


def machine_from_modules(modules, entry, **kwargs):
    program = st.elaborate(modules, entry)
    return ReactiveMachine(program, modules[entry].interface, **kwargs)


# --- host helpers -------------------------------------------------------------

class ReactionQueue:
    """Minimal serialized host: tasks inject here, the owner drains in order."""

    def __init__(self):
        self._pending = []

    def inject(self, inputs):
        self._pending.append(dict(inputs))

    def drain(self):
        out, self._pending = self._pending, []
        return out

    def __len__(self):
        return len(self._pending)


class ManualMetronome:
    """A pulse task driven by explicit ``tick()`` calls (tests, sim hosts).

    On start it injects pulse=0; each tick injects the next count.  Killing
    the task stops further injections, mirroring a cleared host timer.
    """

    def __init__(self, signal="pulse"):
        self.signal = signal
        self.count = 0
        self.alive = False
        self.kill_calls = 0
        self._handle = None

    def spec(self):
        return st.TaskSpec(
            name=f"metronome:{self.signal}",
            on_start=self._on_start,
            on_kill=self._on_kill,
        )

    def _on_start(self, handle):
        self._handle = handle
        self.alive = True
        handle.inject({self.signal: 0})

    def _on_kill(self, handle):
        self.alive = False
        self.kill_calls += 1

    def tick(self):
        if not self.alive:
            return False
        self.count += 1
        self._handle.inject({self.signal: self.count})
        return True
