"""Interaction runtime: the bridge between the reactive score and the audience.

Keeps the availability matrix in sync with the machine's output emissions,
admits or rejects selections (group active, tank not exhausted, at most three
pending per participant), feeds admitted selections to the machine one per
instant in admission order, and hands them to the playback scheduler.

All mutations are expected to arrive on one serialized command stream; the
snapshots handed out are immutable and tagged with a revision number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import ScoreBugError, UnknownOutputSignal, UnknownPattern
from .scheduler import PerformanceClock, Scheduler
from .score import Score

PENDING_CAP = 3

GROUP_INACTIVE = "GroupInactive"
TANK_EXHAUSTED = "TankExhausted"
PENDING_CAP_REACHED = "PendingCapReached"


@dataclass
class Participant:
    id: str
    pending: int = 0


@dataclass(frozen=True)
class Admitted:
    pattern_id: str
    input_signal: str
    queue_position: int
    delay_estimate: float
    instant: int


@dataclass(frozen=True)
class Rejected:
    pattern_id: str
    reason: str


@dataclass(frozen=True)
class SelectionEvent:
    participant_id: str
    pattern_id: str
    group: str
    submitted_at: float


@dataclass(frozen=True)
class Played:
    pattern_id: str
    participant_id: str
    time: float


@dataclass
class GroupState:
    group: str
    kind: str
    pattern_ids: Tuple[str, ...]
    active: bool = False
    consumed: set = field(default_factory=set)
    reserved: set = field(default_factory=set)  # admitted, emission in flight

    def selectable(self):
        if self.kind != "tank":
            return self.pattern_ids
        gone = self.consumed | self.reserved
        return tuple(p for p in self.pattern_ids if p not in gone)


@dataclass(frozen=True)
class GroupView:
    group: str
    kind: str
    patterns: Tuple[str, ...]
    revision: int


@dataclass(frozen=True)
class MatrixDelta:
    revision: int
    activated: Tuple[str, ...] = ()
    deactivated: Tuple[str, ...] = ()
    consumed: Tuple[Tuple[str, str], ...] = ()  # (group, pattern)

    def __bool__(self):
        return bool(self.activated or self.deactivated or self.consumed)


class AvailabilityMatrix:
    """Which groups are open and which tank patterns remain selectable."""

    def __init__(self, score: Score):
        self._order = [g.name for g in score.doc.groups]
        self.groups: Dict[str, GroupState] = {
            g.name: GroupState(g.name, g.kind, g.pattern_ids)
            for g in score.doc.groups
        }
        self._outputs = score.output_map()
        self.revision = 0

    def group_state(self, name) -> GroupState:
        return self.groups[name]

    def reserve(self, group: str, pattern_id: str):
        state = self.groups[group]
        if pattern_id not in state.reserved:
            state.reserved.add(pattern_id)
            self.revision += 1

    def apply_outputs(self, emitted: Dict[str, object]) -> MatrixDelta:
        """Fold one reaction's output emissions into the matrix."""
        activated, deactivated, consumed = [], [], []
        for name in emitted:
            target = self._outputs.get(name)
            if target is None:
                raise UnknownOutputSignal(
                    f"score emitted {name!r} which maps to no group or tank "
                    f"pattern"
                )
            value = emitted[name]
            kind, ref = target
            if kind == "group":
                if not isinstance(value, bool):
                    raise ScoreBugError(
                        f"{name!r} must be emitted with true or false, got "
                        f"{value!r}"
                    )
                state = self.groups[ref]
                if state.active != value:
                    state.active = value
                    (activated if value else deactivated).append(ref)
            else:
                group, pattern = ref
                if value is not False:
                    raise ScoreBugError(
                        f"tank pattern signal {name!r} must be emitted with "
                        f"false, got {value!r}"
                    )
                state = self.groups[group]
                if pattern not in state.consumed:
                    state.consumed.add(pattern)
                    state.reserved.discard(pattern)
                    consumed.append((group, pattern))
        delta = MatrixDelta(
            self.revision + 1 if (activated or deactivated or consumed) else self.revision,
            tuple(activated), tuple(deactivated), tuple(consumed),
        )
        self.revision = delta.revision
        return delta

    def snapshot(self) -> Tuple[GroupView, ...]:
        """Active groups in declaration order; tanks minus consumed patterns."""
        views = []
        for name in self._order:
            state = self.groups[name]
            if not state.active:
                continue
            views.append(
                GroupView(name, state.kind, state.selectable(), self.revision)
            )
        return tuple(views)


class Performance:
    """One running piece: machine, matrix, queues, and clock, in lockstep."""

    def __init__(self, score: Score, schedule_rng=None):
        self.score = score
        self.machine = score.build_machine(schedule_rng=schedule_rng)
        self.matrix = AvailabilityMatrix(score)
        self.clock = PerformanceClock(
            tempo_bpm=score.doc.tempo_bpm,
            beats_per_measure=score.doc.beats_per_measure,
            quantize=score.doc.quantize,
        )
        self.scheduler = Scheduler(
            self.clock,
            score.doc.instruments,
            duration_of=score.pattern_seconds,
            on_started=self._on_started,
        )
        self.participants: Dict[str, Participant] = {}
        self.selections: List[SelectionEvent] = []
        self.notifications: List[Played] = []
        self.deltas: List[MatrixDelta] = []
        self.finished = False
        # (instant, action, group, pattern) for tests, stats, and the wire
        self.activation_log: List[Tuple[int, str, str, Optional[str]]] = []
        self.admission_log: List[Tuple[int, str, str, str]] = []

    # --- reactions ------------------------------------------------------------
    def startup(self):
        """Run the initial reaction so opening activations take effect."""
        return self._react(None)

    def _react(self, inputs):
        result = self.machine.react(inputs)
        delta = self.matrix.apply_outputs(result.emitted)
        if delta:
            self.deltas.append(delta)
            for g in delta.activated:
                self.activation_log.append((result.instant, "activate", g, None))
            for g in delta.deactivated:
                self.activation_log.append((result.instant, "deactivate", g, None))
            for g, p in delta.consumed:
                self.activation_log.append((result.instant, "consume", g, p))
        if result.terminated:
            self.finished = True
        return delta

    # --- participants and selections -------------------------------------------
    def register_participant(self, participant_id: Optional[str] = None) -> Participant:
        if participant_id is None:
            participant_id = f"p{len(self.participants) + 1}"
        part = self.participants.get(participant_id)
        if part is None:
            part = Participant(participant_id)
            self.participants[participant_id] = part
        return part

    def select(self, participant_id: str, pattern_id: str):
        """Admission check and, on success, queueing plus the paired reaction."""
        pattern = self.score.pattern_by_id.get(pattern_id)
        if pattern is None:
            raise UnknownPattern(f"no pattern named {pattern_id!r}")
        participant = self.register_participant(participant_id)
        group_name = self.score.group_of_pattern[pattern_id]
        state = self.matrix.group_state(group_name)

        # a consumed tank pattern stays TankExhausted even after the score
        # deactivates the emptied tank: it is the more precise refusal
        if state.kind == "tank" and (
            pattern_id in state.consumed or pattern_id in state.reserved
        ):
            return Rejected(pattern_id, TANK_EXHAUSTED)
        if not state.active or self.finished:
            return Rejected(pattern_id, GROUP_INACTIVE)
        if participant.pending >= PENDING_CAP:
            return Rejected(pattern_id, PENDING_CAP_REACHED)

        now = self.clock.now
        instant = self.machine.next_instant
        position, delay = self.scheduler.enqueue(
            pattern, participant_id, now, instant_hint=instant
        )
        participant.pending += 1
        if state.kind == "tank":
            self.matrix.reserve(group_name, pattern_id)
        self.selections.append(
            SelectionEvent(participant_id, pattern_id, group_name, now)
        )
        self.admission_log.append(
            (instant, group_name, pattern_id, participant_id)
        )
        input_signal = self.score.input_signal_for(pattern_id)
        self._react({input_signal: pattern_id})
        return Admitted(pattern_id, input_signal, position, delay, instant)

    def estimate_delay(self, pattern_id: str) -> float:
        pattern = self.score.pattern_by_id.get(pattern_id)
        if pattern is None:
            raise UnknownPattern(f"no pattern named {pattern_id!r}")
        return self.scheduler.estimate_delay(pattern.instrument)

    # --- playback --------------------------------------------------------------
    def _on_started(self, entry, playing):
        participant = self.participants.get(entry.participant_id)
        if participant is not None and participant.pending > 0:
            participant.pending -= 1
        self.notifications.append(
            Played(entry.pattern.id, entry.participant_id, playing.start)
        )

    def advance_to(self, to: float):
        return self.scheduler.advance(to)

    def next_event_time(self):
        return self.scheduler.next_event_time()

    def drained(self) -> bool:
        return self.scheduler.drained()

    def snapshot(self):
        return self.matrix.snapshot()

    def pop_notifications(self) -> List[Played]:
        out, self.notifications = self.notifications, []
        return out

    def pop_deltas(self) -> List[MatrixDelta]:
        out, self.deltas = self.deltas, []
        return out

    @property
    def events(self):
        return self.scheduler.timeline()
