"""Per-instrument playback scheduling.

Admitted selections queue per instrument; an instrument plays one pattern at
a time, and every start snaps to the quantization grid (beat or measure).  A
pattern admitted mid-grid starts at the next boundary, never the one just
passed, which keeps delay feedback causal.  The produced timeline is a flat
list of start/end events sorted by (time, instrument, end-before-start).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, List, Optional, Tuple

from .errors import UnsortedEvents
from .score import PatternDef

_GRID_EPS = 1e-9

START = "start"
END = "end"
_KIND_RANK = {END: 0, START: 1}


@dataclass
class PerformanceClock:
    tempo_bpm: float
    beats_per_measure: int = 4
    quantize: str = "beat"
    now: float = 0.0

    @property
    def beat_seconds(self) -> float:
        return 60.0 / self.tempo_bpm

    @property
    def grid_seconds(self) -> float:
        if self.quantize == "measure":
            return self.beats_per_measure * self.beat_seconds
        return self.beat_seconds

    @property
    def beat_index(self) -> int:
        return int(math.floor(self.now * self.tempo_bpm / 60.0 + _GRID_EPS))

    def grid_ceil(self, t: float) -> float:
        """Smallest grid boundary at or after ``t``."""
        g = self.grid_seconds
        k = math.ceil(t / g - _GRID_EPS)
        return max(k, 0) * g

    def advance(self, to: float):
        if to < self.now - _GRID_EPS:
            raise ValueError(f"clock cannot run backwards ({to} < {self.now})")
        self.now = max(self.now, to)


@dataclass
class QueueEntry:
    pattern: PatternDef
    participant_id: str
    admitted_at: float
    instant_hint: Optional[int] = None


@dataclass
class Playing:
    entry: QueueEntry
    start: float
    end: float


@dataclass
class InstrumentQueue:
    instrument: str
    entries: Deque[QueueEntry] = field(default_factory=deque)
    playing: Optional[Playing] = None
    idle_since: float = 0.0


@dataclass(frozen=True)
class PlaybackEvent:
    time: float
    instrument: str
    pattern_id: str
    kind: str  # 'start' | 'end'
    participant_id: str
    instant_hint: Optional[int] = None

    def sort_key(self):
        # rendered precision: times that print identically must tie, so the
        # rounded CSV stays sorted under the same ordering
        return (round(self.time, 3), self.instrument, _KIND_RANK[self.kind])


class Scheduler:
    """Owns one queue per instrument and materializes the event timeline."""

    def __init__(
        self,
        clock: PerformanceClock,
        instruments,
        duration_of: Callable[[PatternDef], float],
        on_started: Optional[Callable[[QueueEntry, Playing], None]] = None,
    ):
        self.clock = clock
        self.queues: Dict[str, InstrumentQueue] = {
            name: InstrumentQueue(name) for name in instruments
        }
        self._duration_of = duration_of
        self._on_started = on_started
        self.events: List[PlaybackEvent] = []

    # --- estimates -----------------------------------------------------------
    def estimate_delay(self, instrument: str, now: Optional[float] = None) -> float:
        """Seconds until a selection admitted now on ``instrument`` would start.

        Remaining play time of the current pattern, plus queued durations,
        plus the grid alignment pad before each start.
        """
        q = self.queues[instrument]
        if now is None:
            now = self.clock.now
        t = now
        if q.playing is not None and q.playing.end > t:
            t = q.playing.end
        for entry in q.entries:
            s = self.clock.grid_ceil(max(t, entry.admitted_at))
            t = s + self._duration_of(entry.pattern)
        start = self.clock.grid_ceil(max(t, now))
        return start - now

    def enqueue(
        self,
        pattern: PatternDef,
        participant_id: str,
        now: Optional[float] = None,
        instant_hint: Optional[int] = None,
    ) -> Tuple[int, float]:
        """Append an admitted selection; returns (position, delay estimate)."""
        if now is None:
            now = self.clock.now
        q = self.queues[pattern.instrument]
        position = len(q.entries) + (1 if q.playing is not None else 0)
        delay = self.estimate_delay(pattern.instrument, now)
        q.entries.append(
            QueueEntry(pattern, participant_id, now, instant_hint)
        )
        return position, delay

    # --- time ----------------------------------------------------------------
    def next_event_time(self) -> Optional[float]:
        """Earliest upcoming start or end across all instruments."""
        best = None
        for q in self.queues.values():
            if q.playing is not None:
                t = q.playing.end
            elif q.entries:
                head = q.entries[0]
                t = self.clock.grid_ceil(
                    max(q.idle_since, head.admitted_at)
                )
            else:
                continue
            if best is None or t < best:
                best = t
        return best

    def advance(self, to: float) -> List[PlaybackEvent]:
        """Play everything due up to and including ``to``; returns new events
        in chronological order.  Start notifications fire in the same order."""
        if to < self.clock.now - _GRID_EPS:
            raise ValueError("cannot advance into the past")
        fresh: List[PlaybackEvent] = []
        started: List[Tuple[QueueEntry, Playing]] = []
        for name in self.queues:  # declaration order, stable
            q = self.queues[name]
            while True:
                if q.playing is not None:
                    if q.playing.end > to:
                        break
                    play = q.playing
                    fresh.append(
                        PlaybackEvent(
                            play.end, name, play.entry.pattern.id, END,
                            play.entry.participant_id,
                            play.entry.instant_hint,
                        )
                    )
                    q.idle_since = play.end
                    q.playing = None
                    continue
                if not q.entries:
                    break
                head = q.entries[0]
                s = self.clock.grid_ceil(max(q.idle_since, head.admitted_at))
                if s > to:
                    break
                q.entries.popleft()
                play = Playing(head, s, s + self._duration_of(head.pattern))
                q.playing = play
                fresh.append(
                    PlaybackEvent(
                        s, name, head.pattern.id, START,
                        head.participant_id, head.instant_hint,
                    )
                )
                started.append((head, play))
        fresh.sort(key=PlaybackEvent.sort_key)
        self.events.extend(fresh)
        self.clock.advance(to)
        if self._on_started is not None:
            for entry, play in sorted(
                started, key=lambda pair: (pair[1].start, pair[0].pattern.instrument)
            ):
                self._on_started(entry, play)
        return fresh

    def drained(self) -> bool:
        return all(
            q.playing is None and not q.entries for q in self.queues.values()
        )

    def timeline(self) -> List[PlaybackEvent]:
        """All events so far in canonical order.

        ``events`` is append-ordered by processing batch; two batches can
        interleave at equal times, so the canonical timeline re-sorts by
        (time, instrument, end-before-start).
        """
        return sorted(self.events, key=PlaybackEvent.sort_key)


def check_sorted(events):
    prev = None
    for e in events:
        key = e.sort_key()
        if prev is not None and key < prev:
            raise UnsortedEvents(
                f"event at {e.time:.3f} on {e.instrument} out of order"
            )
        prev = key
    return events
