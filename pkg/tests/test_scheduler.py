"""Queue scheduling: quantized starts, delay estimates, serialization."""

from __future__ import annotations

from skini.scheduler import (
    END,
    START,
    PerformanceClock,
    Scheduler,
    check_sorted,
)
from skini.score import PatternDef
from skini.simulator import SplitMix64

from tick_oracle import TICK, oracle_delay


def pattern(pid, instrument, beats):
    return PatternDef(pid, instrument, beats)


def make_scheduler(bpm=120, quantize="beat", beats_per_measure=4,
                   instruments=("lead",), on_started=None):
    clock = PerformanceClock(bpm, beats_per_measure, quantize)
    sched = Scheduler(
        clock, instruments,
        duration_of=lambda p: p.duration_beats * 60.0 / bpm,
        on_started=on_started,
    )
    return clock, sched


class TestClock:
    def test_beat_arithmetic(self):
        clock = PerformanceClock(120, 4, "beat", now=1.3)
        assert clock.beat_seconds == 0.5
        assert clock.grid_seconds == 0.5
        assert clock.beat_index == 2
        assert clock.grid_ceil(1.3) == 1.5
        assert clock.grid_ceil(1.5) == 1.5

    def test_measure_grid(self):
        clock = PerformanceClock(120, 4, "measure")
        assert clock.grid_seconds == 2.0
        assert clock.grid_ceil(0.1) == 2.0
        assert clock.grid_ceil(0.0) == 0.0


class TestEnqueue:
    def test_idle_on_boundary_is_immediate(self):
        clock, sched = make_scheduler()
        position, delay = sched.enqueue(pattern("P", "lead", 2), "a", 0.0)
        assert position == 0
        assert delay == 0.0

    def test_mid_beat_admission_waits_for_next_boundary(self):
        # 0.3 beats past a boundary: wait the remaining 0.7 beats
        clock, sched = make_scheduler(bpm=120)
        clock.advance(0.15)  # 0.3 beats at 120 bpm
        position, delay = sched.enqueue(pattern("P", "lead", 2), "a", 0.15)
        assert position == 0
        expected = oracle_delay(0.5, None, [], 0.15)
        assert abs(delay - expected) <= TICK + 1e-9

    def test_one_queued_pattern_ahead(self):
        clock, sched = make_scheduler(bpm=120)
        sched.enqueue(pattern("P1", "lead", 4), "a", 0.0)
        position, delay = sched.enqueue(pattern("P2", "lead", 1), "b", 0.0)
        assert position == 1
        expected = oracle_delay(0.5, None, [(0.0, 2.0)], 0.0)
        assert abs(delay - expected) <= TICK + 1e-9
        assert delay == 2.0  # 4 beats at 120 bpm

    def test_measure_quantization_pads_to_full_measure(self):
        # a 3-beat pattern still blocks the next start for 4 beats
        clock, sched = make_scheduler(bpm=120, quantize="measure")
        sched.enqueue(pattern("P1", "lead", 3), "a", 0.0)
        _, delay = sched.enqueue(pattern("P2", "lead", 3), "b", 0.0)
        expected = oracle_delay(2.0, None, [(0.0, 1.5)], 0.0)
        assert abs(delay - expected) <= TICK + 1e-9
        assert delay == 2.0  # one full measure, not 1.5 s


class TestAdvance:
    def test_sequential_non_overlap(self):
        clock, sched = make_scheduler(bpm=120)
        sched.enqueue(pattern("P1", "lead", 2), "a", 0.0)
        sched.enqueue(pattern("P2", "lead", 2), "b", 0.0)
        events = sched.advance(10.0)
        times = [(e.kind, e.time) for e in events]
        assert times == [
            (START, 0.0), (END, 1.0), (START, 1.0), (END, 2.0),
        ]

    def test_parallel_instruments_start_together(self):
        clock, sched = make_scheduler(instruments=("flute", "oboe"))
        sched.enqueue(pattern("F", "flute", 2), "a", 0.2)
        sched.enqueue(pattern("O", "oboe", 2), "b", 0.2)
        events = sched.advance(5.0)
        starts = [e for e in events if e.kind == START]
        assert {e.instrument for e in starts} == {"flute", "oboe"}
        assert starts[0].time == starts[1].time == 0.5

    def test_advance_by_zero_is_a_noop(self):
        clock, sched = make_scheduler()
        assert sched.advance(0.0) == []

    def test_fifo_start_order(self):
        clock, sched = make_scheduler()
        for i in range(5):
            sched.enqueue(pattern(f"P{i}", "lead", 1), f"u{i}", 0.0)
        events = sched.advance(30.0)
        started = [e.pattern_id for e in events if e.kind == START]
        assert started == [f"P{i}" for i in range(5)]

    def test_started_callbacks_in_time_order(self):
        seen = []
        clock, sched = make_scheduler(
            instruments=("a", "b"),
            on_started=lambda entry, playing: seen.append(
                (playing.start, entry.pattern.id)
            ),
        )
        sched.enqueue(pattern("A1", "a", 1), "u", 0.0)
        sched.enqueue(pattern("A2", "a", 1), "u", 0.0)
        sched.enqueue(pattern("B1", "b", 4), "u", 0.0)
        sched.advance(10.0)
        assert seen == sorted(seen)
        assert [p for _, p in seen] == ["A1", "B1", "A2"]


class TestTimeline:
    def test_timeline_sorted_and_conserved(self):
        clock, sched = make_scheduler(bpm=140, instruments=("x", "y"))
        rng = SplitMix64(9)
        admitted = 0
        t = 0.0
        for _ in range(40):
            t += rng.uniform(0.0, 1.0)
            sched.advance(t)
            instrument = "x" if rng.random() < 0.5 else "y"
            beats = 1 + int(rng.random() * 3)
            sched.enqueue(pattern(f"P{admitted}", instrument, beats), "u", t)
            admitted += 1
        while not sched.drained():
            sched.advance(sched.next_event_time())
        timeline = sched.timeline()
        check_sorted(timeline)
        starts = [e for e in timeline if e.kind == START]
        ends = [e for e in timeline if e.kind == END]
        assert len(starts) == len(ends) == admitted

    def test_intervals_disjoint_per_instrument(self):
        clock, sched = make_scheduler(bpm=97, instruments=("x",))
        rng = SplitMix64(4)
        t = 0.0
        for i in range(25):
            t += rng.uniform(0.0, 0.8)
            sched.advance(t)
            sched.enqueue(pattern(f"P{i}", "x", 1 + i % 3), "u", t)
        while not sched.drained():
            sched.advance(sched.next_event_time())
        spans = []
        open_at = None
        for e in sched.timeline():
            if e.kind == START:
                assert open_at is None
                open_at = e.time
            else:
                spans.append((open_at, e.time))
                open_at = None
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2 + 1e-9


def random_history_case(rng):
    """A physically consistent queue state, produced by replaying a random
    admission history forward on the scheduler itself."""
    bpm = 90 + int(rng.random() * 110)
    quantize = "beat" if rng.random() < 0.7 else "measure"
    clock = PerformanceClock(bpm, 4, quantize)
    beat = 60.0 / bpm
    sched = Scheduler(
        clock, ("solo",), duration_of=lambda p: p.duration_beats * beat
    )
    entries = []
    t = 0.0
    for i in range(int(rng.random() * 5)):
        t += rng.uniform(0.0, 1.5)
        sched.advance(t)
        beats = 0.5 + rng.random() * 3.5
        sched.enqueue(pattern(f"E{i}", "solo", beats), "u", t)
        entries.append((t, beats * beat))
    now = t + rng.uniform(0.0, 1.0)
    sched.advance(now)
    return sched, clock, entries, now


class TestEstimateSoundness:
    def test_randomized_frozen_queues_match_tick_oracle(self):
        rng = SplitMix64(2024)
        for case in range(300):
            sched, clock, entries, now = random_history_case(rng)
            estimate = sched.estimate_delay("solo", now)
            expected = oracle_delay(clock.grid_seconds, None, entries, now)
            assert abs(estimate - expected) <= TICK + 1e-9, (
                case, clock.tempo_bpm, clock.quantize, now, entries
            )

    def test_estimate_matches_actual_start_for_frozen_queue(self):
        clock, sched = make_scheduler(bpm=132)
        starts = []
        sched._on_started = lambda entry, playing: starts.append(
            (entry.pattern.id, playing.start)
        )
        sched.enqueue(pattern("A", "lead", 3), "u", 0.0)
        sched.advance(0.77)
        estimate = sched.estimate_delay("lead", 0.77)
        sched.enqueue(pattern("B", "lead", 1), "u", 0.77)
        while not sched.drained():
            sched.advance(sched.next_event_time())
        actual = dict(starts)["B"] - 0.77
        assert abs(actual - estimate) <= TICK + 1e-9
