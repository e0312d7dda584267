"""Deterministic audience simulation.

Models a hall of barely interested people who glance at their phones every
few seconds and tap a random available pattern, unless they already have
three selections pending or the announced wait is longer than they would
tolerate.  Runs are a pure function of (score, config): the same seed gives
a byte-identical event log and statistics on every platform.

Randomness comes from SplitMix64 (Steele, Lea & Flood's 64-bit mixer), small
enough to pin here forever: each participant derives an independent substream
from the root seed, so changing the audience size never reshuffles the
behaviour of existing participants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .runtime import Admitted, Participant, Performance
from .score import Score

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """The SplitMix64 generator; stable sequence for a given seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def pick(self, seq):
        return seq[int(self.random() * len(seq))]


def participant_stream(root_seed: int, index: int) -> SplitMix64:
    return SplitMix64(_mix((root_seed + (index + 1) * _GOLDEN) & _MASK))


@dataclass(frozen=True)
class SimulatorConfig:
    audience_size: int = 30
    min_response_s: float = 2.0
    max_response_s: float = 10.0
    max_wait_s: float = 30.0
    seed: int = 0
    run_length_s: float = 300.0

    def __post_init__(self):
        if self.audience_size < 0:
            raise ValueError("audience_size must be >= 0")
        if not (0 <= self.min_response_s <= self.max_response_s):
            raise ValueError("need 0 <= min_response_s <= max_response_s")
        if self.max_wait_s <= 0:
            raise ValueError("max_wait_s must be positive")


@dataclass
class SimParticipant:
    participant: Participant
    rng: SplitMix64
    next_action_at: float


@dataclass(frozen=True)
class Attempt:
    time: float
    participant_id: str
    pattern_id: Optional[str]
    outcome: str  # 'admitted' | rejection reason | 'skip:...'
    delay_estimate: Optional[float] = None


SKIP_EMPTY = "skip:nothing-selectable"
SKIP_CAP = "skip:pending-cap"
SKIP_WAIT = "skip:wait-too-long"


class AudienceSim:
    """Drives a Performance with simulated selections."""

    def __init__(self, perf: Performance, config: SimulatorConfig,
                 id_prefix: str = "sim"):
        self.perf = perf
        self.config = config
        self.participants: List[SimParticipant] = []
        for i in range(config.audience_size):
            rng = participant_stream(config.seed, i)
            part = perf.register_participant(f"{id_prefix}{i + 1}")
            first = rng.uniform(config.min_response_s, config.max_response_s)
            self.participants.append(SimParticipant(part, rng, first))
        self.attempts: List[Attempt] = []

    def next_action_time(self) -> Optional[float]:
        if not self.participants:
            return None
        return min(p.next_action_at for p in self.participants)

    def _reschedule(self, sim: SimParticipant, now: float):
        gap = sim.rng.uniform(
            self.config.min_response_s, self.config.max_response_s
        )
        sim.next_action_at = now + max(gap, 1e-6)  # zero gaps would livelock

    def step(self, snapshot, now: float) -> List[Attempt]:
        """Let every participant whose timer has fired act on ``snapshot``.

        All due participants see the same snapshot (their phones are equally
        stale); races with each other or the score surface as rejections,
        which is legal and counted.
        """
        due = [p for p in self.participants if p.next_action_at <= now]
        made = []
        flat: List[Tuple[str, str]] = [
            (view.group, pid)
            for view in snapshot
            for pid in view.patterns
        ]
        for sim in due:
            pid = sim.participant.id
            if sim.participant.pending >= 3:
                made.append(Attempt(now, pid, None, SKIP_CAP))
            elif not flat:
                made.append(Attempt(now, pid, None, SKIP_EMPTY))
            else:
                _, pattern_id = sim.rng.pick(flat)
                delay = self.perf.estimate_delay(pattern_id)
                if delay > self.config.max_wait_s:
                    made.append(
                        Attempt(now, pid, pattern_id, SKIP_WAIT, delay)
                    )
                else:
                    outcome = self.perf.select(pid, pattern_id)
                    if isinstance(outcome, Admitted):
                        made.append(
                            Attempt(
                                now, pid, pattern_id, "admitted",
                                outcome.delay_estimate,
                            )
                        )
                    else:
                        made.append(
                            Attempt(now, pid, pattern_id, outcome.reason)
                        )
            self._reschedule(sim, now)
        self.attempts.extend(made)
        return made


@dataclass
class SimulationReport:
    score: Score
    config: SimulatorConfig
    events: list
    attempts: List[Attempt]
    admission_log: list
    activation_log: list
    terminated: bool
    end_time: float
    instants: int

    def stats(self) -> Dict:
        admitted = [a for a in self.attempts if a.outcome == "admitted"]
        rejections: Dict[str, int] = {}
        skips: Dict[str, int] = {}
        for a in self.attempts:
            if a.outcome == "admitted":
                continue
            bucket = skips if a.outcome.startswith("skip:") else rejections
            bucket[a.outcome] = bucket.get(a.outcome, 0) + 1
        per_group: Dict[str, int] = {}
        for _, group, _, _ in self.admission_log:
            per_group[group] = per_group.get(group, 0) + 1
        delays = [a.delay_estimate for a in admitted]
        mean_delay = round(sum(delays) / len(delays), 6) if delays else 0.0
        return {
            "admissions": len(admitted),
            "attempts": len(self.attempts),
            "rejections": dict(sorted(rejections.items())),
            "skips": dict(sorted(skips.items())),
            "perGroup": dict(sorted(per_group.items())),
            "meanDelaySeconds": mean_delay,
            "terminated": self.terminated,
            "endTimeSeconds": round(self.end_time, 6),
            "instants": self.instants,
            "seed": self.config.seed,
            "audienceSize": self.config.audience_size,
        }

    def stats_json(self) -> str:
        return json.dumps(self.stats(), sort_keys=True, indent=2) + "\n"


def run(score: Score, config: SimulatorConfig) -> SimulationReport:
    """Drive the whole loop until the score terminates or time runs out.

    Interaction stops at ``run_length_s`` (or score termination); already
    admitted selections still play out so every admission gets its start and
    end event.
    """
    perf = Performance(score)
    perf.startup()
    sim = AudienceSim(perf, config)

    horizon = config.run_length_s
    while not perf.finished:
        t_act = sim.next_action_time()
        t_sched = perf.next_event_time()
        candidates = [t for t in (t_act, t_sched) if t is not None]
        if not candidates:
            break
        t = min(candidates)
        if t > horizon:
            break
        perf.advance_to(t)
        if t_act is not None and t_act <= t:
            sim.step(perf.snapshot(), t)

    # drain: no more admissions, but everything admitted must play
    while not perf.drained():
        nxt = perf.next_event_time()
        if nxt is None:
            break
        perf.advance_to(nxt)

    return SimulationReport(
        score=score,
        config=config,
        events=list(perf.events),
        attempts=sim.attempts,
        admission_log=list(perf.admission_log),
        activation_log=list(perf.activation_log),
        terminated=perf.finished,
        end_time=perf.clock.now,
        instants=perf.machine.instant + 1,
    )
