"""Brute-force playback oracle used to pin scheduler expectations.

Deliberately naive and independent of the scheduler implementation: time
advances in 1 ms ticks; at each tick, if the instrument is free and a grid
boundary at or after the head entry's constraints has been crossed, the head
starts at that boundary.  Grid boundaries are found by linear enumeration,
not ceiling arithmetic.
"""

from __future__ import annotations

TICK = 0.001
_EPS = 1e-9


def oracle_starts(grid_s, playing_end, entries, horizon=600.0):
    """Start time of every queued entry, in FIFO order.

    ``entries`` is the FIFO of (admitted_at, duration_s); ``playing_end`` is
    when the currently sounding pattern finishes (None if idle).
    """
    fifo = list(entries)
    idle_at = playing_end if playing_end is not None else 0.0
    starts = []
    k = 0  # next grid boundary index to inspect
    tick = 0
    while fifo:
        tick += 1
        t = tick * TICK
        if t > horizon:
            raise RuntimeError("oracle exceeded its horizon")
        if t + _EPS < idle_at:
            continue
        admitted_at, duration = fifo[0]
        lower = max(idle_at, admitted_at)
        while k * grid_s < lower - _EPS:
            k += 1
        boundary = k * grid_s
        if boundary <= t + _EPS:
            starts.append(boundary)
            fifo.pop(0)
            idle_at = boundary + duration
    return starts


def oracle_delay(grid_s, playing_end, entries, admit_time):
    """Delay until a probe entry admitted at ``admit_time`` (appended last)
    would start."""
    fifo = list(entries) + [(admit_time, 0.0)]
    starts = oracle_starts(grid_s, playing_end, fifo)
    return starts[-1] - admit_time
