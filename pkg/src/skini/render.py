"""Render a performance timeline to a CSV event log or a Standard MIDI File.

Both renderers are pure functions of the event list and meant to be
bit-exact: times are fixed to 3 decimals (also when converting to MIDI ticks,
so rendering from a parsed CSV matches rendering from the live event list
byte for byte).
"""

from __future__ import annotations

import struct
from typing import List

from .errors import UnsortedEvents
from .scheduler import END, START, PlaybackEvent, check_sorted
from .score import Score

CSV_HEADER = "time_seconds,instrument,pattern_id,kind,participant"

TICKS_PER_BEAT = 480


def render_csv(events) -> str:
    check_sorted(events)
    lines = [CSV_HEADER]
    for e in events:
        lines.append(
            f"{e.time:.3f},{e.instrument},{e.pattern_id},{e.kind},"
            f"{e.participant_id}"
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> List[PlaybackEvent]:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise UnsortedEvents("event log is missing the expected header")
    events = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise UnsortedEvents(f"line {i}: expected 5 fields")
        time_s, instrument, pattern_id, kind, participant = parts
        if kind not in (START, END):
            raise UnsortedEvents(f"line {i}: unknown event kind {kind!r}")
        events.append(
            PlaybackEvent(
                float(time_s), instrument, pattern_id, kind, participant
            )
        )
    return check_sorted(events)


# --- Standard MIDI File ------------------------------------------------------


def _vlq(value: int) -> bytes:
    if value < 0:
        raise ValueError("negative delta time")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack(">I", len(payload)) + payload


def _meta(kind: int, payload: bytes) -> bytes:
    return bytes((0xFF, kind)) + _vlq(len(payload)) + payload


def _track(messages) -> bytes:
    """messages: list of (tick, order, data) absolute-tick events."""
    messages = sorted(messages, key=lambda m: (m[0], m[1]))
    out = bytearray()
    clock = 0
    for tick, _, data in messages:
        out += _vlq(tick - clock)
        out += data
        clock = tick
    out += _vlq(0) + _meta(0x2F, b"")
    return _chunk(b"MTrk", bytes(out))


def _beats(time_s: float, tempo_bpm: float) -> float:
    # canonicalize to log precision so CSV round-trips render identically
    return float(f"{time_s:.3f}") * tempo_bpm / 60.0


def render_smf(events, score: Score) -> bytes:
    """Format-1 SMF: one conductor track plus one track per instrument.

    Pattern payload notes are offset by each start event's time; instruments
    map to channels in declaration order, wrapping past 16.
    """
    check_sorted(events)
    doc = score.doc
    tempo_us = round(60_000_000 / doc.tempo_bpm)

    conductor = [
        (0, 0, _meta(0x51, struct.pack(">I", tempo_us)[1:])),
        (0, 1, _meta(0x58, bytes((doc.beats_per_measure, 2, 24, 8)))),
    ]

    per_instrument = {name: [] for name in doc.instruments}
    for e in events:
        if e.kind != START:
            continue
        pattern = score.pattern_by_id.get(e.pattern_id)
        if pattern is None or not pattern.notes:
            continue
        channel = doc.instruments.index(e.instrument) % 16
        base = _beats(e.time, doc.tempo_bpm)
        track = per_instrument[e.instrument]
        for note in pattern.notes:
            on = int(round((base + note.onset) * TICKS_PER_BEAT))
            off = int(round((base + note.onset + note.length) * TICKS_PER_BEAT))
            if off <= on:
                off = on + 1
            track.append(
                (on, 1, bytes((0x90 | channel, note.pitch, note.velocity)))
            )
            track.append((off, 0, bytes((0x80 | channel, note.pitch, 0))))

    tracks = [_track(conductor)]
    for name in doc.instruments:
        label = [(0, 0, _meta(0x03, name.encode("ascii", "replace")))]
        tracks.append(_track(label + per_instrument[name]))

    header = _chunk(
        b"MThd", struct.pack(">HHH", 1, len(tracks), TICKS_PER_BEAT)
    )
    return header + b"".join(tracks)
