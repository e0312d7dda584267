"""Event log and MIDI rendering: bit-exact outputs."""

from __future__ import annotations

import struct
from pathlib import Path

import pytest

from skini.errors import UnsortedEvents
from skini.render import (
    CSV_HEADER,
    TICKS_PER_BEAT,
    parse_csv,
    render_csv,
    render_smf,
)
from skini.scheduler import PlaybackEvent
from skini.simulator import SimulatorConfig, run

GOLDEN = Path(__file__).resolve().parent / "golden"

JAZZ_CONFIG = SimulatorConfig(
    audience_size=10, min_response_s=0.5, max_response_s=2.0,
    max_wait_s=30.0, seed=7, run_length_s=60.0,
)


class TestCsv:
    def test_empty_event_list_is_header_only(self):
        assert render_csv([]) == CSV_HEADER + "\n"

    def test_single_beat_pattern_at_120bpm(self):
        events = [
            PlaybackEvent(0.0, "lead", "P", "start", "u"),
            PlaybackEvent(0.5, "lead", "P", "end", "u"),
        ]
        text = render_csv(events)
        assert text.splitlines()[1:] == [
            "0.000,lead,P,start,u",
            "0.500,lead,P,end,u",
        ]

    def test_unsorted_events_rejected(self):
        events = [
            PlaybackEvent(1.0, "lead", "P", "start", "u"),
            PlaybackEvent(0.5, "lead", "P", "end", "u"),
        ]
        with pytest.raises(UnsortedEvents):
            render_csv(events)

    def test_parse_round_trip(self):
        events = [
            PlaybackEvent(0.0, "lead", "P", "start", "u"),
            PlaybackEvent(0.5, "lead", "P", "end", "u"),
        ]
        parsed = parse_csv(render_csv(events))
        assert [
            (e.time, e.instrument, e.pattern_id, e.kind, e.participant_id)
            for e in parsed
        ] == [
            (0.0, "lead", "P", "start", "u"),
            (0.5, "lead", "P", "end", "u"),
        ]

    def test_golden_jazz_simulation(self, jazz_score):
        report = run(jazz_score, JAZZ_CONFIG)
        expected = (GOLDEN / "jazz_seed7.csv").read_text()
        assert render_csv(report.events) == expected

    def test_golden_jazz_stats(self, jazz_score):
        report = run(jazz_score, JAZZ_CONFIG)
        expected = (GOLDEN / "jazz_seed7.stats.json").read_text()
        assert report.stats_json() == expected


class TestSmf:
    def test_header_and_track_count(self, jazz_score):
        report = run(jazz_score, JAZZ_CONFIG)
        data = render_smf(report.events, jazz_score)
        assert data[:4] == b"MThd"
        fmt, ntrks, division = struct.unpack(">HHH", data[8:14])
        assert fmt == 1
        assert ntrks == 1 + 7  # conductor + one per instrument
        assert division == TICKS_PER_BEAT
        assert data.count(b"MTrk") == ntrks

    def test_tempo_meta_from_score(self, jazz_score):
        report = run(jazz_score, JAZZ_CONFIG)
        data = render_smf(report.events, jazz_score)
        tempo_us = round(60_000_000 / 140)
        needle = bytes((0xFF, 0x51, 0x03)) + struct.pack(">I", tempo_us)[1:]
        assert needle in data

    def test_note_events_offset_by_start_time(self, jazz_score):
        # one pattern starting at beat 2: its first payload note lands there
        pattern = jazz_score.doc.patterns[0]
        beat = 60.0 / jazz_score.doc.tempo_bpm
        events = [
            PlaybackEvent(2 * beat, pattern.instrument, pattern.id, "start", "u"),
            PlaybackEvent(
                2 * beat + pattern.duration_beats * beat,
                pattern.instrument, pattern.id, "end", "u",
            ),
        ]
        data = render_smf(events, jazz_score)
        channel = 0  # piano is instrument 0
        first = pattern.notes[0]
        on = bytes((0x90 | channel, first.pitch, first.velocity))
        assert on in data

    def test_render_from_csv_is_byte_identical(self, jazz_score):
        report = run(jazz_score, JAZZ_CONFIG)
        direct = render_smf(report.events, jazz_score)
        reparsed = parse_csv(render_csv(report.events))
        assert render_smf(reparsed, jazz_score) == direct

    def test_media_patterns_render_silently(self, jazz_score):
        from skini.score import PatternDef

        ghost = PatternDef("Ext", "piano", 2.0, notes=(), media="take3.wav")
        jazz_score.pattern_by_id["Ext"] = ghost
        try:
            events = [
                PlaybackEvent(0.0, "piano", "Ext", "start", "u"),
                PlaybackEvent(1.0, "piano", "Ext", "end", "u"),
            ]
            data = render_smf(events, jazz_score)
            assert data.count(b"MTrk") == 8  # tracks exist, just no notes
        finally:
            del jazz_score.pattern_by_id["Ext"]


class TestReportFigure:
    def test_timeline_figure_written(self, jazz_score, tmp_path):
        from skini.report import render_timeline

        report = run(jazz_score, JAZZ_CONFIG)
        out = tmp_path / "timeline.png"
        render_timeline(report.events, jazz_score, out)
        assert out.exists() and out.stat().st_size > 1000
