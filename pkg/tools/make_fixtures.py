#!/usr/bin/env python3
"""Regenerate the bundled fixture scores under src/skini/fixtures/.

Deterministic by construction; run after changing anything here:

    python tools/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "skini" / "fixtures"

PENTATONIC = [0, 2, 4, 7, 9]

BASE_PITCH = {
    "violin": 76, "viola": 64, "cello": 52, "contrabass": 40,
    "flute": 84, "oboe": 72, "clarinet": 67, "bassoon": 48,
    "trumpet": 72, "horn": 60, "trombone": 52, "tuba": 40,
    "percussion": 45, "piano": 60, "harp": 64, "celesta": 84,
    "bass": 40, "drums": 42, "saxophone": 65, "guitar": 55,
    "lead": 72,
}

OPUS1_INSTRUMENTS = [
    "violin", "viola", "cello", "contrabass", "flute", "oboe", "clarinet",
    "bassoon", "trumpet", "horn", "trombone", "tuba", "percussion", "piano",
    "harp", "celesta",
]


def make_notes(index: int, duration: float, instrument: str):
    base = BASE_PITCH.get(instrument, 60)
    steps = max(1, int(duration * 2))
    notes = []
    for k in range(steps):
        degree = PENTATONIC[(index * 3 + k) % 5]
        octave = ((index + k) // 5) % 2
        pitch = min(120, base + degree + 12 * octave)
        notes.append({
            "pitch": pitch,
            "onset": k * 0.5,
            "length": 0.5,
            "velocity": 64 + ((index * 7 + k * 5) % 48),
        })
    return notes


def pattern(pid: str, instrument: str, duration: float, index: int):
    return {
        "id": pid,
        "instrument": instrument,
        "durationBeats": duration,
        "notes": make_notes(index, duration, instrument),
    }


class Builder:
    def __init__(self):
        self.patterns = []
        self.groups = []
        self._index = 0

    def group(self, name: str, kind: str, instrument: str, count: int,
              duration: float = 2.0, prefix: str | None = None):
        prefix = prefix or name
        ids = []
        for i in range(count):
            self._index += 1
            pid = f"{prefix}{i + 1}"
            ids.append(pid)
            self.patterns.append(pattern(pid, instrument, duration, self._index))
        self.groups.append({"name": name, "kind": kind, "patterns": ids})
        return name


def iface(groups) -> str:
    decls = []
    for g in groups:
        decls.append(f"in {g}In")
        decls.append(f"out {g}Out")
    return ", ".join(decls)


def activate_all(names):
    return "\n".join(f"  emit {n}Out(true);" for n in names)


def deactivate_all(names):
    return "\n".join(f"  emit {n}Out(false);" for n in names)


# --- chromatic session (shared by chromatic.json and opus1.json) -------------

def chromatic_groups(b: Builder):
    names = [
        b.group("ChromPercuTank", "tank", "percussion", 4, 1.0, "ChromPercu"),
        b.group("ChromBass", "repeat", "contrabass", 6, 2.0),
        b.group("ChromViolins", "repeat", "violin", 6, 1.0, "ChromViolin"),
        b.group("ChromFlutes", "repeat", "flute", 4, 1.0, "ChromFlute"),
        b.group("ChromBassons", "repeat", "bassoon", 4, 2.0, "ChromBasson"),
        b.group("ChromViolas", "repeat", "viola", 4, 2.0, "ChromViola"),
        b.group("ChromCellos", "repeat", "cello", 4, 2.0, "ChromCello"),
    ]
    return names


def chromatic_session_body(extra: list[str]) -> str:
    # The inner bass count is 3, not 2: it starts inside the instant of the
    # third admitted bass selection (which it immediately counts, awaits being
    # immediate), so the flutes/bassoons still deactivate with the 5th one.
    lines = []
    if extra:
        lines.append(activate_all(extra))
    lines.append("""\
  emit ChromPercuTankOut(true);
  run Tank(sigarray = ChromPercuTank);
  emit ChromPercuTankOut(false);
  emit ChromBassOut(true);
  await count(3, ChromBassIn.now);
  fork {
    emit ChromViolinsOut(true);
  } par {
    await count(3, ChromBassIn.now);
  } par {
    emit ChromFlutesOut(true);
  } par {
    emit ChromBassonsOut(true);
  }
  emit ChromFlutesOut(false);
  emit ChromBassonsOut(false);
  fork {
    await count(10, ChromViolinsIn.now);
  } par {
    emit ChromViolasOut(true);
  } par {
    emit ChromCellosOut(true);
  }
  emit ChromBassOut(false);
  emit ChromViolinsOut(false);
  emit ChromViolasOut(false);
  emit ChromCellosOut(false);""")
    if extra:
        lines.append(deactivate_all(extra))
    return "\n".join(lines)


def make_chromatic():
    b = Builder()
    names = chromatic_groups(b)
    body = chromatic_session_body([])
    orchestration = (
        f"module ChromaticSession({iface(names)}) {{\n{body}\n}}\n"
    )
    return {
        "title": "Chromatic Session",
        "tempoBpm": 120,
        "quantize": "beat",
        "beatsPerMeasure": 4,
        "instruments": [
            "percussion", "contrabass", "violin", "flute", "bassoon",
            "viola", "cello",
        ],
        "patterns": b.patterns,
        "groups": b.groups,
        "orchestration": orchestration,
        "entryModule": "ChromaticSession",
    }


# --- jazz ---------------------------------------------------------------------

def make_jazz():
    b = Builder()
    b.group("Piano", "repeat", "piano", 8, 2.0)
    b.group("Percussion", "repeat", "percussion", 6, 1.0)
    b.group("Bass", "repeat", "bass", 8, 2.0)
    b.group("Trumpet", "repeat", "trumpet", 18, 2.0)
    b.group("Drums", "repeat", "drums", 18, 1.0)
    b.group("Saxophone", "repeat", "saxophone", 18, 2.0)
    b.group("Guitar", "repeat", "guitar", 4, 4.0)
    names = [g["name"] for g in b.groups]
    orchestration = f"""\
module JazzMain({iface(names)}) {{
  emit GuitarOut(true);
  emit BassOut(true);
  await count(2, GuitarIn.now);
  emit PianoOut(true);
  await count(2, PianoIn.now);
  emit PercussionOut(true);
  await count(3, BassIn.now);
  emit TrumpetOut(true);
  await count(4, TrumpetIn.now);
  emit TrumpetOut(false);
  fork {{
    emit SaxophoneOut(true);
  }} par {{
    emit DrumsOut(true);
  }}
  await count(4, SaxophoneIn.now);
  emit PianoOut(false);
  emit PercussionOut(false);
  emit BassOut(false);
  emit DrumsOut(false);
  emit SaxophoneOut(false);
  emit GuitarOut(false);
}}
"""
    return {
        "title": "Grand Loup",
        "tempoBpm": 140,
        "quantize": "beat",
        "beatsPerMeasure": 4,
        "instruments": [
            "piano", "percussion", "bass", "trumpet", "drums", "saxophone",
            "guitar",
        ],
        "patterns": b.patterns,
        "groups": b.groups,
        "orchestration": orchestration,
        "entryModule": "JazzMain",
    }


# --- opus1 ---------------------------------------------------------------------

def fillers(b: Builder, session: str, count: int, start_instr: int):
    names = []
    for i in range(count):
        instrument = OPUS1_INSTRUMENTS[(start_instr + i) % len(OPUS1_INSTRUMENTS)]
        size = 4 if i % 2 == 0 else 3
        names.append(
            b.group(f"{session}Tex{i + 1:02d}", "repeat", instrument, size,
                    2.0 if i % 3 else 3.0)
        )
    return names


def make_opus1():
    b = Builder()

    scale_struct = [
        b.group("TrumpetScaleTank", "tank", "trumpet", 3, 1.0, "ScaleTrumpet"),
        b.group("HornScaleTank", "tank", "horn", 3, 1.0, "ScaleHorn"),
        b.group("TromboneScaleTank", "tank", "trombone", 3, 1.0, "ScaleTrombone"),
        b.group("CelloScale", "repeat", "cello", 6, 2.0),
        b.group("FluteScale", "repeat", "flute", 4, 1.0),
        b.group("OboeScale", "repeat", "oboe", 4, 1.0),
        b.group("ClarinetScale", "repeat", "clarinet", 4, 1.0),
    ]
    scale_extra = fillers(b, "Scale", 17, 0)
    scale_names = scale_struct + scale_extra

    chrom_struct = chromatic_groups(b)
    chrom_extra = fillers(b, "Chrom", 17, 5)
    chrom_names = chrom_struct + chrom_extra

    tonal_struct = [
        b.group("TonalPianoTank", "tank", "piano", 3, 1.0, "TonalPiano"),
        b.group("TonalHarp", "repeat", "harp", 4, 2.0),
        b.group("TonalHorns", "repeat", "horn", 4, 2.0, "TonalHorn"),
        b.group("TonalTrumpets", "repeat", "trumpet", 4, 1.0, "TonalTrumpet"),
        b.group("TonalTuba", "repeat", "tuba", 3, 2.0),
        b.group("TonalCelesta", "repeat", "celesta", 4, 1.0),
        b.group("TonalViolins", "repeat", "violin", 6, 1.0, "TonalViolin"),
    ]
    tonal_extra = fillers(b, "Tonal", 18, 10)
    tonal_names = tonal_struct + tonal_extra

    scale_body = "\n".join([
        activate_all(scale_extra),
        """\
  emit CelloScaleOut(true);
  fork {
    emit TrumpetScaleTankOut(true);
    run Tank(sigarray = TrumpetScaleTank);
    emit TrumpetScaleTankOut(false);
  } par {
    emit HornScaleTankOut(true);
    run Tank(sigarray = HornScaleTank);
    emit HornScaleTankOut(false);
  } par {
    emit TromboneScaleTankOut(true);
    run Tank(sigarray = TromboneScaleTank);
    emit TromboneScaleTankOut(false);
  } par {
    await count(5, CelloScaleIn.now);
  }
  fork {
    emit FluteScaleOut(true);
  } par {
    emit OboeScaleOut(true);
  } par {
    emit ClarinetScaleOut(true);
  }
  await count(4, FluteScaleIn.now);
  emit CelloScaleOut(false);
  emit FluteScaleOut(false);
  emit OboeScaleOut(false);
  emit ClarinetScaleOut(false);""",
        deactivate_all(scale_extra),
    ])

    chrom_body = chromatic_session_body(chrom_extra)

    tonal_body = "\n".join([
        activate_all(tonal_extra),
        """\
  emit TonalHarpOut(true);
  emit TonalPianoTankOut(true);
  fork {
    run Tank(sigarray = TonalPianoTank);
    emit TonalPianoTankOut(false);
  } par {
    await count(4, TonalHarpIn.now);
  }
  fork {
    emit TonalHornsOut(true);
  } par {
    emit TonalTrumpetsOut(true);
  } par {
    await count(3, TonalHornsIn.now);
  }
  fork {
    emit TonalTubaOut(true);
  } par {
    emit TonalCelestaOut(true);
  } par {
    emit TonalViolinsOut(true);
  }
  await count(5, TonalViolinsIn.now);
  emit TonalHarpOut(false);
  emit TonalHornsOut(false);
  emit TonalTrumpetsOut(false);
  emit TonalTubaOut(false);
  emit TonalCelestaOut(false);
  emit TonalViolinsOut(false);""",
        deactivate_all(tonal_extra),
    ])

    all_names = scale_names + chrom_names + tonal_names
    orchestration = "\n".join([
        f"module Opus1({iface(all_names)}) {{",
        "  run ScaleSession(...);",
        "  run ChromaticSession(...);",
        "  run TonalSession(...);",
        "}",
        "",
        f"module ScaleSession({iface(scale_names)}) {{",
        scale_body,
        "}",
        "",
        f"module ChromaticSession({iface(chrom_names)}) {{",
        chrom_body,
        "}",
        "",
        f"module TonalSession({iface(tonal_names)}) {{",
        tonal_body,
        "}",
        "",
    ])

    doc = {
        "title": "Opus 1",
        "tempoBpm": 120,
        "quantize": "beat",
        "beatsPerMeasure": 4,
        "instruments": OPUS1_INSTRUMENTS,
        "patterns": b.patterns,
        "groups": b.groups,
        "orchestration": orchestration,
        "entryModule": "Opus1",
    }
    assert len(doc["groups"]) == 73, len(doc["groups"])
    assert len(doc["patterns"]) == 270, len(doc["patterns"])
    assert len(doc["instruments"]) == 16
    return doc


# --- tiny diagnostic fixtures ---------------------------------------------------

def make_paradox():
    b = Builder()
    b.group("Solo", "repeat", "lead", 1, 2.0)
    orchestration = """\
module ParadoxMain(in SoloIn, out SoloOut) {
  signal Trap;
  emit SoloOut(true);
  if (Trap.now) {
  } else {
    emit Trap();
  }
}
"""
    return {
        "title": "Paradox",
        "tempoBpm": 120,
        "quantize": "beat",
        "beatsPerMeasure": 4,
        "instruments": ["lead"],
        "patterns": b.patterns,
        "groups": b.groups,
        "orchestration": orchestration,
        "entryModule": "ParadoxMain",
    }


def make_orphan():
    b = Builder()
    b.group("Solo", "repeat", "lead", 2, 2.0)
    orchestration = """\
module OrphanMain(in SoloIn, out SoloOut, out GhostOut) {
  emit SoloOut(true);
  emit GhostOut(true);
  await count(2, SoloIn.now);
  emit SoloOut(false);
}
"""
    return {
        "title": "Orphan Signal",
        "tempoBpm": 120,
        "quantize": "beat",
        "beatsPerMeasure": 4,
        "instruments": ["lead"],
        "patterns": b.patterns,
        "groups": b.groups,
        "orchestration": orchestration,
        "entryModule": "OrphanMain",
    }


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    fixtures = {
        "jazz.json": make_jazz(),
        "chromatic.json": make_chromatic(),
        "opus1.json": make_opus1(),
        "paradox.json": make_paradox(),
        "orphan.json": make_orphan(),
    }
    for name, doc in fixtures.items():
        path = OUT_DIR / name
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
