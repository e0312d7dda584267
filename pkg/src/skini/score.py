"""Score documents: patterns, groups, tanks, and the orchestration program.

A score is a single JSON document carrying the musical material (patterns,
grouped per instrument) plus the orchestration source text that sequences
group activations.  ``load_score`` validates everything at once and returns a
``Score`` ready to build reactive machines from.

Group wiring convention: a group named ``G`` talks to the orchestration
through the input signal ``GIn`` (emitted when one of its patterns is
selected, carrying the pattern id) and the output signal ``GOut`` (emitted by
the orchestration with true/false to activate or deactivate the group).
A tank is an array of single-pattern groups: each tank pattern ``p`` gets its
own ``pIn``/``pOut`` pair, consumed by the staged tank statement, and those
per-pattern signals are declared automatically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import dsl
from . import statements as st
from .errors import ScoreSyntaxError, SkiniError, ValidationError
from .expr import Lit, Now
from .machine import ReactiveMachine

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

TANK_MODULE = "Tank"
TANK_ARG = "sigarray"


@dataclass(frozen=True)
class NoteEvent:
    pitch: int
    onset: float  # beats from pattern start
    length: float  # beats
    velocity: int


@dataclass(frozen=True)
class PatternDef:
    id: str
    instrument: str
    duration_beats: float
    notes: Tuple[NoteEvent, ...] = ()
    media: Optional[str] = None  # opaque external reference


@dataclass(frozen=True)
class GroupDef:
    name: str
    kind: str  # 'repeat' | 'tank'
    pattern_ids: Tuple[str, ...]


@dataclass(frozen=True)
class ScoreDocument:
    title: str
    tempo_bpm: float
    quantize: str  # 'beat' | 'measure'
    beats_per_measure: int
    instruments: Tuple[str, ...]
    patterns: Tuple[PatternDef, ...]
    groups: Tuple[GroupDef, ...]
    orchestration: str
    entry_module: str


def parse_score_document(text: str) -> ScoreDocument:
    """Decode the JSON container; structural problems raise ValidationError."""
    findings = []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError([f"not valid JSON: {e}"]) from None
    if not isinstance(raw, dict):
        raise ValidationError(["top level must be a JSON object"])

    def need(key, types, default=None):
        if key not in raw:
            findings.append(f"missing key {key!r}")
            return default
        v = raw[key]
        if not isinstance(v, types):
            findings.append(f"key {key!r} has the wrong type")
            return default
        return v

    title = need("title", str, "")
    tempo = need("tempoBpm", (int, float), 120)
    quantize = need("quantize", str, "beat")
    bpm_num = need("beatsPerMeasure", int, 4)
    instruments = need("instruments", list, [])
    patterns_raw = need("patterns", list, [])
    groups_raw = need("groups", list, [])
    orchestration = need("orchestration", str, "")
    entry = need("entryModule", str, "")

    patterns = []
    for i, p in enumerate(patterns_raw or []):
        if not isinstance(p, dict):
            findings.append(f"patterns[{i}] must be an object")
            continue
        notes = []
        for j, nv in enumerate(p.get("notes", []) or []):
            if not isinstance(nv, dict):
                findings.append(f"patterns[{i}].notes[{j}] must be an object")
                continue
            notes.append(
                NoteEvent(
                    pitch=int(nv.get("pitch", 60)),
                    onset=float(nv.get("onset", 0.0)),
                    length=float(nv.get("length", 1.0)),
                    velocity=int(nv.get("velocity", 96)),
                )
            )
        patterns.append(
            PatternDef(
                id=str(p.get("id", f"pattern{i}")),
                instrument=str(p.get("instrument", "")),
                duration_beats=float(p.get("durationBeats", 0)),
                notes=tuple(notes),
                media=p.get("media"),
            )
        )

    groups = []
    for i, g in enumerate(groups_raw or []):
        if not isinstance(g, dict):
            findings.append(f"groups[{i}] must be an object")
            continue
        groups.append(
            GroupDef(
                name=str(g.get("name", f"group{i}")),
                kind=str(g.get("kind", "repeat")),
                pattern_ids=tuple(str(x) for x in g.get("patterns", [])),
            )
        )

    if findings:
        raise ValidationError(findings)
    return ScoreDocument(
        title=title,
        tempo_bpm=float(tempo),
        quantize=quantize,
        beats_per_measure=bpm_num,
        instruments=tuple(str(x) for x in instruments),
        patterns=tuple(patterns),
        groups=tuple(groups),
        orchestration=orchestration,
        entry_module=entry,
    )


def expand_tank(group_names) -> st.Stmt:
    """Staged tank body: one await/deactivate pair per listed name.

    The fork terminates exactly when every listed name has been selected
    once.  A single name degenerates to its plain sequence.
    """
    names = list(group_names)
    if not names:
        raise ValueError("expand_tank needs at least one name")
    branches = [
        st.Seq((
            st.Await(Now(name + "In")),
            st.Emit(name + "Out", Lit(False)),
        ))
        for name in names
    ]
    if len(branches) == 1:
        return branches[0]
    return st.Fork(tuple(branches))


@dataclass
class Score:
    """A validated, elaborated score ready to perform."""

    doc: ScoreDocument
    modules: Dict[str, st.ModuleDef]
    program: st.Stmt
    interface: Tuple[st.SignalDecl, ...]
    warnings: Tuple[str, ...] = ()
    pattern_by_id: Dict[str, PatternDef] = field(default_factory=dict)
    group_by_name: Dict[str, GroupDef] = field(default_factory=dict)
    group_of_pattern: Dict[str, str] = field(default_factory=dict)

    # --- derived tables -----------------------------------------------------
    def input_signal_for(self, pattern_id: str) -> str:
        group = self.group_by_name[self.group_of_pattern[pattern_id]]
        if group.kind == "tank":
            return pattern_id + "In"
        return group.name + "In"

    def output_map(self):
        """out-signal name -> ('group', name) | ('pattern', (group, pattern))."""
        out = {}
        for g in self.doc.groups:
            out[g.name + "Out"] = ("group", g.name)
            if g.kind == "tank":
                for pid in g.pattern_ids:
                    out[pid + "Out"] = ("pattern", (g.name, pid))
        return out

    @property
    def pattern_count(self):
        return len(self.doc.patterns)

    @property
    def group_count(self):
        return len(self.doc.groups)

    @property
    def instrument_count(self):
        return len(self.doc.instruments)

    def per_instrument_counts(self):
        counts = {name: 0 for name in self.doc.instruments}
        for p in self.doc.patterns:
            counts[p.instrument] += 1
        return [(name, counts[name]) for name in self.doc.instruments]

    def beat_seconds(self):
        return 60.0 / self.doc.tempo_bpm

    def pattern_seconds(self, pattern: PatternDef) -> float:
        return pattern.duration_beats * self.beat_seconds()

    def build_machine(self, **kwargs) -> ReactiveMachine:
        return ReactiveMachine(self.program, self.interface, **kwargs)


def load_score(source) -> Score:
    """Load and validate a score from a path, JSON text, or ScoreDocument.

    Collects *all* problems into one ValidationError.  Non-fatal issues (a
    group the orchestration never activates) surface as warnings on the
    returned Score.
    """
    if isinstance(source, ScoreDocument):
        doc = source
    else:
        if isinstance(source, Path):
            text = source.read_text(encoding="utf-8")
        elif isinstance(source, str) and not source.lstrip().startswith("{"):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source
        doc = parse_score_document(text)

    findings: List[str] = []
    warnings: List[str] = []

    # musical material ---------------------------------------------------------
    if doc.tempo_bpm <= 0:
        findings.append("tempoBpm must be positive")
    if doc.beats_per_measure < 1:
        findings.append("beatsPerMeasure must be at least 1")
    if doc.quantize not in ("beat", "measure"):
        findings.append(f"quantize must be 'beat' or 'measure', not {doc.quantize!r}")
    seen_instr = set()
    for name in doc.instruments:
        if not _IDENT.match(name):
            findings.append(f"instrument {name!r} is not a valid identifier")
        if name in seen_instr:
            findings.append(f"instrument {name!r} declared twice")
        seen_instr.add(name)

    pattern_by_id: Dict[str, PatternDef] = {}
    for p in doc.patterns:
        if not _IDENT.match(p.id):
            findings.append(f"pattern id {p.id!r} is not a valid identifier")
        if p.id in pattern_by_id:
            findings.append(f"pattern id {p.id!r} declared twice")
        pattern_by_id[p.id] = p
        if p.instrument not in seen_instr:
            findings.append(
                f"pattern {p.id!r} references undeclared instrument "
                f"{p.instrument!r}"
            )
        if p.duration_beats <= 0:
            findings.append(f"pattern {p.id!r} needs a positive duration")
        for nv in p.notes:
            if nv.onset + nv.length > p.duration_beats + 1e-9:
                findings.append(
                    f"pattern {p.id!r}: note at beat {nv.onset} overruns the "
                    f"pattern duration"
                )
            if not (0 <= nv.pitch <= 127 and 0 <= nv.velocity <= 127):
                findings.append(
                    f"pattern {p.id!r}: note pitch/velocity out of MIDI range"
                )

    group_by_name: Dict[str, GroupDef] = {}
    group_of_pattern: Dict[str, str] = {}
    for g in doc.groups:
        if not _IDENT.match(g.name):
            findings.append(f"group name {g.name!r} is not a valid identifier")
        if g.name in group_by_name:
            findings.append(f"group {g.name!r} declared twice")
        group_by_name[g.name] = g
        if g.kind not in ("repeat", "tank"):
            findings.append(f"group {g.name!r} has unknown kind {g.kind!r}")
        if not g.pattern_ids:
            findings.append(f"group {g.name!r} has no patterns")
        instruments = set()
        for pid in g.pattern_ids:
            if pid not in pattern_by_id:
                findings.append(
                    f"group {g.name!r} references unknown pattern {pid!r}"
                )
                continue
            if pid in group_of_pattern:
                findings.append(
                    f"pattern {pid!r} belongs to both "
                    f"{group_of_pattern[pid]!r} and {g.name!r}"
                )
            group_of_pattern[pid] = g.name
            instruments.add(pattern_by_id[pid].instrument)
        if len(instruments) > 1:
            findings.append(
                f"group {g.name!r} mixes instruments "
                f"{sorted(instruments)}; selections route to one queue"
            )

    # orchestration -------------------------------------------------------------
    modules: Dict[str, st.ModuleDef] = {}
    program = st.Nothing()
    interface: Tuple[st.SignalDecl, ...] = ()
    try:
        modules = dsl.parse_orchestration(doc.orchestration)
    except ScoreSyntaxError as e:
        findings.append(f"orchestration: {e}")

    if modules and doc.entry_module not in modules:
        findings.append(
            f"entry module {doc.entry_module!r} is not defined in the "
            f"orchestration"
        )

    if modules and not findings:
        try:
            modules = _stage_tanks(modules, group_by_name)
            _inject_tank_signals(modules, group_by_name, doc.entry_module)
            program = st.elaborate(modules, doc.entry_module)
            interface = modules[doc.entry_module].interface
        except SkiniError as e:
            findings.append(f"orchestration: {e}")

    if not findings and modules:
        findings.extend(
            _check_signal_wiring(modules, interface, group_by_name, warnings)
        )

    if findings:
        raise ValidationError(findings)

    return Score(
        doc=doc,
        modules=modules,
        program=program,
        interface=interface,
        warnings=tuple(warnings),
        pattern_by_id=pattern_by_id,
        group_by_name=group_by_name,
        group_of_pattern=group_of_pattern,
    )


def _stage_tanks(modules, group_by_name):
    """Replace ``run Tank(sigarray = G)`` with its expanded statement."""

    def rewrite(s):
        if isinstance(s, st.Run) and s.module == TANK_MODULE:
            if (
                s.bindings is None
                or len(s.bindings) != 1
                or s.bindings[0].callee != TANK_ARG
                or s.bindings[0].form != "="
            ):
                raise ValidationError(
                    [f"run Tank needs the single binding '{TANK_ARG} = "
                     f"<tank group>'{st._at(s.pos)}"]
                )
            tank_name = s.bindings[0].caller
            group = group_by_name.get(tank_name)
            if group is None or group.kind != "tank":
                raise ValidationError(
                    [f"run Tank: {tank_name!r} is not a declared tank"
                     f"{st._at(s.pos)}"]
                )
            expanded = expand_tank(group.pattern_ids)
            return _with_pos(expanded, s.pos)
        if isinstance(s, st.Seq):
            return st.Seq(tuple(rewrite(c) for c in s.body), pos=s.pos)
        if isinstance(s, st.Fork):
            return st.Fork(tuple(rewrite(c) for c in s.branches), pos=s.pos)
        if isinstance(s, st.Every):
            return st.Every(s.cond, rewrite(s.body), pos=s.pos)
        if isinstance(s, st.If):
            return st.If(
                s.cond, rewrite(s.then),
                None if s.orelse is None else rewrite(s.orelse), pos=s.pos,
            )
        if isinstance(s, st.Loop):
            return st.Loop(rewrite(s.body), pos=s.pos)
        if isinstance(s, st.Abort):
            return st.Abort(s.cond, rewrite(s.body), pos=s.pos)
        if isinstance(s, st.Suspend):
            return st.Suspend(s.cond, rewrite(s.body), pos=s.pos)
        if isinstance(s, st.Local):
            return st.Local(
                s.decl, rewrite(s.body), display=s.display, pos=s.pos
            )
        return s

    return {
        name: st.ModuleDef(m.name, m.interface, rewrite(m.body), pos=m.pos)
        for name, m in modules.items()
    }


def _with_pos(stmt, pos):
    if pos is None:
        return stmt
    try:
        return type(stmt)(
            **{
                f: getattr(stmt, f)
                for f in stmt.__dataclass_fields__
                if f != "pos"
            },
            pos=pos,
        )
    except TypeError:
        return stmt


def _inject_tank_signals(modules, group_by_name, entry):
    """Declare per-pattern tank signals wherever the expansions need them.

    Modules only ever instantiated through the implicit "..." binding (and
    the entry module) receive the declarations automatically; a module bound
    explicitly keeps full control of its interface.
    """
    tank_signals = {}
    for g in group_by_name.values():
        if g.kind != "tank":
            continue
        for pid in g.pattern_ids:
            tank_signals[pid + "In"] = "in"
            tank_signals[pid + "Out"] = "out"
    if not tank_signals:
        return

    explicit = set()
    for m in modules.values():
        for s in st.walk(m.body):
            if isinstance(s, st.Run) and s.bindings is not None:
                explicit.add(s.module)

    for name, m in modules.items():
        if name != entry and name in explicit:
            continue
        declared = {d.name for d in m.interface}
        extra = [
            st.SignalDecl(sig, direction)
            for sig, direction in sorted(tank_signals.items())
            if sig not in declared
        ]
        if extra:
            modules[name] = st.ModuleDef(
                m.name, m.interface + tuple(extra), m.body, pos=m.pos
            )


def _check_signal_wiring(modules, interface, group_by_name, warnings):
    """Interface signals must map onto groups; dormant groups warn."""
    findings = []
    tank_pattern_ids = {
        pid
        for g in group_by_name.values()
        if g.kind == "tank"
        for pid in g.pattern_ids
    }

    def classify(name):
        if name.endswith("In"):
            return name[:-2], "in"
        if name.endswith("Out"):
            return name[:-3], "out"
        return None, None

    for m in modules.values():
        for decl in m.interface:
            base, expected = classify(decl.name)
            if base is None:
                findings.append(
                    f"OrphanSignal: interface signal {decl.name!r} in module "
                    f"{m.name!r} has neither an In nor an Out suffix"
                )
                continue
            if base not in group_by_name and base not in tank_pattern_ids:
                findings.append(
                    f"OrphanSignal: {decl.name!r} in module {m.name!r} "
                    f"matches no group or tank pattern"
                )
            elif decl.direction != expected:
                findings.append(
                    f"signal {decl.name!r} in module {m.name!r} must be "
                    f"declared {expected!r}"
                )

    emitted = set()
    for m in modules.values():
        for s in st.walk(m.body):
            if isinstance(s, st.Emit):
                emitted.add(s.signal)

    iface_names = {d.name for d in interface}
    for g in group_by_name.values():
        if g.name + "Out" not in emitted:
            warnings.append(
                f"OrphanGroup: group {g.name!r} is never activated by the "
                f"orchestration"
            )
            continue
        for sig in (g.name + "In", g.name + "Out"):
            if sig not in iface_names:
                findings.append(
                    f"group {g.name!r}: signal {sig!r} is missing from the "
                    f"entry interface"
                )
        if g.kind == "tank":
            for pid in g.pattern_ids:
                for sig in (pid + "In", pid + "Out"):
                    if sig not in iface_names:
                        findings.append(
                            f"tank {g.name!r}: pattern signal {sig!r} is "
                            f"missing from the entry interface"
                        )
    return findings
