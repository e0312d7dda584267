"""Exception hierarchy shared by all skini components."""

from __future__ import annotations


class SkiniError(Exception):
    """Base class for every error raised by this package."""


# --- reactive kernel -------------------------------------------------------

class KernelError(SkiniError):
    pass


class CausalityError(KernelError):
    """No consistent schedule exists for the current instant.

    ``signals`` holds the (source-level) names whose status the blocked
    statements were waiting on; ``instant`` is the reaction index.
    """

    def __init__(self, signals, instant, locations=()):
        self.signals = tuple(sorted(set(signals)))
        self.instant = instant
        self.locations = tuple(locations)
        where = ""
        if self.locations:
            where = " at " + ", ".join(
                f"line {ln}, col {col}" for ln, col in self.locations
            )
        super().__init__(
            f"causality error in instant {instant}: no consistent schedule for "
            f"signal(s) {', '.join(self.signals)}{where}"
        )


class DoubleEmission(KernelError):
    def __init__(self, signal, first, second):
        self.signal = signal
        super().__init__(
            f"signal {signal} emitted twice in one instant with conflicting "
            f"values ({first!r} then {second!r})"
        )


class MachineTerminated(KernelError):
    pass


class UnknownInputSignal(KernelError):
    pass


class UninitializedValueRead(KernelError):
    def __init__(self, signal):
        self.signal = signal
        super().__init__(
            f"read of {signal}.nowval but {signal} was never emitted and has "
            f"no initial value"
        )


class ExprTypeError(KernelError):
    pass


class InstantaneousLoop(KernelError):
    pass


# --- module elaboration ----------------------------------------------------

class ElaborationError(KernelError):
    pass


class UnknownModule(ElaborationError):
    pass


class UnboundInterfaceSignal(ElaborationError):
    pass


class RecursiveInstantiation(ElaborationError):
    pass


class UnknownSignal(ElaborationError):
    pass


# --- DSL parsing -----------------------------------------------------------

class ScoreSyntaxError(SkiniError):
    """Syntax-level failure in the orchestration DSL, with position."""

    def __init__(self, message, line, col):
        self.line = line
        self.col = col
        super().__init__(f"{message} (line {line}, col {col})")


class DuplicateSignalDecl(ScoreSyntaxError):
    pass


class UnknownConstruct(ScoreSyntaxError):
    pass


# --- score validation ------------------------------------------------------

class ValidationError(SkiniError):
    """Aggregated score-validation failure; ``findings`` lists every problem."""

    def __init__(self, findings):
        self.findings = tuple(findings)
        super().__init__(
            "score validation failed:\n  " + "\n  ".join(self.findings)
        )


# --- interaction runtime ---------------------------------------------------

class RuntimeErrorSkini(SkiniError):
    pass


class UnknownPattern(RuntimeErrorSkini):
    pass


class UnknownOutputSignal(RuntimeErrorSkini):
    """The score emitted an output that maps to no group or tank pattern."""


class ScoreBugError(RuntimeErrorSkini):
    """A structurally valid score emitted something semantically bogus."""


# --- rendering -------------------------------------------------------------

class UnsortedEvents(SkiniError):
    pass
