"""The trigger/action pattern with timing windows and its observer.

The observer is a discrete-time state machine (1 tick = 1 ms for the
published examples).  Each observation cycle walks IDLE -> TRIG -> LOCAL ->
ACTION; phases may complete within a single tick when the windows are
degenerate.  Within a tick the checks run in a fixed order: expired window,
exit condition, end-event window, phase condition.  Phase conditions hold
on the open interval between the phase's start and end events, and a new
cycle begins at the tick that ended the previous one (never re-starting at
the same trigger tick), which is what makes back-to-back periodic
observations line up.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import propexpr as pe
from .edtl import Tristate
from .errors import EdtlcError

TimeBound = int | float  # non-negative int, or math.inf

FALSE = pe.Const(False)
TRUE = pe.Const(True)


def _check_bound(name: str, value: TimeBound):
    if value is math.inf:
        return
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise EdtlcError(f"{name} must be a non-negative integer or infinity")


@dataclass(frozen=True)
class SupParameters:
    tse: pe.PropExpr = TRUE
    tc: pe.PropExpr = TRUE
    tee: pe.PropExpr = TRUE
    tec: pe.PropExpr = FALSE
    tmin: TimeBound = 0
    tmax: TimeBound = 0
    ase: pe.PropExpr = TRUE
    ac: pe.PropExpr = TRUE
    aee: pe.PropExpr = TRUE
    aec: pe.PropExpr = FALSE
    amin: TimeBound = 0
    amax: TimeBound = 0
    lmin: TimeBound = 0
    lmax: TimeBound = 0
    interpretation: str = "progress"

    def __post_init__(self):
        for name in ("tmin", "tmax", "amin", "amax", "lmin", "lmax"):
            _check_bound(name, getattr(self, name))
        for lo, hi in (("tmin", "tmax"), ("amin", "amax"), ("lmin", "lmax")):
            if getattr(self, lo) > getattr(self, hi):
                raise EdtlcError(f"{lo} must not exceed {hi}")
        if self.interpretation != "progress":
            raise EdtlcError("only the progress interpretation is supported")

    @staticmethod
    def from_json_dict(data: dict) -> "SupParameters":
        def expr(key, default):
            v = data.get(key)
            if v is None:
                return default
            if isinstance(v, bool):
                return pe.Const(v)
            return pe.parse_prop(v)

        def bound(key) -> TimeBound:
            v = data.get(key, 0)
            if v == "inf":
                return math.inf
            if isinstance(v, int) and not isinstance(v, bool):
                return v
            raise EdtlcError(f"{key} must be an integer or \"inf\"")

        known = {"tse", "tc", "tee", "tec", "tmin", "tmax", "ase", "ac",
                 "aee", "aec", "amin", "amax", "lmin", "lmax"}
        unknown = set(data) - known
        if unknown:
            raise EdtlcError(f"unknown parameter {sorted(unknown)[0]!r}")
        tse = expr("tse", TRUE)
        ase = expr("ase", TRUE)
        return SupParameters(
            tse=tse, tc=expr("tc", tse), tee=expr("tee", tse),
            tec=expr("tec", FALSE),
            tmin=bound("tmin"), tmax=bound("tmax"),
            ase=ase, ac=expr("ac", ase), aee=expr("aee", ase),
            aec=expr("aec", FALSE),
            amin=bound("amin"), amax=bound("amax"),
            lmin=bound("lmin"), lmax=bound("lmax"),
        )

    @staticmethod
    def from_json(text: str) -> "SupParameters":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EdtlcError(f"malformed parameter JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise EdtlcError("parameter JSON must be an object")
        return SupParameters.from_json_dict(data)


def default_params(trigger_expr: pe.PropExpr, action_expr: pe.PropExpr) -> SupParameters:
    """Trigger and action expressions fill their whole phases; exit
    conditions off, every bound zero."""
    return SupParameters(tse=trigger_expr, tc=trigger_expr, tee=trigger_expr,
                         ase=action_expr, ac=action_expr, aee=action_expr)


def interpret_interval(lo: TimeBound, hi: TimeBound) -> tuple[Tristate, pe.PropExpr | None]:
    """Read a timing window as a three-valued attribute.

    [0, 0] is false (immediate), [0, inf) is true (unconstrained), anything
    else is a time-varying constraint on a symbolic clock t.
    """
    _check_bound("lo", lo)
    _check_bound("hi", hi)
    if lo > hi:
        raise EdtlcError("lo must not exceed hi")
    if lo == 0 and hi == 0:
        return (Tristate.FALSE, None)
    if lo == 0 and hi is math.inf:
        return (Tristate.TRUE, None)
    parts = []
    if hi is not math.inf:
        parts.append(pe.Compare("t", "<=", int(hi)))
    constraint: pe.PropExpr = pe.Compare("t", ">=", int(lo))
    if parts:
        constraint = pe.And(constraint, parts[0])
    return (Tristate.VAR, constraint)


# ---------------------------------------------------------------------------
# Traces


def load_trace_csv(text: str) -> list[dict[str, int]]:
    """Header row of identifiers, one row per tick, integer cells."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise EdtlcError("trace CSV needs a header row and at least one tick")
    header = [h.strip() for h in rows[0]]
    trace = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise EdtlcError(f"trace CSV line {lineno}: expected {len(header)} cells")
        try:
            trace.append({h: int(cell) for h, cell in zip(header, row)})
        except ValueError as exc:
            raise EdtlcError(f"trace CSV line {lineno}: {exc}") from exc
    return trace


def dump_trace_csv(trace: Sequence[Mapping[str, int]]) -> str:
    header = sorted(trace[0])
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(header)
    for row in trace:
        writer.writerow([int(row[h]) for h in header])
    return out.getvalue()


# ---------------------------------------------------------------------------
# Verdicts


SUCCESS = "success"
FAIL = "fail"
ABORT = "abort"

FAIL_REASONS = ("TEE-window-missed", "TC-violated", "ASE-window-missed",
                "AC-violated", "AEE-window-missed")
ABORT_REASONS = ("TEC-exit", "AEC-abort", "trace-exhausted")


@dataclass(frozen=True)
class CycleOutcome:
    outcome: str  # success | fail | abort
    start: int  # trigger tick t0
    tick: int  # tick that decided the cycle (one past the end for exhaustion)
    reason: str | None = None
    trigger_end: int | None = None
    action_start: int | None = None
    action_end: int | None = None

    def to_json_dict(self) -> dict:
        out = {"outcome": self.outcome, "start": self.start, "tick": self.tick}
        if self.reason is not None:
            out["reason"] = self.reason
        for key in ("trigger_end", "action_start", "action_end"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out


@dataclass(frozen=True)
class SupVerdict:
    cycles: tuple[CycleOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(c.outcome != FAIL for c in self.cycles)

    def to_json_dict(self) -> dict:
        return {"pass": self.passed,
                "cycles": [c.to_json_dict() for c in self.cycles]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# The observer


def run_monitor(params: SupParameters, trace: Sequence[Mapping[str, int]]) -> SupVerdict:
    if not trace:
        raise EdtlcError("trace must be nonempty")
    n = len(trace)

    def holds(expr: pe.PropExpr, tick: int) -> bool:
        return pe.eval_prop(expr, trace[tick])

    cycles: list[CycleOutcome] = []
    pos = 0
    while pos < n:
        t0 = None
        for i in range(pos, n):
            if holds(params.tse, i):
                t0 = i
                break
        if t0 is None:
            break
        outcome = _run_cycle(params, trace, t0, n, holds)
        cycles.append(outcome)
        if outcome.outcome == ABORT and outcome.reason == "trace-exhausted":
            break
        pos = max(outcome.tick, t0 + 1)
    return SupVerdict(tuple(cycles))


def _run_cycle(params, trace, t0, n, holds) -> CycleOutcome:
    # TRIG: only the first trigger firing is recorded; TEE must land in
    # [t0+tmin, t0+tmax] with TC holding strictly between t0 and tee
    tee = None
    t = t0
    while True:
        if t >= n:
            return CycleOutcome(ABORT, t0, n, reason="trace-exhausted")
        if t > t0 + params.tmax:
            return CycleOutcome(FAIL, t0, t, reason="TEE-window-missed")
        if holds(params.tec, t):
            return CycleOutcome(ABORT, t0, t, reason="TEC-exit")
        if t0 + params.tmin <= t <= t0 + params.tmax and holds(params.tee, t):
            tee = t
            break
        if t > t0 and not holds(params.tc, t):
            return CycleOutcome(FAIL, t0, t, reason="TC-violated")
        t += 1

    # LOCAL: ASE must first hold inside [tee+lmin, tee+lmax]; holding
    # earlier, or the window expiring, both miss it
    a0 = None
    t = tee
    while True:
        if t >= n:
            return CycleOutcome(ABORT, t0, n, reason="trace-exhausted",
                                trigger_end=tee)
        if t > tee + params.lmax:
            return CycleOutcome(FAIL, t0, t, reason="ASE-window-missed",
                                trigger_end=tee)
        if holds(params.ase, t):
            if t < tee + params.lmin:
                return CycleOutcome(FAIL, t0, t, reason="ASE-window-missed",
                                    trigger_end=tee)
            a0 = t
            break
        t += 1

    # ACTION: AEE must land in [a0+amin, a0+amax] with AC holding strictly
    # between a0 and aee; AEC aborts the cycle
    t = a0
    while True:
        if t >= n:
            return CycleOutcome(ABORT, t0, n, reason="trace-exhausted",
                                trigger_end=tee, action_start=a0)
        if t > a0 + params.amax:
            return CycleOutcome(FAIL, t0, t, reason="AEE-window-missed",
                                trigger_end=tee, action_start=a0)
        if holds(params.aec, t):
            return CycleOutcome(ABORT, t0, t, reason="AEC-abort",
                                trigger_end=tee, action_start=a0)
        if a0 + params.amin <= t <= a0 + params.amax and holds(params.aee, t):
            return CycleOutcome(SUCCESS, t0, t, trigger_end=tee,
                                action_start=a0, action_end=t)
        if t > a0 and not holds(params.ac, t):
            return CycleOutcome(FAIL, t0, t, reason="AC-violated",
                                trigger_end=tee, action_start=a0)
        t += 1
