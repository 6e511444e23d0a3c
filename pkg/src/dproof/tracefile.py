"""Reading and writing refutation traces.

A trace file is a complete, self-contained refutation record:

    dproof 1
    system <sha256 of the embedded problem text>
    sys <line>                      one per line of the problem text
    box (x [0x1.8p+0 0x1.0p+1]) (y [0x1.0p+0 0x1.0p+1])
    prune y removed [0x1.0p+0 0x1.7ff..p+0] kept [0x1.8p+0 0x1.0p+1]
    branch x taken [...] sibling [...]
    backtrack x failed [...] resumed [...]
    fail

Interval endpoints are float.hex() so every bound round-trips exactly;
an emptied interval prints as the literal [empty].  Only refutations are
serialized: the step list must end with fail.
"""

from __future__ import annotations

import re

from dproof.interval import Box, Interval, float_from_hex, float_hex
from dproof.parser import ParseError, parse_system
from dproof.solver import BACKTRACK, BRANCH, FAIL, PRUNE, Step
from dproof.terms import System

FORMAT_LINE = "dproof 1"

_STEP_WORDS = {
    PRUNE: ("removed", "kept"),
    BRANCH: ("taken", "sibling"),
    BACKTRACK: ("failed", "resumed"),
}

_INTERVAL_RE = re.compile(r"\[([^\[\]]*)\]")


class TraceFormatError(ValueError):
    """The trace file cannot be decoded."""


def _interval_text(iv: Interval) -> str:
    if iv.is_empty:
        return "[empty]"
    return f"[{float_hex(iv.lo)} {float_hex(iv.hi)}]"


def _interval_of_text(text: str, lineno: int) -> Interval:
    body = text.strip()
    if body == "empty":
        return Interval.empty()
    parts = body.split()
    if len(parts) != 2:
        raise TraceFormatError(f"line {lineno}: bad interval [{text}]")
    try:
        lo = float_from_hex(parts[0])
        hi = float_from_hex(parts[1])
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: {exc}") from None
    try:
        return Interval(lo, hi)
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: {exc}") from None


def write_trace_text(system: System, trace: list[Step]) -> str:
    """Render a refutation trace; only traces that end in fail qualify."""
    if not trace or trace[-1].kind != FAIL:
        raise ValueError("only refutation traces (ending in fail) are serialized")
    lines = [FORMAT_LINE, f"system {system.sha256()}"]
    for ln in system.canonical_text().splitlines():
        lines.append(f"sys {ln}")
    box_parts = [
        f"({name} {_interval_text(iv)})"
        for name, iv in zip(system.var_names, system.box.ivs)
    ]
    lines.append("box " + " ".join(box_parts))
    for st in trace:
        if st.kind == FAIL:
            lines.append("fail")
            continue
        wa, wb = _STEP_WORDS[st.kind]
        name = system.var_names[st.var]
        lines.append(
            f"{st.kind} {name} {wa} {_interval_text(st.a)} {wb} {_interval_text(st.b)}"
        )
    return "\n".join(lines) + "\n"


def _parse_step_line(line: str, lineno: int, var_index: dict[str, int]) -> Step:
    head = line.split(None, 2)
    kind = head[0]
    if kind == "fail":
        if line.strip() != "fail":
            raise TraceFormatError(f"line {lineno}: fail takes no arguments")
        return Step(FAIL)
    if kind not in _STEP_WORDS:
        raise TraceFormatError(f"line {lineno}: unknown step {kind!r}")
    if len(head) < 3:
        raise TraceFormatError(f"line {lineno}: truncated {kind} step")
    name = head[1]
    if name not in var_index:
        raise TraceFormatError(f"line {lineno}: unknown variable {name!r}")
    wa, wb = _STEP_WORDS[kind]
    rest = head[2]
    ivs = _INTERVAL_RE.findall(rest)
    words = _INTERVAL_RE.sub("#", rest).split()
    if len(ivs) != 2 or words != [wa, "#", wb, "#"]:
        raise TraceFormatError(
            f"line {lineno}: {kind} expects '{wa} [..] {wb} [..]'"
        )
    a = _interval_of_text(ivs[0], lineno)
    b = _interval_of_text(ivs[1], lineno)
    return Step(kind, var=var_index[name], a=a, b=b)


def read_trace_text(text: str) -> tuple[System, list[Step]]:
    """Decode a trace file into its problem and step list.

    The embedded problem text is re-parsed and re-hashed; any mismatch
    with the header hash or the echoed box is an error.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_LINE:
        raise TraceFormatError("line 1: expected header 'dproof 1'")
    if len(lines) < 2 or not lines[1].startswith("system "):
        raise TraceFormatError("line 2: expected 'system <sha256>'")
    claimed = lines[1][len("system "):].strip()

    sys_lines = []
    i = 2
    while i < len(lines) and lines[i].startswith("sys "):
        sys_lines.append(lines[i][len("sys "):])
        i += 1
    if not sys_lines:
        raise TraceFormatError(f"line {i + 1}: expected embedded problem ('sys' lines)")
    sys_text = "\n".join(sys_lines) + "\n"
    try:
        system = parse_system(sys_text)
    except ParseError as exc:
        raise TraceFormatError(f"embedded problem does not parse: {exc}") from None
    if system.sha256() != claimed:
        raise TraceFormatError("embedded problem does not match the header hash")

    if i >= len(lines) or not lines[i].startswith("box "):
        raise TraceFormatError(f"line {i + 1}: expected 'box' line")
    box_line = lines[i][len("box "):]
    i += 1
    entries = re.findall(r"\(\s*(\S+)\s+\[([^\[\]]*)\]\s*\)", box_line)
    if len(entries) != len(system.var_names):
        raise TraceFormatError(
            f"box line lists {len(entries)} variables, problem has "
            f"{len(system.var_names)}"
        )
    for (name, ivtext), want_name, want_iv in zip(
        entries, system.var_names, system.box.ivs
    ):
        if name != want_name:
            raise TraceFormatError(
                f"box line names {name!r} where the problem has {want_name!r}"
            )
        iv = _interval_of_text(ivtext, i)
        if iv != want_iv:
            raise TraceFormatError(
                f"box line bound for {name} disagrees with the problem"
            )

    steps: list[Step] = []
    vi = system.var_index
    for lineno in range(i, len(lines)):
        line = lines[lineno].strip()
        if not line:
            continue
        steps.append(_parse_step_line(line, lineno + 1, vi))
    if not steps:
        raise TraceFormatError("trace has no steps")
    return system, steps


def save_trace(path: str, system: System, trace: list[Step]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_trace_text(system, trace))


def load_trace(path: str) -> tuple[System, list[Step]]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_trace_text(fh.read())
