"""Reference static analyzer: conservative unused-code detection, a naive
unreachable detector mirroring tool-level capability, and gold annotation.

The unused detector is deliberately conservative: a line is flagged only when
every occurrence of its identifier is a write. The unreachable detector only
sees code after control-transfer statements and literal-constant guards; it
never evaluates variable-dependent conditions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import folding
from .code_model import (
    CodeSnippet,
    LineKind,
    extract_guard,
    strip_code_text,
)
from .pattern_forge import InsertionRecord

# closed reason vocabulary
REASON_NEVER_READ = "never_read"
REASON_UNUSED_IMPORT = "unused_import"
REASON_NEVER_CALLED = "never_called"
REASON_AFTER_RETURN = "after_return"
REASON_LITERAL_FALSE = "literal_false"
REASON_INSERTED_PATTERN = "inserted_pattern"
REASON_DATASET_GOLD = "dataset_gold"

REASONS = frozenset({
    REASON_NEVER_READ,
    REASON_UNUSED_IMPORT,
    REASON_NEVER_CALLED,
    REASON_AFTER_RETURN,
    REASON_LITERAL_FALSE,
    REASON_INSERTED_PATTERN,
    REASON_DATASET_GOLD,
})


@dataclass(frozen=True)
class LineFinding:
    index: int
    type: str  # "unused" | "unreachable"
    reason: str


@dataclass(frozen=True)
class GoldAnnotation:
    label: str  # normal | unused | unreachable | both
    lines: tuple[LineFinding, ...] = field(default=())


_WORD = re.compile(r"[A-Za-z_]\w*")

_PY_SIMPLE_ASSIGN = re.compile(r"^\s*([A-Za-z_]\w*)\s*=(?!=)")
_PY_IMPORT = re.compile(r"^\s*import\s+(.+?)\s*$")
_PY_FROM_IMPORT = re.compile(r"^\s*from\s+[\w.]+\s+import\s+(.+?)\s*$")
_PY_DEF = re.compile(r"^\s*def\s+([A-Za-z_]\w*)\s*\(")

_JAVA_DECL = re.compile(
    r"^\s*(?:public\s+|private\s+|protected\s+|static\s+|final\s+)*"
    r"(?:int|long|short|byte|double|float|boolean|char|var|String|[A-Z]\w*(?:<[^=;()]*>)?)"
    r"(?:\[\])?\s+([A-Za-z_]\w*)\s*(?:=\s*[^;]+)?;\s*$"
)
_JAVA_ASSIGN = re.compile(r"^\s*([A-Za-z_]\w*)\s*=(?!=)[^;]*;\s*$")
_JAVA_IMPORT = re.compile(r"^\s*import\s+(?:static\s+)?([\w.]+)\s*;\s*$")


def _code_lines(snippet: CodeSnippet) -> list[str]:
    return [strip_code_text(rec.text, snippet.language) for rec in snippet.lines]


def _occurrences(name: str, code_lines: list[str]) -> int:
    pat = re.compile(r"\b" + re.escape(name) + r"\b")
    return sum(len(pat.findall(code)) for code in code_lines)


def find_unused(snippet: CodeSnippet) -> list[LineFinding]:
    if snippet.language.tag == "java":
        return _find_unused_java(snippet)
    return _find_unused_python(snippet)


def _find_unused_python(snippet: CodeSnippet) -> list[LineFinding]:
    code_lines = _code_lines(snippet)
    findings: list[LineFinding] = []

    # simple assignments whose target is never read anywhere
    targets: dict[str, list[int]] = {}
    for rec, code in zip(snippet.lines, code_lines):
        if rec.kind is not LineKind.STATEMENT:
            continue
        m = _PY_SIMPLE_ASSIGN.match(code)
        if m:
            targets.setdefault(m.group(1), []).append(rec.index)
    for name, indices in targets.items():
        total = _occurrences(name, code_lines)
        if total == len(indices):  # every occurrence is a write target
            findings.extend(
                LineFinding(i, "unused", REASON_NEVER_READ) for i in indices
            )

    # imports whose bound names are never referenced
    for rec, code in zip(snippet.lines, code_lines):
        bound = _python_import_bindings(code)
        if not bound:
            continue
        others = code_lines[: rec.index - 1] + code_lines[rec.index :]
        if all(_occurrences(name, others) == 0 for name in bound):
            findings.append(LineFinding(rec.index, "unused", REASON_UNUSED_IMPORT))

    # function definitions never referenced elsewhere; a def that wraps the
    # whole snippet is the unit under analysis, not a dead helper
    for pos, (rec, code) in enumerate(zip(snippet.lines, code_lines)):
        m = _PY_DEF.match(code)
        if not m:
            continue
        name = m.group(1)
        if name.startswith("__"):
            continue
        prev = _previous_code_line(code_lines, pos)
        if prev is not None and prev.lstrip().startswith("@"):
            continue  # decorated: may be framework-invoked
        span_end = _python_block_end(snippet, pos)
        outside = [
            c
            for i, c in enumerate(code_lines)
            if (i < pos or i > span_end) and c.strip()
        ]
        if not outside:
            continue
        others = code_lines[:pos] + code_lines[pos + 1 :]
        if _occurrences(name, others) == 0:
            findings.append(LineFinding(rec.index, "unused", REASON_NEVER_CALLED))

    return sorted(set(findings), key=lambda f: f.index)


def _python_block_end(snippet: CodeSnippet, header_pos: int) -> int:
    """Last 0-based position belonging to the block opened at header_pos."""
    base = snippet.lines[header_pos].indent
    end = header_pos
    for pos in range(header_pos + 1, len(snippet.lines)):
        rec = snippet.lines[pos]
        if rec.kind is LineKind.BLANK_OR_COMMENT:
            continue
        if rec.indent <= base:
            break
        end = pos
    return end


def _previous_code_line(code_lines: list[str], pos: int) -> str | None:
    for i in range(pos - 1, -1, -1):
        if code_lines[i].strip():
            return code_lines[i]
    return None


def _python_import_bindings(code: str) -> list[str]:
    m = _PY_IMPORT.match(code)
    if m and not code.lstrip().startswith("from"):
        names = []
        for item in m.group(1).split(","):
            item = item.strip()
            if not item:
                continue
            if " as " in item:
                names.append(item.split(" as ")[-1].strip())
            else:
                names.append(item.split(".")[0])
        return names
    m = _PY_FROM_IMPORT.match(code)
    if m:
        spec = m.group(1)
        if "*" in spec:
            return []
        names = []
        for item in spec.strip("()").split(","):
            item = item.strip()
            if not item:
                continue
            if " as " in item:
                names.append(item.split(" as ")[-1].strip())
            else:
                names.append(item)
        return names
    return []


def _find_unused_java(snippet: CodeSnippet) -> list[LineFinding]:
    code_lines = _code_lines(snippet)
    findings: list[LineFinding] = []

    decl_lines: dict[str, list[int]] = {}
    assign_lines: dict[str, list[int]] = {}
    for rec, code in zip(snippet.lines, code_lines):
        if rec.kind is not LineKind.STATEMENT:
            continue
        m = _JAVA_DECL.match(code)
        if m and "(" not in code.split("=")[0]:
            decl_lines.setdefault(m.group(1), []).append(rec.index)
            continue
        m = _JAVA_ASSIGN.match(code)
        if m:
            assign_lines.setdefault(m.group(1), []).append(rec.index)

    for name, indices in decl_lines.items():
        writes = indices + assign_lines.get(name, [])
        total = _occurrences(name, code_lines)
        if total == len(writes):
            findings.extend(
                LineFinding(i, "unused", REASON_NEVER_READ) for i in sorted(writes)
            )

    for rec, code in zip(snippet.lines, code_lines):
        m = _JAVA_IMPORT.match(code)
        if not m:
            continue
        path = m.group(1)
        if path.endswith("*"):
            continue
        bound = path.rsplit(".", 1)[-1]
        others = code_lines[: rec.index - 1] + code_lines[rec.index :]
        if _occurrences(bound, others) == 0:
            findings.append(LineFinding(rec.index, "unused", REASON_UNUSED_IMPORT))

    return sorted(set(findings), key=lambda f: f.index)


# --- naive unreachable ----------------------------------------------------

_PY_TERMINATOR = re.compile(r"^(return|break|continue|raise)\b")
_JAVA_TERMINATOR = re.compile(r"^(return\b|break\s*;|continue\s*;|throw\b)")
_PY_CLAUSE_HEADS = frozenset({"else", "elif", "except", "finally", "case"})


def find_naive_unreachable(snippet: CodeSnippet) -> list[LineFinding]:
    if snippet.language.tag == "java":
        flagged = _java_after_terminator(snippet) | _java_literal_false(snippet)
    else:
        flagged = _py_after_terminator(snippet) | _py_literal_false(snippet)
    reasons = dict(sorted(flagged))
    return [
        LineFinding(idx, "unreachable", reason)
        for idx, reason in sorted(reasons.items())
    ]


def _py_after_terminator(snippet: CodeSnippet) -> set[tuple[int, str]]:
    out: set[tuple[int, str]] = set()
    lines = snippet.lines
    for pos, rec in enumerate(lines):
        if rec.kind is not LineKind.STATEMENT:
            continue
        code = strip_code_text(rec.text, snippet.language).strip()
        if not _PY_TERMINATOR.match(code):
            continue
        base = rec.indent
        for follower in lines[pos + 1 :]:
            if follower.kind is LineKind.BLANK_OR_COMMENT:
                continue
            if follower.indent < base:
                break
            head = _WORD.match(
                strip_code_text(follower.text, snippet.language).strip()
            )
            if (
                follower.indent == base
                and head
                and head.group() in _PY_CLAUSE_HEADS
            ):
                break
            if follower.kind in (LineKind.STATEMENT, LineKind.CONDITION):
                out.add((follower.index, REASON_AFTER_RETURN))
    return out


def _py_literal_false(snippet: CodeSnippet) -> set[tuple[int, str]]:
    out: set[tuple[int, str]] = set()
    lines = snippet.lines
    for pos, rec in enumerate(lines):
        if rec.kind is not LineKind.CONDITION:
            continue
        guard = extract_guard(rec.text, snippet.language)
        if guard is None or not folding.identifier_free(guard, snippet.language):
            continue
        try:
            value = folding.eval_expr(guard, {}, snippet.language)
        except folding.FoldError:
            continue
        if value:
            continue
        for follower in lines[pos + 1 :]:
            if follower.kind is LineKind.BLANK_OR_COMMENT:
                continue
            if follower.indent <= rec.indent:
                break
            if follower.kind in (LineKind.STATEMENT, LineKind.CONDITION):
                out.add((follower.index, REASON_LITERAL_FALSE))
    return out


def _java_depths(snippet: CodeSnippet) -> list[tuple[int, int]]:
    """(depth_before, depth_after) per line, from stripped brace counts."""
    depths = []
    depth = 0
    for rec in snippet.lines:
        code = strip_code_text(rec.text, snippet.language)
        before = depth
        depth += code.count("{") - code.count("}")
        depths.append((before, depth))
    return depths


def _java_after_terminator(snippet: CodeSnippet) -> set[tuple[int, str]]:
    out: set[tuple[int, str]] = set()
    lines = snippet.lines
    depths = _java_depths(snippet)
    for pos, rec in enumerate(lines):
        if rec.kind is not LineKind.STATEMENT:
            continue
        code = strip_code_text(rec.text, snippet.language).strip()
        if not _JAVA_TERMINATOR.match(code):
            continue
        base = depths[pos][1]
        for fpos in range(pos + 1, len(lines)):
            follower = lines[fpos]
            if depths[fpos][0] < base or depths[fpos][1] < base:
                break
            head = _WORD.match(
                strip_code_text(follower.text, snippet.language).strip()
            )
            if head and head.group() in ("case", "default"):
                break
            if follower.kind in (LineKind.STATEMENT, LineKind.CONDITION):
                out.add((follower.index, REASON_AFTER_RETURN))
    return out


def _java_literal_false(snippet: CodeSnippet) -> set[tuple[int, str]]:
    out: set[tuple[int, str]] = set()
    lines = snippet.lines
    depths = _java_depths(snippet)
    for pos, rec in enumerate(lines):
        if rec.kind is not LineKind.CONDITION:
            continue
        guard = extract_guard(rec.text, snippet.language)
        if guard is None or not folding.identifier_free(guard, snippet.language):
            continue
        try:
            value = folding.eval_expr(guard, {}, snippet.language)
        except folding.FoldError:
            continue
        if value:
            continue
        base = depths[pos][1]  # depth inside the guarded block
        for fpos in range(pos + 1, len(lines)):
            if depths[fpos][0] < base:
                break
            follower = lines[fpos]
            if follower.kind in (LineKind.STATEMENT, LineKind.CONDITION):
                out.add((follower.index, REASON_LITERAL_FALSE))
    return out


# --- merged gold annotation -----------------------------------------------


def annotate(
    snippet: CodeSnippet, known_insertions: InsertionRecord | None = None
) -> GoldAnnotation:
    """Merge detector findings with forge gold lines (pattern labels win on
    index collisions) and derive the snippet label.

    Unused findings that fall inside an inserted span describe the pattern's
    own preamble, not the host, so they type their lines but do not make the
    snippet label "both".
    """
    merged: dict[int, LineFinding] = {}
    span = known_insertions.inserted_span if known_insertions else None
    if known_insertions is not None:
        for idx, kind in known_insertions.gold_lines:
            merged[idx] = LineFinding(idx, kind, REASON_INSERTED_PATTERN)
    for finding in find_unused(snippet) + find_naive_unreachable(snippet):
        merged.setdefault(finding.index, finding)

    lines = tuple(sorted(merged.values(), key=lambda f: f.index))
    has_unreachable = any(f.type == "unreachable" for f in lines)
    has_host_unused = any(
        f.type == "unused" and (span is None or not span[0] <= f.index <= span[1])
        for f in lines
    )
    if has_unreachable and has_host_unused:
        label = "both"
    elif has_unreachable:
        label = "unreachable"
    elif lines:
        label = "unused"
    else:
        label = "normal"
    return GoldAnnotation(label=label, lines=lines)
