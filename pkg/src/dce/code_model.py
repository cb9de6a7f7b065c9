"""Line-level code model: parsing, line-kind classification, and the two
perturbation transforms (line deletion, condition masking).

Everything here is lexical. Sources need not be compilable; kinds are assigned
per physical line from the head keyword after light string/comment stripping.
All types are immutable; operations return new snippets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    EmptySource,
    IndexOutOfRange,
    MalformedGuard,
    MinimumSizeViolation,
    NotACondition,
    UnsupportedLanguage,
)

TAB_WIDTH = 4
DEFAULT_MASK_TOKEN = "<mask>"


@dataclass(frozen=True)
class Language:
    tag: str


PYTHON = Language("python")
JAVA = Language("java")

_LANGUAGES: dict[str, Language] = {"python": PYTHON, "java": JAVA}


def register_language(tag: str) -> Language:
    """Register (or fetch) a language by tag. The shipped analyses only know
    python and java; new tags get line handling but no keyword tables."""
    return _LANGUAGES.setdefault(tag, Language(tag))


def get_language(tag: str) -> Language:
    try:
        return _LANGUAGES[tag]
    except KeyError:
        raise UnsupportedLanguage(f"unknown language tag: {tag!r}") from None


class LineKind(str, Enum):
    CONDITION = "condition"
    STATEMENT = "statement"
    STRUCTURAL = "structural"
    BLANK_OR_COMMENT = "blank_or_comment"


@dataclass(frozen=True)
class LineRecord:
    index: int  # 1-based
    text: str
    kind: LineKind
    indent: int  # leading-whitespace width in columns, tabs = 4


@dataclass(frozen=True)
class CodeSnippet:
    language: Language
    lines: tuple[LineRecord, ...]
    origin_id: str | None = None

    def __len__(self) -> int:
        return len(self.lines)

    def line(self, index: int) -> LineRecord:
        if not 1 <= index <= len(self.lines):
            raise IndexOutOfRange(f"line {index} outside 1..{len(self.lines)}")
        return self.lines[index - 1]

    def texts(self) -> list[str]:
        return [rec.text for rec in self.lines]


def indent_width(text: str) -> int:
    """Width of leading whitespace; tabs advance to the next multiple of 4."""
    width = 0
    for ch in text:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += TAB_WIDTH - (width % TAB_WIDTH)
        else:
            break
    return width


# --- string/comment stripping -------------------------------------------
#
# Single-line lexer. String literal contents are blanked (so quoted names are
# never identifier occurrences) but f-string interpolations are kept as code.
# Cross-line constructs (triple-quoted strings, /* */ comments) are handled by
# the block scanners below, not here.

_PY_STR_PREFIX = re.compile(r"[A-Za-z]{0,3}$")


def strip_code_text(text: str, language: Language) -> str:
    if language.tag == "java":
        return _strip_java(text)
    return _strip_python(text)


def _strip_python(text: str) -> str:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            break
        if ch in "'\"":
            quote = ch
            triple = text[i : i + 3] == quote * 3
            prefix = _PY_STR_PREFIX.search(text[max(0, i - 3) : i])
            is_fstring = bool(prefix and "f" in prefix.group().lower())
            qlen = 3 if triple else 1
            j = i + qlen
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if is_fstring and text[j] == "{":
                    if text[j : j + 2] == "{{":
                        j += 2
                        continue
                    depth = 1
                    j += 1
                    expr_start = j
                    while j < n and depth:
                        if text[j] == "{":
                            depth += 1
                        elif text[j] == "}":
                            depth -= 1
                        j += 1
                    out.append(" " + text[expr_start : j - 1] + " ")
                    continue
                if text[j : j + qlen] == quote * qlen:
                    j += qlen
                    break
                j += 1
            out.append(" ")
            i = j
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def _strip_java(text: str) -> str:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if text[i : i + 2] == "//":
            break
        if text[i : i + 2] == "/*":
            end = text.find("*/", i + 2)
            if end < 0:
                break
            out.append(" ")
            i = end + 2
            continue
        if ch in "'\"":
            quote = ch
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == quote:
                    j += 1
                    break
                j += 1
            out.append(" ")
            i = j
            continue
        out.append(ch)
        i += 1
    return "".join(out)


# --- line-kind classification -------------------------------------------

_HEAD_WORD = re.compile(r"[A-Za-z_]\w*")

_PY_CONDITION_HEADS = {"if", "elif", "while"}
_PY_STRUCTURAL_HEADS = {
    "else", "try", "except", "finally", "for", "def", "class",
    "with", "async", "match", "case", "lambda",
}
_JAVA_STRUCTURAL_HEADS = {"else", "try", "finally", "do", "switch", "case", "default"}


def classify_line_kind(line: str, language: Language) -> LineKind:
    """Pure, total line classifier. Comments/strings are stripped before the
    head keyword is matched."""
    code = strip_code_text(line, language)
    stripped = code.strip()
    if not stripped:
        return LineKind.BLANK_OR_COMMENT
    if language.tag == "java":
        return _classify_java(stripped)
    return _classify_python(stripped)


def _classify_python(stripped: str) -> LineKind:
    m = _HEAD_WORD.match(stripped)
    if not m:
        return LineKind.STATEMENT
    head = m.group()
    if head in _PY_CONDITION_HEADS:
        rest = stripped[m.end() :].strip()
        # require a guard expression before the colon
        guard = rest[:-1].strip() if rest.endswith(":") else rest
        if guard:
            return LineKind.CONDITION
        return LineKind.STRUCTURAL
    if head in _PY_STRUCTURAL_HEADS:
        return LineKind.STRUCTURAL
    return LineKind.STATEMENT


def _classify_java(stripped: str) -> LineKind:
    # `} else if (...) {` and `} while (...);` start with a closing brace
    body = stripped.lstrip("}").strip().lstrip(";").strip()
    if not body:
        return LineKind.STRUCTURAL  # lone braces / `};`
    if body.startswith("else"):
        after = body[4:].lstrip()
        if after.startswith("if") and "(" in after:
            return LineKind.CONDITION
        return LineKind.STRUCTURAL
    m = _HEAD_WORD.match(body)
    head = m.group() if m else ""
    if head in ("if", "while") and "(" in body:
        return LineKind.CONDITION
    if head == "for" and "(" in body:
        inner = _java_paren_interior(body)
        if inner is not None:
            parts = _split_depth0(inner, ";")
            if len(parts) == 3 and parts[1].strip():
                return LineKind.CONDITION
        return LineKind.STRUCTURAL
    if head in _JAVA_STRUCTURAL_HEADS:
        return LineKind.STRUCTURAL
    if body.endswith("{"):
        return LineKind.STRUCTURAL  # class/method headers, bare blocks
    return LineKind.STATEMENT


def _java_paren_interior(code: str) -> str | None:
    start = code.find("(")
    if start < 0:
        return None
    depth = 0
    for i in range(start, len(code)):
        if code[i] == "(":
            depth += 1
        elif code[i] == ")":
            depth -= 1
            if depth == 0:
                return code[start + 1 : i]
    return None


def _split_depth0(code: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in code:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


# --- snippet construction and transforms --------------------------------


def normalize_source(source: str) -> str:
    """Sources end with exactly one trailing newline."""
    return source if source.endswith("\n") else source + "\n"


def split_lines(source: str, language: Language) -> CodeSnippet:
    if source == "":
        raise EmptySource("source contains no lines")
    normalized = normalize_source(source)
    raw = normalized.split("\n")
    if raw and raw[-1] == "":
        raw.pop()  # artifact of the trailing newline
    if not raw:
        raise EmptySource("source contains no lines")
    records = tuple(
        LineRecord(
            index=i + 1,
            text=text,
            kind=classify_line_kind(text, language),
            indent=indent_width(text),
        )
        for i, text in enumerate(raw)
    )
    return CodeSnippet(language=language, lines=records)


def render(snippet: CodeSnippet) -> str:
    return "\n".join(rec.text for rec in snippet.lines) + "\n"


def _reindexed(records: list[LineRecord]) -> tuple[LineRecord, ...]:
    return tuple(replace(rec, index=i + 1) for i, rec in enumerate(records))


def delete_line(snippet: CodeSnippet, i: int) -> CodeSnippet:
    n = len(snippet)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"line {i} outside 1..{n}")
    if n == 1:
        raise MinimumSizeViolation("cannot delete the only line of a snippet")
    remaining = [rec for rec in snippet.lines if rec.index != i]
    return replace(snippet, lines=_reindexed(remaining))


def insert_lines(snippet: CodeSnippet, after: int, texts: list[str]) -> CodeSnippet:
    """Insert raw lines after line `after` (0 = prepend). Inserted lines are
    classified; existing lines keep their records, reindexed."""
    if not 0 <= after <= len(snippet):
        raise IndexOutOfRange(f"boundary {after} outside 0..{len(snippet)}")
    new = [
        LineRecord(0, t, classify_line_kind(t, snippet.language), indent_width(t))
        for t in texts
    ]
    merged = list(snippet.lines[:after]) + new + list(snippet.lines[after:])
    return replace(snippet, lines=_reindexed(merged))


def python_guard_span(text: str) -> tuple[int, int] | None:
    """(start, end) of the guard expression between the head keyword and the
    last depth-0 colon, on the raw line. None when no such colon exists."""
    m = re.match(r"(\s*)(if|elif|while)\b", text)
    if not m:
        return None
    start = m.end()
    depth = 0
    colon = -1
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            break
        if ch in "'\"":
            quote = ch
            triple = text[i : i + 3] == quote * 3
            qlen = 3 if triple else 1
            i += qlen
            while i < n:
                if text[i] == "\\":
                    i += 2
                    continue
                if text[i : i + qlen] == quote * qlen:
                    i += qlen
                    break
                i += 1
            continue
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == ":" and depth == 0:
            colon = i
        i += 1
    if colon < 0:
        return None
    return start, colon


def java_guard_span(text: str) -> tuple[int, int] | None:
    """(start, end) of the guard inside the keyword's parentheses on the raw
    line. For `for(init; cond; update)` this is the middle clause. None when
    the parens do not close on this line."""
    code = text
    m = re.match(r"\s*\}?\s*(?:else\s+)?(if|while|for)\b", code)
    if not m:
        return None
    start = code.find("(", m.end())
    if start < 0:
        return None
    depth = 0
    end = -1
    in_str: str | None = None
    for i in range(start, len(code)):
        ch = code[i]
        if in_str:
            if ch == "\\":
                continue
            if ch == in_str:
                in_str = None
            continue
        if ch in "'\"":
            in_str = ch
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                end = i
                break
    if end < 0:
        return None
    if m.group(1) == "for":
        interior = code[start + 1 : end]
        parts = _split_depth0(interior, ";")
        if len(parts) == 3:
            off = start + 1 + len(parts[0]) + 1
            return _trim_span(code, off, off + len(parts[1]))
    return _trim_span(code, start + 1, end)


def _trim_span(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start] == " ":
        start += 1
    while end > start and text[end - 1] == " ":
        end -= 1
    return start, end


def extract_guard(text: str, language: Language) -> str | None:
    span = java_guard_span(text) if language.tag == "java" else python_guard_span(text)
    if span is None:
        return None
    return text[span[0] : span[1]].strip()


def mask_condition(
    snippet: CodeSnippet, i: int, mask_token: str = DEFAULT_MASK_TOKEN
) -> CodeSnippet:
    rec = snippet.line(i)
    if rec.kind is not LineKind.CONDITION:
        raise NotACondition(f"line {i} has kind {rec.kind.value}")
    text = rec.text
    if snippet.language.tag == "java":
        span = java_guard_span(text)
        if span is None:
            span = _open_guard_fallback_java(text)
        if span is None:
            raise MalformedGuard(f"cannot delimit guard on line {i}: {text!r}")
        start, end = span
        masked = text[:start] + mask_token + text[end:]
    else:
        span = python_guard_span(text)
        if span is None:
            # multi-line guard: mask from the keyword to end of code
            m = re.match(r"(\s*)(if|elif|while)\b", text)
            if not m:
                raise MalformedGuard(f"cannot delimit guard on line {i}: {text!r}")
            comment = text.find("#", m.end())
            tail = " " + text[comment:].rstrip() if comment >= 0 else ""
            masked = text[: m.end()] + " " + mask_token + tail
        else:
            start, end = span
            m = re.match(r"(\s*)(if|elif|while)\b", text)
            masked = text[: m.end()] + " " + mask_token + text[end:]
    new_rec = LineRecord(
        rec.index, masked, classify_line_kind(masked, snippet.language), rec.indent
    )
    records = list(snippet.lines)
    records[i - 1] = new_rec
    return replace(snippet, lines=tuple(records))


def _open_guard_fallback_java(text: str) -> tuple[int, int] | None:
    # guard spans physical lines; mask from '(' to end of code on this line
    m = re.match(r"\s*\}?\s*(?:else\s+)?(?:if|while|for)\b", text)
    if not m:
        return None
    start = text.find("(", m.end())
    if start < 0:
        return None
    comment = text.find("//", start)
    end = comment if comment >= 0 else len(text.rstrip())
    return start + 1, end
