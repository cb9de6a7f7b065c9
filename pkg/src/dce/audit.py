"""Audit fixed code against the removal and preservation criteria that can be
checked statically: were all gold-dead lines removed (or de-flagged), what
does the oracle still find, and how confined was the diff to dead lines.

Function preservation is not asserted; diff confinement and residual findings
are proxies. Gold lines are matched by normalized text, not index, because
fixes renumber lines.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .code_model import CodeSnippet, split_lines
from .errors import EmptySource
from .oracle import GoldAnnotation, LineFinding, REASON_INSERTED_PATTERN


@dataclass(frozen=True)
class DiffEntry:
    op: str  # kept | removed | added | modified
    orig_index: int | None
    new_index: int | None


@dataclass(frozen=True)
class AuditReport:
    removed_all_gold: bool | None  # None when no gold supplied
    residual_oracle_findings: tuple[LineFinding, ...]
    diff_confinement: float
    parse_ok: bool


def _norm(text: str) -> str:
    return " ".join(text.split())


def _is_punctuation(text: str) -> bool:
    # blank lines and lone braces are formatting; their removal is not a
    # behavioral change for confinement purposes
    return text.strip() in ("", "{", "}", "};")


def diff_lines(original: CodeSnippet, fixed: CodeSnippet) -> list[DiffEntry]:
    """LCS line diff, whitespace-insensitive with exact-match preference.
    Matched pairs whose raw texts differ are reported as modified."""
    a = original.texts()
    b = fixed.texts()
    return _diff_texts(a, b)


# lexicographic weights: any match dominates, exactness breaks ties, so the
# matching is a maximum LCS (minimal edit script) preferring exact pairs
_W_MATCH = 1 << 20
_W_EXACT = _W_MATCH + 1


def _diff_texts(a: list[str], b: list[str]) -> list[DiffEntry]:
    n, m = len(a), len(b)
    score = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, nxt = score[i], score[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                w = _W_EXACT
            elif _norm(a[i]) == _norm(b[j]):
                w = _W_MATCH
            else:
                w = 0
            best = max(nxt[j], row[j + 1])
            if w:
                best = max(best, w + nxt[j + 1])
            row[j] = best

    entries: list[DiffEntry] = []
    i = j = 0
    while i < n and j < m:
        w = _W_EXACT if a[i] == b[j] else (
            _W_MATCH if _norm(a[i]) == _norm(b[j]) else 0
        )
        if w and score[i][j] == w + score[i + 1][j + 1]:
            op = "kept" if w == _W_EXACT else "modified"
            entries.append(DiffEntry(op, i + 1, j + 1))
            i += 1
            j += 1
        elif score[i + 1][j] >= score[i][j + 1]:
            entries.append(DiffEntry("removed", i + 1, None))
            i += 1
        else:
            entries.append(DiffEntry("added", None, j + 1))
            j += 1
    while i < n:
        entries.append(DiffEntry("removed", i + 1, None))
        i += 1
    while j < m:
        entries.append(DiffEntry("added", None, j + 1))
        j += 1
    return entries


def audit(
    original: CodeSnippet, gold: GoldAnnotation | None, fixed: str
) -> AuditReport:
    try:
        fixed_snippet = split_lines(fixed, original.language)
        parse_ok = True
    except EmptySource:
        fixed_snippet = None
        parse_ok = False

    if fixed_snippet is not None:
        entries = diff_lines(original, fixed_snippet)
        residual = tuple(
            sorted(
                oracle.find_unused(fixed_snippet)
                + oracle.find_naive_unreachable(fixed_snippet),
                key=lambda f: (f.index, f.type),
            )
        )
    else:
        entries = [DiffEntry("removed", rec.index, None) for rec in original.lines]
        residual = ()

    changed = {
        e.orig_index
        for e in entries
        if e.op in ("removed", "modified")
        and e.orig_index
        and not _is_punctuation(original.line(e.orig_index).text)
    }
    gold_indices = {f.index for f in gold.lines} if gold is not None else set()
    diff_confinement = (
        1.0 if not changed else len(changed & gold_indices) / len(changed)
    )

    removed_all_gold: bool | None = None
    if gold is not None:
        removed_all_gold = all(
            _gold_line_cleared(original, finding, fixed_snippet, residual)
            for finding in gold.lines
        )

    return AuditReport(
        removed_all_gold=removed_all_gold,
        residual_oracle_findings=residual,
        diff_confinement=diff_confinement,
        parse_ok=parse_ok,
    )


def _gold_line_cleared(
    original: CodeSnippet,
    finding: LineFinding,
    fixed_snippet: CodeSnippet | None,
    residual: tuple[LineFinding, ...],
) -> bool:
    """A gold-dead line counts as eliminated when its text is gone from the
    fix, or when it survives but the oracle no longer flags it. Lines the
    oracle cannot see (inserted adversarial patterns, dataset gold) must be
    textually gone."""
    if fixed_snippet is None:
        return False
    target = _norm(original.line(finding.index).text)
    survivors = [
        rec.index for rec in fixed_snippet.lines if _norm(rec.text) == target
    ]
    if not survivors:
        return True
    if finding.reason in (REASON_INSERTED_PATTERN, oracle.REASON_DATASET_GOLD):
        return False
    residual_texts = {
        _norm(fixed_snippet.line(f.index).text) for f in residual
    }
    return target not in residual_texts
