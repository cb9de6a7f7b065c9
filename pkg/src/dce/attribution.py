"""Per-line dead-code attribution and soft-threshold candidate selection.

Attribution perturbs each eligible line (delete statements, mask condition
guards), re-classifies, and keeps the componentwise probability drop for the
unused/unreachable classes, clamped at zero. Structural and blank lines are
never perturbed and score (0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

from .classifiers import ClassProbabilities
from .code_model import (
    DEFAULT_MASK_TOKEN,
    CodeSnippet,
    LineKind,
    delete_line,
    mask_condition,
)
from .errors import ClassifierError, IneligibleLine, InvalidTau


@dataclass(frozen=True)
class AttributionScore:
    index: int
    a_unused: float
    a_unreachable: float


@dataclass(frozen=True)
class CandidateSet:
    unused_lines: tuple[int, ...]
    unreachable_lines: tuple[int, ...]
    tau: float
    epsilon: float

    def lines_for(self, kind: str) -> tuple[int, ...]:
        return self.unused_lines if kind == "unused" else self.unreachable_lines

    def is_empty(self) -> bool:
        return not self.unused_lines and not self.unreachable_lines


def eligible_lines(snippet: CodeSnippet) -> list[int]:
    """Lines that can be perturbed: statements and conditions. A lone
    statement cannot be deleted (snippets stay nonempty)."""
    out = []
    for rec in snippet.lines:
        if rec.kind is LineKind.CONDITION:
            out.append(rec.index)
        elif rec.kind is LineKind.STATEMENT and len(snippet) > 1:
            out.append(rec.index)
    return out


def perturb(
    snippet: CodeSnippet, i: int, mask_token: str = DEFAULT_MASK_TOKEN
) -> CodeSnippet:
    rec = snippet.line(i)
    if rec.kind is LineKind.CONDITION:
        return mask_condition(snippet, i, mask_token)
    if rec.kind is LineKind.STATEMENT:
        return delete_line(snippet, i)
    raise IneligibleLine(f"line {i} has kind {rec.kind.value}")


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def attribute(
    snippet: CodeSnippet, classifier, mask_token: str = DEFAULT_MASK_TOKEN
) -> list[AttributionScore]:
    """One base classification plus one perturbed classification per eligible
    line; scores are the clamped per-class probability drops."""
    base = classifier.classify(snippet)
    targets = eligible_lines(snippet)
    perturbed = [perturb(snippet, i, mask_token) for i in targets]
    outputs = _classify_all(classifier, perturbed, targets)

    by_index: dict[int, AttributionScore] = {}
    for i, probs in zip(targets, outputs):
        by_index[i] = AttributionScore(
            index=i,
            a_unused=_clamp01(base.p_unused - probs.p_unused),
            a_unreachable=_clamp01(base.p_unreachable - probs.p_unreachable),
        )
    return [
        by_index.get(rec.index, AttributionScore(rec.index, 0.0, 0.0))
        for rec in snippet.lines
    ]


def _classify_all(classifier, perturbed, targets) -> list[ClassProbabilities]:
    if not perturbed:
        return []
    if hasattr(classifier, "classify_batch"):
        try:
            return list(classifier.classify_batch(perturbed))
        except ClassifierError:
            pass  # fall back to singles to pinpoint the failing line
    outputs = []
    for i, snip in zip(targets, perturbed):
        try:
            outputs.append(classifier.classify(snip))
        except ClassifierError as exc:
            exc.line_index = i
            raise
    return outputs


def select_candidates(
    scores: list[AttributionScore], tau: float, epsilon: float = 0.02
) -> CandidateSet:
    """Keep lines scoring at least max/tau per class; an all-quiet class
    (max <= epsilon) yields an empty list. Ordered by score descending,
    ties by ascending index."""
    if tau < 1:
        raise InvalidTau(f"tau must be >= 1, got {tau}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")

    def pick(key) -> tuple[int, ...]:
        best = max((key(s) for s in scores), default=0.0)
        if best <= epsilon:
            return ()
        kept = [s for s in scores if key(s) >= best / tau]
        kept.sort(key=lambda s: (-key(s), s.index))
        return tuple(s.index for s in kept)

    return CandidateSet(
        unused_lines=pick(lambda s: s.a_unused),
        unreachable_lines=pick(lambda s: s.a_unreachable),
        tau=tau,
        epsilon=epsilon,
    )
