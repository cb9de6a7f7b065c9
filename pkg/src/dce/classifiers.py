"""Pivot-classifier contract and its three implementations.

All classifiers map a snippet to a probability vector over
(normal, unused, unreachable). The heuristic kind is backed by the oracle
analyzer; the fixture kind is a deterministic test double keyed on gold line
texts; the remote kind speaks the classifier wire protocol.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import requests

from . import oracle
from .code_model import CodeSnippet, render
from .errors import RemoteMalformed, RemoteUnavailable

logger = logging.getLogger(__name__)

SIMPLEX_TOLERANCE = 1e-6
CLASS_ORDER = ("normal", "unused", "unreachable")


@dataclass(frozen=True)
class ClassProbabilities:
    p_normal: float
    p_unused: float
    p_unreachable: float

    def __post_init__(self):
        total = self.p_normal + self.p_unused + self.p_unreachable
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, not 1")
        for value in (self.p_normal, self.p_unused, self.p_unreachable):
            if not -SIMPLEX_TOLERANCE <= value <= 1.0 + SIMPLEX_TOLERANCE:
                raise ValueError(f"probability {value} outside [0, 1]")

    @classmethod
    def normalized(cls, normal: float, unused: float, unreachable: float):
        total = normal + unused + unreachable
        return cls(normal / total, unused / total, unreachable / total)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_normal, self.p_unused, self.p_unreachable)


def decide_label(probs: ClassProbabilities, normal_ceiling: float | None = None) -> str:
    """Argmax with ties broken unreachable > unused > normal. When a ceiling
    is set, a normal verdict additionally requires p_normal >= ceiling."""
    best = max(probs.as_tuple())
    if probs.p_unreachable == best:
        label = "unreachable"
    elif probs.p_unused == best:
        label = "unused"
    else:
        label = "normal"
    if label == "normal" and normal_ceiling is not None and probs.p_normal < normal_ceiling:
        if probs.p_unreachable >= probs.p_unused:
            return "unreachable"
        return "unused"
    return label


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str  # heuristic | fixture | remote
    endpoint: str | None = None
    timeout: float = 10.0
    max_retries: int = 3
    batch_size: int = 16
    backoff_base: float = 0.25

    def __post_init__(self):
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote classifier requires an endpoint")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


class HeuristicClassifier:
    """Oracle-backed stand-in for a trained pivot. Base mass (0.90, 0.05,
    0.05); each dead class gets 0.05 + 0.85 * min(1, k/2) for k findings,
    then the vector is renormalized."""

    def classify(self, snippet: CodeSnippet) -> ClassProbabilities:
        k_unused = len(oracle.find_unused(snippet))
        k_unreachable = len(oracle.find_naive_unreachable(snippet))
        return ClassProbabilities.normalized(
            0.90,
            0.05 + 0.85 * min(1.0, k_unused / 2),
            0.05 + 0.85 * min(1.0, k_unreachable / 2),
        )

    def classify_batch(self, snippets) -> list[ClassProbabilities]:
        return [self.classify(s) for s in snippets]


class FixtureClassifier:
    """Gold-aware test double. Keyed on line texts, not indices, so scores
    survive the re-indexing that leave-one-out deletion causes."""

    def __init__(self, gold_unused: set[str], gold_unreachable: set[str]):
        self.gold_unused = set(gold_unused)
        self.gold_unreachable = set(gold_unreachable)

    def classify(self, snippet: CodeSnippet) -> ClassProbabilities:
        texts = set(snippet.texts())
        present_u = sum(1 for t in self.gold_unused if t in texts)
        present_r = sum(1 for t in self.gold_unreachable if t in texts)
        p_unused = 0.05 + 0.8 * present_u / max(1, len(self.gold_unused))
        p_unreachable = 0.05 + 0.8 * present_r / max(1, len(self.gold_unreachable))
        p_normal = max(0.0, 1.0 - p_unused - p_unreachable)
        return ClassProbabilities.normalized(p_normal, p_unused, p_unreachable)

    def classify_batch(self, snippets) -> list[ClassProbabilities]:
        return [self.classify(s) for s in snippets]


# --- wire protocol ---------------------------------------------------------


def parse_probs_payload(payload: dict) -> ClassProbabilities:
    """Validate one {"probs": {...}} object against the wire schema."""
    if not isinstance(payload, dict) or not isinstance(payload.get("probs"), dict):
        raise RemoteMalformed(f"response missing probs object: {payload!r}")
    probs = payload["probs"]
    values = []
    for key in CLASS_ORDER:
        if key not in probs or not isinstance(probs[key], (int, float)):
            raise RemoteMalformed(f"probs missing numeric {key!r}: {probs!r}")
        values.append(float(probs[key]))
    try:
        return ClassProbabilities(*values)
    except ValueError as exc:
        raise RemoteMalformed(str(exc)) from None


def parse_batch_payload(payload: dict, expected: int) -> list[ClassProbabilities]:
    if not isinstance(payload, dict) or not isinstance(payload.get("results"), list):
        raise RemoteMalformed(f"batch response missing results list: {payload!r}")
    results = payload["results"]
    if len(results) != expected:
        raise RemoteMalformed(
            f"batch returned {len(results)} results for {expected} items"
        )
    return [parse_probs_payload(item) for item in results]


class RemoteClassifier:
    """Client for the classifier wire protocol with retry/backoff.

    POST {endpoint}/classify        {"language": ..., "code": ...}
    POST {endpoint}/classify_batch  {"items": [{language, code}, ...]}
    """

    def __init__(self, config: ClassifierConfig, session: requests.Session | None = None):
        if config.kind != "remote":
            raise ValueError("RemoteClassifier requires kind='remote'")
        self.config = config
        self.session = session or requests.Session()

    def _post(self, path: str, body: dict) -> dict:
        url = self.config.endpoint.rstrip("/") + path
        last_error: Exception | None = None
        for attempt in range(1, self.config.max_retries + 1):
            try:
                resp = self.session.post(url, json=body, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = exc
                logger.warning("classify attempt %d failed: %s", attempt, exc)
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()
                    except ValueError as exc:
                        raise RemoteMalformed(f"non-JSON response: {exc}") from None
                if 400 <= resp.status_code < 500:
                    raise RemoteMalformed(f"HTTP {resp.status_code}: {resp.text[:200]}")
                last_error = RemoteUnavailable(f"HTTP {resp.status_code}")
                logger.warning(
                    "classify attempt %d got HTTP %d", attempt, resp.status_code
                )
            if attempt < self.config.max_retries:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
        raise RemoteUnavailable(f"gave up after {self.config.max_retries} attempts: {last_error}")

    def classify(self, snippet: CodeSnippet) -> ClassProbabilities:
        body = {"language": snippet.language.tag, "code": render(snippet)}
        return parse_probs_payload(self._post("/classify", body))

    def classify_batch(self, snippets) -> list[ClassProbabilities]:
        snippets = list(snippets)
        out: list[ClassProbabilities] = []
        for start in range(0, len(snippets), self.config.batch_size):
            chunk = snippets[start : start + self.config.batch_size]
            body = {
                "items": [
                    {"language": s.language.tag, "code": render(s)} for s in chunk
                ]
            }
            payload = self._post("/classify_batch", body)
            out.extend(parse_batch_payload(payload, len(chunk)))
        return out


def make_fixture_for_gold(
    snippet: CodeSnippet, dead_lines: list[tuple[int, str]]
) -> FixtureClassifier:
    """Build a fixture classifier from (index, type) gold lines by resolving
    indices to line texts on the given snippet."""
    unused = {
        snippet.line(idx).text for idx, kind in dead_lines if kind == "unused"
    }
    unreachable = {
        snippet.line(idx).text for idx, kind in dead_lines if kind == "unreachable"
    }
    return FixtureClassifier(unused, unreachable)
