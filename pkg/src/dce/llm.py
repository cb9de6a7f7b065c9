"""Prompt construction, chat transports, and verdict parsing.

Prompts are built byte-deterministically from versioned text assets; code is
sent with explicit "N: " line-number prefixes so answers anchor to lines.
The live transport speaks OpenAI-compatible chat completions; the replay
transport serves canned responses keyed by a content hash of the messages,
so the pipeline can run with zero network access.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import requests

from .attribution import CandidateSet
from .code_model import CodeSnippet
from .errors import ReplayMiss, TransportUnavailable, UnparseableVerdict

logger = logging.getLogger(__name__)

TEMPLATE_VERSION = "v1"
DEFAULT_TEMPERATURE = 0.1

ENV_BASE_URL = "DCE_LLM_BASE_URL"
ENV_API_KEY = "DCE_LLM_API_KEY"
ENV_MODEL = "DCE_LLM_MODEL"

FORMAT_REMINDER = (
    "Your previous reply could not be parsed. Respond again, exactly in the "
    "required format, starting with 'Dead code: Yes' or 'Dead code: No'."
)


@dataclass(frozen=True)
class Message:
    role: str  # "system" | "user"
    content: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


PromptMessages = tuple[Message, ...]


@dataclass(frozen=True)
class Finding:
    line: int
    type: str  # "unused" | "unreachable"
    explanation: str


@dataclass(frozen=True)
class LlmVerdict:
    has_dead_code: bool
    findings: tuple[Finding, ...]
    fixed_code: str | None
    raw: str
    warnings: tuple[str, ...] = field(default=())


def _load_template(name: str, version: str = TEMPLATE_VERSION) -> str:
    return (
        resources.files("dce.templates").joinpath(f"{name}_{version}.txt").read_text()
    )


def numbered_source(snippet: CodeSnippet) -> str:
    return "\n".join(f"{rec.index}: {rec.text}" for rec in snippet.lines)


def build_base_prompt(
    snippet: CodeSnippet, version: str = TEMPLATE_VERSION
) -> PromptMessages:
    user = _load_template("base", version).replace("{code}", numbered_source(snippet))
    return (
        Message("system", _load_template("system", version).rstrip("\n")),
        Message("user", user),
    )


def render_suspects(snippet: CodeSnippet, candidates: CandidateSet) -> str:
    if candidates.is_empty():
        return "none"
    sections = []
    for kind in ("unused", "unreachable"):
        lines = candidates.lines_for(kind)
        if not lines:
            continue
        entries = ", ".join(
            f"{i}: {snippet.line(i).text.strip()}" for i in lines
        )
        sections.append(f"{kind}: {entries}")
    return " ; ".join(sections)


def build_hinted_prompt(
    snippet: CodeSnippet,
    candidates: CandidateSet,
    version: str = TEMPLATE_VERSION,
) -> PromptMessages:
    user = (
        _load_template("hinted", version)
        .replace("{code}", numbered_source(snippet))
        .replace("{suspects}", render_suspects(snippet, candidates))
    )
    return (
        Message("system", _load_template("system", version).rstrip("\n")),
        Message("user", user),
    )


# --- transports -------------------------------------------------------------


def messages_hash(messages: PromptMessages) -> str:
    canonical = json.dumps(
        [m.to_dict() for m in messages],
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ReplayTransport:
    """Serves canned responses from <sha256-of-messages>.txt files."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def complete(
        self,
        messages: PromptMessages,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int | None = None,
    ) -> str:
        path = self.directory / f"{messages_hash(messages)}.txt"
        if not path.exists():
            raise ReplayMiss(f"no canned response at {path}")
        return path.read_text(encoding="utf-8")


class LiveTransport:
    """OpenAI-compatible chat-completions client. Credentials come from the
    environment only, never from CLI flags."""

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.timeout = timeout
        self.session = session or requests.Session()
        if not self.base_url:
            raise TransportUnavailable(f"{ENV_BASE_URL} is not configured")
        if not self.model:
            raise TransportUnavailable(f"{ENV_MODEL} is not configured")

    def complete(
        self,
        messages: PromptMessages,
        temperature: float = DEFAULT_TEMPERATURE,
        max_tokens: int | None = None,
    ) -> str:
        body: dict = {
            "model": self.model,
            "messages": [m.to_dict() for m in messages],
            "temperature": temperature,
        }
        if max_tokens is not None:
            body["max_tokens"] = max_tokens
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self.session.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportUnavailable(str(exc)) from None
        if resp.status_code != 200:
            raise TransportUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportUnavailable(f"malformed completion payload: {exc}") from None


def chat(
    messages: PromptMessages,
    transport,
    temperature: float = DEFAULT_TEMPERATURE,
    max_tokens: int | None = None,
) -> str:
    return transport.complete(messages, temperature=temperature, max_tokens=max_tokens)


# --- response parsing --------------------------------------------------------

_DEAD_CODE = re.compile(r"dead\s*code\s*:\s*(yes|no)", re.IGNORECASE)
_LINE_NUMBER = re.compile(r"^\s*line\s*number\s*:\s*(.+?)\s*$", re.IGNORECASE)
_TYPE = re.compile(r"^\s*type\s*:\s*(.+?)\s*$", re.IGNORECASE)
_EXPLANATION = re.compile(r"^\s*explanation\s*:\s*(.*)$", re.IGNORECASE)
_FIXED_CODE = re.compile(r"^\s*fixed\s*code\s*:\s*(.*)$", re.IGNORECASE)
_FENCE = re.compile(r"^```[\w-]*\s*$")


def parse_response(text: str) -> LlmVerdict:
    """Tolerant line-oriented extraction. Only a missing 'Dead code:' header
    is fatal; malformed findings are dropped with warnings."""
    header = _DEAD_CODE.search(text)
    if header is None:
        raise UnparseableVerdict("response lacks a 'Dead code:' header")
    if header.group(1).lower() == "no":
        return LlmVerdict(False, (), None, text)

    warnings: list[str] = []
    findings: list[Finding] = []
    fixed_code: str | None = None

    lines = text[header.end() :].splitlines()
    current: dict | None = None
    explaining = False

    def flush(block: dict | None):
        if block is None:
            return
        line, kind = block.get("line"), block.get("type")
        explanation = "\n".join(block.get("explanation", [])).strip()
        if line is None:
            warnings.append("finding without a line number dropped")
        elif kind is None:
            warnings.append(f"finding for line {line} has no recognized type")
        elif not explanation:
            warnings.append(f"finding for line {line} has no explanation")
        else:
            findings.append(Finding(line, kind, explanation))

    i = 0
    while i < len(lines):
        line = lines[i]
        m = _FIXED_CODE.match(line)
        if m:
            flush(current)
            current = None
            remainder = [m.group(1)] if m.group(1).strip() else []
            remainder.extend(lines[i + 1 :])
            fixed_code = _strip_fence("\n".join(remainder))
            break
        m = _LINE_NUMBER.match(line)
        if m:
            flush(current)
            current = {"explanation": []}
            explaining = False
            try:
                current["line"] = int(m.group(1).rstrip("."))
            except ValueError:
                warnings.append(f"unparseable line number {m.group(1)!r}")
            i += 1
            continue
        m = _TYPE.match(line)
        if m and current is not None:
            value = m.group(1).strip().lower()
            if "unreachable" in value:
                current["type"] = "unreachable"
            elif "unused" in value:
                current["type"] = "unused"
            else:
                warnings.append(f"unknown finding type {m.group(1)!r}")
            explaining = False
            i += 1
            continue
        m = _EXPLANATION.match(line)
        if m and current is not None:
            current["explanation"].append(m.group(1))
            explaining = True
            i += 1
            continue
        if explaining and current is not None and line.strip():
            current["explanation"].append(line)
        i += 1
    flush(current)

    if fixed_code is not None and not fixed_code.strip():
        fixed_code = None
    return LlmVerdict(True, tuple(findings), fixed_code, text, tuple(warnings))


def _strip_fence(block: str) -> str:
    lines = block.strip("\n").splitlines()
    if lines and _FENCE.match(lines[0]):
        lines = lines[1:]
        if lines and _FENCE.match(lines[-1]):
            lines = lines[:-1]
    return "\n".join(lines).strip("\n") + "\n" if lines else ""


def request_verdict(
    messages: PromptMessages,
    transport,
    temperature: float = DEFAULT_TEMPERATURE,
    max_tokens: int | None = None,
) -> LlmVerdict:
    """Chat and parse, with one retry carrying a format reminder when the
    first reply cannot be parsed."""
    raw = chat(messages, transport, temperature=temperature, max_tokens=max_tokens)
    try:
        return parse_response(raw)
    except UnparseableVerdict:
        logger.warning("unparseable verdict; retrying once with format reminder")
        retry = messages + (Message("user", FORMAT_REMINDER),)
        raw = chat(retry, transport, temperature=temperature, max_tokens=max_tokens)
        return parse_response(raw)
