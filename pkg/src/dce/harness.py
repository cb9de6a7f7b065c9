"""Dataset synthesis, pipeline execution with ablation modes, and metrics.

Datasets are line-delimited JSON, one record per line; reports likewise.
Everything is a pure function of (inputs, seed, config); rerunning with the
same seed and replay store reproduces files byte-for-byte (timings are zeroed
under deterministic mode).
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import attribution, audit as audit_mod, llm, oracle, pattern_forge
from .attribution import CandidateSet
from .audit import AuditReport
from .classifiers import (
    ClassifierConfig,
    HeuristicClassifier,
    RemoteClassifier,
    decide_label,
    make_fixture_for_gold,
)
from .code_model import (
    DEFAULT_MASK_TOKEN,
    CodeSnippet,
    get_language,
    insert_lines,
    render,
    split_lines,
)
from .errors import (
    DceError,
    InsufficientCorpus,
    MisalignedInputs,
    NoInsertionPoint,
    PatternLeakage,
)
from .llm import LlmVerdict
from .oracle import GoldAnnotation, LineFinding
from .pattern_forge import derive_seed

MODES = ("full", "no_pivot", "no_llm", "no_attribution")
LABELS = ("normal", "unused", "unreachable", "both")
DEFAULT_RATIOS = (4, 1, 1)
DEFAULT_TAU = 2.0
DEFAULT_EPSILON = 0.02


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    language: str
    code: str
    label: str
    dead_lines: tuple[tuple[int, str], ...]
    pattern_id: str | None
    split: str  # train | dev | test

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "code": self.code,
            "label": self.label,
            "dead_lines": [[i, t] for i, t in self.dead_lines],
            "pattern_id": self.pattern_id,
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetRecord":
        return cls(
            id=data["id"],
            language=data["language"],
            code=data["code"],
            label=data["label"],
            dead_lines=tuple((int(i), str(t)) for i, t in data["dead_lines"]),
            pattern_id=data.get("pattern_id"),
            split=data["split"],
        )

    def snippet(self) -> CodeSnippet:
        return split_lines(self.code, get_language(self.language))

    def gold_annotation(self) -> GoldAnnotation:
        lines = tuple(
            LineFinding(i, t, oracle.REASON_DATASET_GOLD) for i, t in self.dead_lines
        )
        return GoldAnnotation(label=self.label, lines=lines)


@dataclass
class PipelineConfig:
    classifier_kind: str = "heuristic"
    remote: ClassifierConfig | None = None
    tau: float = DEFAULT_TAU
    epsilon: float = DEFAULT_EPSILON
    mode: str = "full"
    template_version: str = llm.TEMPLATE_VERSION
    mask_token: str = DEFAULT_MASK_TOKEN
    normal_ceiling: float | None = None
    temperature: float = llm.DEFAULT_TEMPERATURE
    max_tokens: int | None = None
    transport: object | None = None
    deterministic: bool = False
    _shared: object | None = field(default=None, repr=False)

    def fingerprint(self) -> str:
        payload = json.dumps(
            {
                "classifier": self.classifier_kind,
                "tau": self.tau,
                "epsilon": self.epsilon,
                "template_version": self.template_version,
                "mode": self.mode,
                "mask_token": self.mask_token,
                "normal_ceiling": self.normal_ceiling,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def classifier_for(self, record: DatasetRecord | None, snippet: CodeSnippet):
        if self.classifier_kind == "fixture":
            dead = list(record.dead_lines) if record is not None else []
            return make_fixture_for_gold(snippet, dead)
        if self._shared is None:
            if self.classifier_kind == "heuristic":
                self._shared = HeuristicClassifier()
            elif self.classifier_kind == "remote":
                if self.remote is None:
                    raise ValueError("remote classifier requires ClassifierConfig")
                self._shared = RemoteClassifier(self.remote)
            else:
                raise ValueError(f"unknown classifier kind {self.classifier_kind!r}")
        return self._shared


@dataclass(frozen=True)
class AnalysisReport:
    record_id: str
    predicted_label: str | None
    candidates: CandidateSet | None
    verdict: LlmVerdict | None
    audit: AuditReport | None
    timings: dict[str, float]
    config_fingerprint: str
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "predicted_label": self.predicted_label,
            "candidates": _candidates_dict(self.candidates),
            "verdict": _verdict_dict(self.verdict),
            "audit": _audit_dict(self.audit),
            "timings": self.timings,
            "config_fingerprint": self.config_fingerprint,
            "error": self.error,
        }


def _candidates_dict(c: CandidateSet | None) -> dict | None:
    if c is None:
        return None
    return {
        "unused_lines": list(c.unused_lines),
        "unreachable_lines": list(c.unreachable_lines),
        "tau": c.tau,
        "epsilon": c.epsilon,
    }


def _verdict_dict(v: LlmVerdict | None) -> dict | None:
    if v is None:
        return None
    return {
        "has_dead_code": v.has_dead_code,
        "findings": [
            {"line": f.line, "type": f.type, "explanation": f.explanation}
            for f in v.findings
        ],
        "fixed_code": v.fixed_code,
        "raw": v.raw,
        "warnings": list(v.warnings),
    }


def _audit_dict(a: AuditReport | None) -> dict | None:
    if a is None:
        return None
    return {
        "removed_all_gold": a.removed_all_gold,
        "residual_oracle_findings": [
            {"index": f.index, "type": f.type, "reason": f.reason}
            for f in a.residual_oracle_findings
        ],
        "diff_confinement": a.diff_confinement,
        "parse_ok": a.parse_ok,
    }


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


# --- corpus and dataset IO ---------------------------------------------------

_SUFFIXES = {".py": "python", ".java": "java"}


def load_corpus(directory: str | Path) -> list[CodeSnippet]:
    root = Path(directory)
    snippets = []
    for path in sorted(root.rglob("*")):
        tag = _SUFFIXES.get(path.suffix)
        if tag is None or not path.is_file():
            continue
        snippet = split_lines(path.read_text(encoding="utf-8"), get_language(tag))
        snippets.append(
            CodeSnippet(
                language=snippet.language,
                lines=snippet.lines,
                origin_id=str(path.relative_to(root)),
            )
        )
    return snippets


def write_dataset(records: list[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps_canonical(record.to_dict()) + "\n")


def read_dataset(path: str | Path) -> list[DatasetRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(DatasetRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DceError(f"{path}:{lineno}: bad dataset record: {exc}") from None
    return records


def write_reports(reports: list[AnalysisReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(dumps_canonical(report.to_dict()) + "\n")


# --- dataset synthesis -------------------------------------------------------


def _split_counts(n: int) -> tuple[int, int, int]:
    """(train, dev, test) sizes for one category, roughly 80/10/10 with dev
    and test nonempty whenever the category has at least 3 members."""
    if n < 3:
        return (n, 0, 0)
    test = max(1, round(0.1 * n))
    dev = max(1, round(0.1 * n))
    return (n - dev - test, dev, test)


def _fresh_unused_lines(
    host: CodeSnippet, rng: random.Random, count: int
) -> tuple[CodeSnippet, tuple[tuple[int, str], ...]]:
    points = pattern_forge.insertion_points(host)
    if not points:
        raise NoInsertionPoint("no legal boundary for unused injection")
    after, indent = points[rng.randrange(len(points))]
    taken = pattern_forge.snippet_identifiers(host)
    names = pattern_forge._Names(rng)
    lines = []
    for _ in range(count):
        name = names.fresh()
        while name in taken:
            name = names.fresh()
        taken.add(name)
        value = rng.randrange(1, 999)
        if host.language.tag == "java":
            lines.append(" " * indent + f"int {name} = {value};")
        else:
            lines.append(" " * indent + f"{name} = {value}")
    mutated = insert_lines(host, after, lines)
    gold = tuple((after + 1 + k, "unused") for k in range(count))
    return mutated, gold


def _pattern_cycle(ids: list[str], rng: random.Random) -> list[str]:
    """Deterministic assignment order: stealth patterns first, tool-visible
    families last, shuffled within each group."""
    stealth = sorted(p for p in ids if not pattern_forge.is_naive_detectable(p))
    naive = sorted(p for p in ids if pattern_forge.is_naive_detectable(p))
    rng.shuffle(stealth)
    rng.shuffle(naive)
    return stealth + naive


def synth_dataset(
    corpus: list[CodeSnippet],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
    pattern_split: tuple[list[str], list[str]] | None = None,
) -> list[DatasetRecord]:
    """Build a labeled dataset from clean host snippets.

    Normal records are oracle-verified hosts; unused records come from natural
    findings or injected never-read assignments; unreachable records are forge
    mutants using only their split's pattern ids. Each train-split mutant's
    clean host is retained as a hard negative.
    """
    if not corpus:
        raise InsufficientCorpus("corpus is empty")
    if any(r <= 0 for r in ratios):
        raise ValueError("ratios must be positive")
    if pattern_split is None:
        pattern_split = pattern_forge.split_patterns(seed, 0.5)
    train_ids, test_ids = list(pattern_split[0]), list(pattern_split[1])
    overlap = set(train_ids) & set(test_ids)
    if overlap:
        raise PatternLeakage(f"pattern ids in both splits: {sorted(overlap)}")
    if not train_ids or not test_ids:
        raise ValueError("both pattern splits must be nonempty")

    rng = random.Random(derive_seed("synth", seed))
    total_weight = sum(ratios)
    m = len(corpus)
    n_unreachable = max(1, round(m * ratios[2] / total_weight))
    n_unused = max(1, round(m * ratios[1] / total_weight))
    n_normal = m - n_unreachable - n_unused
    if n_normal < 1:
        raise InsufficientCorpus(
            f"corpus of {m} cannot satisfy ratios {ratios} (normal share empty)"
        )

    order = list(range(m))
    rng.shuffle(order)
    annotations = {i: oracle.annotate(corpus[i]) for i in order}
    clean = [i for i in order if annotations[i].label == "normal"]
    natural_unused = [i for i in order if annotations[i].label == "unused"]
    other = [i for i in order if i not in set(clean) | set(natural_unused)]

    # unused group prefers hosts with natural findings; mutation and normal
    # groups draw from clean hosts
    unused_hosts = (natural_unused + clean)[:n_unused]
    remaining = [i for i in natural_unused + clean if i not in set(unused_hosts)]
    clean_remaining = [i for i in remaining if annotations[i].label == "normal"]
    unreach_hosts = clean_remaining[:n_unreachable]
    normal_hosts = [i for i in clean_remaining if i not in set(unreach_hosts)]
    normal_hosts += [i for i in remaining if annotations[i].label != "normal"]
    normal_hosts += other

    records: list[DatasetRecord] = []

    def assign_splits(count: int) -> list[str]:
        train, dev, test = _split_counts(count)
        return ["train"] * train + ["dev"] * dev + ["test"] * test

    # normal records (label re-derived via oracle; clean hosts stay normal)
    splits = assign_splits(len(normal_hosts))
    for k, host_idx in enumerate(normal_hosts):
        ann = annotations[host_idx]
        records.append(
            DatasetRecord(
                id=f"normal{k:04d}",
                language=corpus[host_idx].language.tag,
                code=render(corpus[host_idx]),
                label=ann.label,
                dead_lines=tuple((f.index, f.type) for f in ann.lines),
                pattern_id=None,
                split=splits[k],
            )
        )

    # unused records
    splits = assign_splits(len(unused_hosts))
    for k, host_idx in enumerate(unused_hosts):
        host = corpus[host_idx]
        ann = annotations[host_idx]
        if ann.label == "unused":
            code, dead = render(host), tuple((f.index, f.type) for f in ann.lines)
        else:
            inj_rng = random.Random(derive_seed("inject", seed, k))
            try:
                mutated, gold = _fresh_unused_lines(host, inj_rng, 1 + k % 2)
            except NoInsertionPoint:
                continue
            merged = oracle.annotate(mutated)
            code = render(mutated)
            dead = tuple(sorted(set(gold) | {(f.index, f.type) for f in merged.lines}))
        records.append(
            DatasetRecord(
                id=f"unused{k:04d}",
                language=host.language.tag,
                code=code,
                label="unused",
                dead_lines=dead,
                pattern_id=None,
                split=splits[k],
            )
        )

    # unreachable records (mutants), train-split hosts kept as hard negatives
    splits = assign_splits(len(unreach_hosts))
    cycles = {
        "train": _pattern_cycle(train_ids, random.Random(derive_seed("cyc", seed, 0))),
        "dev": _pattern_cycle(train_ids, random.Random(derive_seed("cyc", seed, 1))),
        "test": _pattern_cycle(test_ids, random.Random(derive_seed("cyc", seed, 2))),
    }
    counters = {"train": 0, "dev": 0, "test": 0}
    for k, host_idx in enumerate(unreach_hosts):
        host = corpus[host_idx]
        split = splits[k]
        cycle = cycles[split]
        pid = cycle[counters[split] % len(cycle)]
        rseed = derive_seed("mutant", seed, k)
        block = pattern_forge.instantiate(pid, host.language, rseed)
        try:
            insertion = pattern_forge.insert(host, block, rseed)
        except NoInsertionPoint:
            continue
        counters[split] += 1
        ann = oracle.annotate(insertion.mutated, insertion)
        records.append(
            DatasetRecord(
                id=f"unreach{k:04d}",
                language=host.language.tag,
                code=render(insertion.mutated),
                label=ann.label,
                dead_lines=tuple((f.index, f.type) for f in ann.lines),
                pattern_id=pid,
                split=split,
            )
        )
        if split == "train":
            records.append(
                DatasetRecord(
                    id=f"unreach{k:04d}hn",
                    language=host.language.tag,
                    code=render(host),
                    label="normal",
                    dead_lines=(),
                    pattern_id=None,
                    split="train",
                )
            )

    _assert_no_leakage(records, train_ids, test_ids)
    return records


def _assert_no_leakage(
    records: list[DatasetRecord], train_ids: list[str], test_ids: list[str]
) -> None:
    for record in records:
        if record.pattern_id is None:
            continue
        pool = set(test_ids) if record.split == "test" else set(train_ids)
        if record.pattern_id not in pool:
            raise PatternLeakage(
                f"record {record.id} ({record.split}) uses out-of-split "
                f"pattern {record.pattern_id}"
            )


# --- pipeline ----------------------------------------------------------------


def run_pipeline(record: DatasetRecord, config: PipelineConfig) -> AnalysisReport:
    """Run one record through the configured mode. Stage failures land in the
    report's error field; they are never raised past the harness."""
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}")
    timings: dict[str, float] = {}
    started = time.perf_counter()
    fingerprint = config.fingerprint()

    predicted: str | None = None
    candidates: CandidateSet | None = None
    verdict: LlmVerdict | None = None
    report_audit: AuditReport | None = None
    error: str | None = None

    try:
        snippet = record.snippet()
    except DceError as exc:
        return AnalysisReport(
            record_id=record.id,
            predicted_label=None,
            candidates=None,
            verdict=None,
            audit=None,
            timings=_finish(timings, started, config),
            config_fingerprint=fingerprint,
            error=f"parse: {exc}",
        )

    classifier = config.classifier_for(record, snippet)

    stage = "classify"
    try:
        t = time.perf_counter()
        probs = classifier.classify(snippet)
        pivot_label = decide_label(probs, config.normal_ceiling)
        timings["classify"] = time.perf_counter() - t

        filtered = config.mode != "no_pivot" and pivot_label == "normal"
        if filtered:
            predicted = "normal"
        else:
            if config.mode != "no_attribution":
                stage = "attribute"
                t = time.perf_counter()
                scores = attribution.attribute(snippet, classifier, config.mask_token)
                candidates = attribution.select_candidates(
                    scores, config.tau, config.epsilon
                )
                timings["attribute"] = time.perf_counter() - t

            if config.mode == "no_llm":
                predicted = pivot_label
            else:
                stage = "llm"
                if config.transport is None:
                    raise DceError("no chat transport configured")
                t = time.perf_counter()
                if config.mode == "no_attribution":
                    messages = llm.build_base_prompt(snippet, config.template_version)
                else:
                    messages = llm.build_hinted_prompt(
                        snippet, candidates, config.template_version
                    )
                verdict = llm.request_verdict(
                    messages,
                    config.transport,
                    temperature=config.temperature,
                    max_tokens=config.max_tokens,
                )
                timings["llm"] = time.perf_counter() - t
                predicted = _label_from_verdict(verdict, pivot_label)

                if verdict.fixed_code is not None:
                    stage = "audit"
                    t = time.perf_counter()
                    gold = record.gold_annotation() if record.dead_lines else None
                    report_audit = audit_mod.audit(snippet, gold, verdict.fixed_code)
                    timings["audit"] = time.perf_counter() - t
    except DceError as exc:
        error = f"{stage}: {exc}"
    except Exception as exc:  # defensive: harness must not crash on one record
        error = f"{stage}: unexpected {type(exc).__name__}: {exc}"

    return AnalysisReport(
        record_id=record.id,
        predicted_label=predicted,
        candidates=candidates,
        verdict=verdict,
        audit=report_audit,
        timings=_finish(timings, started, config),
        config_fingerprint=fingerprint,
        error=error,
    )


def _label_from_verdict(verdict: LlmVerdict, pivot_label: str) -> str:
    if not verdict.has_dead_code:
        return "normal"
    kinds = {f.type for f in verdict.findings}
    if kinds == {"unused", "unreachable"}:
        return "both"
    if kinds:
        return kinds.pop()
    return pivot_label  # yes-without-findings: fall back to the pivot


def _finish(
    timings: dict[str, float], started: float, config: PipelineConfig
) -> dict[str, float]:
    timings["total"] = time.perf_counter() - started
    if config.deterministic:
        return {key: 0.0 for key in timings}
    return {key: round(value, 6) for key, value in timings.items()}


def run_batch(
    records: list[DatasetRecord], config: PipelineConfig, workers: int = 1
) -> list[AnalysisReport]:
    if workers <= 1:
        reports = [run_pipeline(r, config) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda r: run_pipeline(r, config), records))
    return sorted(reports, key=lambda r: r.record_id)


# --- metrics -------------------------------------------------------------------

_METRIC_CLASSES = ("normal", "unused", "unreachable")


def fold_label(label: str | None) -> str:
    if label == "both":
        return "unreachable"
    return label or "normal"


@dataclass(frozen=True)
class Metrics:
    per_class: dict[str, dict[str, float]]
    accuracy: float
    line_recall: float
    mean_candidate_size: float
    support: dict[str, int]
    n_records: int

    def to_dict(self) -> dict:
        return {
            "per_class": self.per_class,
            "accuracy": self.accuracy,
            "localization": {
                "line_recall": self.line_recall,
                "mean_candidate_size": self.mean_candidate_size,
            },
            "support": self.support,
            "n_records": self.n_records,
        }

    def format_table(self) -> str:
        header = f"{'class':<12} {'R':>7} {'P':>7} {'F1':>7} {'support':>8}"
        rows = [header, "-" * len(header)]
        for cls in _METRIC_CLASSES:
            m = self.per_class[cls]
            rows.append(
                f"{cls:<12} {m['recall']:>7.2f} {m['precision']:>7.2f} "
                f"{m['f1']:>7.2f} {self.support[cls]:>8d}"
            )
        rows.append(f"accuracy: {self.accuracy:.2f}  records: {self.n_records}")
        rows.append(
            f"line recall: {self.line_recall:.4f}  "
            f"mean candidate size: {self.mean_candidate_size:.2f}"
        )
        return "\n".join(rows)

    def to_csv_row(self, approach: str) -> str:
        cells = [approach]
        for cls in ("unused", "unreachable", "normal"):
            m = self.per_class[cls]
            cells.extend(
                [f"{m['recall']:.2f}", f"{m['precision']:.2f}", f"{m['f1']:.2f}"]
            )
        cells.append(f"{self.accuracy:.2f}")
        return ",".join(cells)


CSV_HEADER = (
    "approach,unused_r,unused_p,unused_f1,unreachable_r,unreachable_p,"
    "unreachable_f1,normal_r,normal_p,normal_f1,accuracy"
)


def compute_metrics(
    reports: list[AnalysisReport], golds: list[DatasetRecord]
) -> Metrics:
    by_id = {r.record_id: r for r in reports}
    gold_ids = {g.id for g in golds}
    if set(by_id) != gold_ids or len(reports) != len(golds):
        raise MisalignedInputs(
            f"{len(reports)} reports vs {len(golds)} golds; "
            f"id mismatch: {sorted(set(by_id) ^ gold_ids)[:5]}"
        )

    confusion: dict[tuple[str, str], int] = {}
    for gold in golds:
        g = fold_label(gold.label)
        p = fold_label(by_id[gold.id].predicted_label)
        confusion[(g, p)] = confusion.get((g, p), 0) + 1

    per_class: dict[str, dict[str, float]] = {}
    support: dict[str, int] = {}
    correct = 0
    for cls in _METRIC_CLASSES:
        tp = confusion.get((cls, cls), 0)
        gold_total = sum(confusion.get((cls, p), 0) for p in _METRIC_CLASSES)
        pred_total = sum(confusion.get((g, cls), 0) for g in _METRIC_CLASSES)
        recall = 100.0 * tp / gold_total if gold_total else 0.0
        precision = 100.0 * tp / pred_total if pred_total else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        per_class[cls] = {"recall": recall, "precision": precision, "f1": f1}
        support[cls] = gold_total
        correct += tp

    total = len(golds)
    accuracy = 100.0 * correct / total if total else 0.0

    line_hits = line_total = 0
    sizes: list[int] = []
    for gold in golds:
        report = by_id[gold.id]
        if gold.dead_lines:
            for idx, kind in gold.dead_lines:
                if kind not in ("unused", "unreachable"):
                    continue
                line_total += 1
                if report.candidates is not None and idx in report.candidates.lines_for(kind):
                    line_hits += 1
        if report.candidates is not None:
            for kind in ("unused", "unreachable"):
                lines = report.candidates.lines_for(kind)
                if lines:
                    sizes.append(len(lines))

    return Metrics(
        per_class=per_class,
        accuracy=accuracy,
        line_recall=line_hits / line_total if line_total else 0.0,
        mean_candidate_size=sum(sizes) / len(sizes) if sizes else 0.0,
        support=support,
        n_records=total,
    )
