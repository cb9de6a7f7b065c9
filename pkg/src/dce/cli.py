"""Single executable for the pipeline: dataset synthesis, analysis,
attribution inspection, evaluation, patch audit, and the pattern catalog.

Option precedence: flags > environment > config file > defaults. Transport
credentials come only from the environment (DCE_LLM_BASE_URL, DCE_LLM_API_KEY,
DCE_LLM_MODEL), never from flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import harness, llm, oracle, pattern_forge
from .classifiers import ClassifierConfig
from .code_model import get_language, split_lines
from .errors import DceError
from .harness import (
    DEFAULT_EPSILON,
    DEFAULT_TAU,
    AnalysisReport,
    DatasetRecord,
    PipelineConfig,
    dumps_canonical,
)

_ENV_PREFIX = "DCE_"


def _resolve(flag_value, env_key: str | None, config: dict, config_key: str, default):
    if flag_value is not None:
        return flag_value
    if env_key is not None:
        raw = os.environ.get(_ENV_PREFIX + env_key)
        if raw is not None:
            return type(default)(raw) if default is not None else raw
    if config_key in config:
        return config[config_key]
    return default


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DceError(f"config file {path} must hold a JSON object")
    return data


def _add_classifier_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--classifier", choices=["heuristic", "fixture", "remote"], default=None,
        help="pivot classifier kind (default heuristic)",
    )
    parser.add_argument("--endpoint", default=None, help="remote classifier URL")
    parser.add_argument(
        "--tau", type=float, default=None,
        help=f"soft threshold scale, >= 1 (default {DEFAULT_TAU})",
    )
    parser.add_argument(
        "--epsilon", type=float, default=None,
        help=f"noise floor for candidate sets (default {DEFAULT_EPSILON})",
    )
    parser.add_argument(
        "--mode", choices=list(harness.MODES), default=None,
        help="pipeline ablation mode (default full)",
    )
    parser.add_argument(
        "--replay", default=None, metavar="DIR",
        help="serve LLM responses from this replay store (hermetic)",
    )
    parser.add_argument(
        "--live", action="store_true",
        help="use the live chat endpoint configured in the environment",
    )
    parser.add_argument(
        "--normal-ceiling", type=float, default=None,
        help="require p_normal >= this to accept a normal verdict",
    )
    parser.add_argument(
        "--deterministic", action="store_true",
        help="zero timings so report files are byte-reproducible",
    )


def _pipeline_config(args, config: dict) -> PipelineConfig:
    kind = _resolve(args.classifier, "CLASSIFIER", config, "classifier", "heuristic")
    remote = None
    if kind == "remote":
        endpoint = _resolve(args.endpoint, "ENDPOINT", config, "endpoint", None)
        if not endpoint:
            raise DceError("remote classifier requires --endpoint")
        remote = ClassifierConfig(kind="remote", endpoint=endpoint)
    transport = None
    if args.replay:
        transport = llm.ReplayTransport(args.replay)
    elif args.live:
        transport = llm.LiveTransport()
    return PipelineConfig(
        classifier_kind=kind,
        remote=remote,
        tau=_resolve(args.tau, "TAU", config, "tau", DEFAULT_TAU),
        epsilon=_resolve(args.epsilon, "EPSILON", config, "epsilon", DEFAULT_EPSILON),
        mode=_resolve(args.mode, "MODE", config, "mode", "full"),
        normal_ceiling=args.normal_ceiling,
        transport=transport,
        deterministic=args.deterministic,
    )


def _records_from_args(args) -> list[DatasetRecord]:
    records: list[DatasetRecord] = []
    if getattr(args, "data", None):
        records.extend(harness.read_dataset(args.data))
    for path in getattr(args, "files", []) or []:
        p = Path(path)
        tag = {".py": "python", ".java": "java"}.get(p.suffix)
        if tag is None:
            raise DceError(f"cannot infer language of {path} (expected .py or .java)")
        records.append(
            DatasetRecord(
                id=p.name,
                language=tag,
                code=p.read_text(encoding="utf-8"),
                label="normal",
                dead_lines=(),
                pattern_id=None,
                split="test",
            )
        )
    if not records:
        raise DceError("nothing to analyze: pass files or --data")
    return records


def _emit_reports(reports: list[AnalysisReport], out: str | None) -> None:
    text = "".join(dumps_canonical(r.to_dict()) + "\n" for r in reports)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------


def _cmd_synth(args, config: dict) -> int:
    corpus = harness.load_corpus(args.corpus)
    ratios = tuple(float(x) for x in args.ratios.split(":"))
    if len(ratios) != 3:
        raise DceError("--ratios must be normal:unused:unreachable")
    split = pattern_forge.split_patterns(args.pattern_seed, args.train_fraction)
    records = harness.synth_dataset(
        corpus, ratios=ratios, seed=args.seed, pattern_split=split
    )
    harness.write_dataset(records, args.out)
    counts: dict[str, int] = {}
    for record in records:
        counts[record.label] = counts.get(record.label, 0) + 1
    by_split: dict[str, int] = {}
    for record in records:
        by_split[record.split] = by_split.get(record.split, 0) + 1
    print(f"wrote {len(records)} records to {args.out}")
    print("labels: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    print("splits: " + ", ".join(f"{k}={v}" for k, v in sorted(by_split.items())))
    print(f"train patterns: {len(split[0])}, test patterns: {len(split[1])}")
    return 0


def _cmd_analyze(args, config: dict) -> int:
    records = _records_from_args(args)
    if args.oracle_only:
        lines = []
        for record in records:
            snippet = record.snippet()
            findings = oracle.find_unused(snippet) + oracle.find_naive_unreachable(
                snippet
            )
            for f in sorted(findings, key=lambda f: (f.index, f.type)):
                lines.append(
                    dumps_canonical(
                        {
                            "id": record.id,
                            "index": f.index,
                            "type": f.type,
                            "reason": f.reason,
                        }
                    )
                )
        output = "".join(line + "\n" for line in lines)
        if args.out:
            Path(args.out).write_text(output, encoding="utf-8")
        else:
            sys.stdout.write(output)
        return 0
    pipeline = _pipeline_config(args, config)
    reports = harness.run_batch(records, pipeline, workers=args.workers)
    _emit_reports(reports, args.out)
    if args.strict and any(r.error for r in reports):
        return 1
    return 0


def _cmd_attribute(args, config: dict) -> int:
    from . import attribution

    records = _records_from_args(args)
    pipeline = _pipeline_config(args, config)
    for record in records:
        snippet = record.snippet()
        classifier = pipeline.classifier_for(record, snippet)
        scores = attribution.attribute(snippet, classifier)
        candidates = attribution.select_candidates(
            scores, pipeline.tau, pipeline.epsilon
        )
        for score in scores:
            selected = [
                kind
                for kind in ("unused", "unreachable")
                if score.index in candidates.lines_for(kind)
            ]
            sys.stdout.write(
                dumps_canonical(
                    {
                        "index": score.index,
                        "a_unused": score.a_unused,
                        "a_unreachable": score.a_unreachable,
                        "selected": selected,
                    }
                )
                + "\n"
            )
    return 0


def _cmd_eval(args, config: dict) -> int:
    records = harness.read_dataset(args.data)
    if args.split != "all":
        records = [r for r in records if r.split == args.split]
    if not records:
        raise DceError(f"no records in split {args.split!r}")
    pipeline = _pipeline_config(args, config)
    reports = harness.run_batch(records, pipeline, workers=args.workers)
    metrics = harness.compute_metrics(reports, records)
    print(metrics.format_table())
    if args.metrics_out:
        Path(args.metrics_out).write_text(
            json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"metrics written to {args.metrics_out}")
    if args.csv:
        Path(args.csv).write_text(
            harness.CSV_HEADER + "\n" + metrics.to_csv_row(args.approach) + "\n",
            encoding="utf-8",
        )
    if args.reports_out:
        harness.write_reports(reports, args.reports_out)
    if args.strict and any(r.error for r in reports):
        return 1
    return 0


def _cmd_audit(args, config: dict) -> int:
    from . import audit as audit_mod
    from .oracle import GoldAnnotation, LineFinding, REASON_DATASET_GOLD

    path = Path(args.original)
    tag = {".py": "python", ".java": "java"}.get(path.suffix)
    if tag is None:
        raise DceError("cannot infer language of original file")
    original = split_lines(path.read_text(encoding="utf-8"), get_language(tag))
    fixed = Path(args.fixed).read_text(encoding="utf-8")
    gold = None
    if args.gold:
        entries = json.loads(Path(args.gold).read_text(encoding="utf-8"))
        lines = tuple(
            LineFinding(int(i), str(t), REASON_DATASET_GOLD) for i, t in entries
        )
        kinds = {f.type for f in lines}
        label = "both" if kinds == {"unused", "unreachable"} else (
            kinds.pop() if kinds else "normal"
        )
        gold = GoldAnnotation(label=label, lines=lines)
    report = audit_mod.audit(original, gold, fixed)
    sys.stdout.write(dumps_canonical(harness._audit_dict(report)) + "\n")
    return 0


def _cmd_patterns(args, config: dict) -> int:
    payload = pattern_forge.catalog_json()
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"catalog written to {args.out}")
    else:
        sys.stdout.write(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dce",
        description="dead-code detection, localization, and repair pipeline",
    )
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument(
        "--workers", type=int, default=None,
        help="parallel workers (default: logical cores)",
    )
    parser.add_argument(
        "--strict", action="store_true",
        help="exit 1 when any record-level stage fails",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a labeled dataset from a corpus")
    p.add_argument("--corpus", required=True, help="directory of .py/.java hosts")
    p.add_argument("--out", required=True, help="output dataset JSONL")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--ratios", default="4:1:1", help="normal:unused:unreachable (default 4:1:1)"
    )
    p.add_argument("--pattern-seed", type=int, default=0)
    p.add_argument(
        "--train-fraction", type=float, default=0.5,
        help="fraction of patterns reserved for train (default 0.5)",
    )
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("analyze", help="run the pipeline over files or a dataset")
    p.add_argument("files", nargs="*", help="source files (.py/.java)")
    p.add_argument("--data", default=None, help="dataset JSONL to analyze")
    p.add_argument("--out", default=None, help="write reports here (default stdout)")
    p.add_argument(
        "--oracle-only", action="store_true",
        help="emit oracle findings as JSON lines and skip the pipeline",
    )
    _add_classifier_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("attribute", help="per-line attribution scores for files")
    p.add_argument("files", nargs="*", help="source files (.py/.java)")
    p.add_argument("--data", default=None, help="dataset JSONL")
    _add_classifier_flags(p)
    p.set_defaults(func=_cmd_attribute)

    p = sub.add_parser("eval", help="run the pipeline over a split and score it")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument(
        "--split", default="test", choices=["train", "dev", "test", "all"]
    )
    p.add_argument("--metrics-out", default=None, help="write metrics JSON here")
    p.add_argument("--csv", default=None, help="write a metrics CSV row here")
    p.add_argument("--approach", default="pipeline", help="CSV row label")
    p.add_argument("--reports-out", default=None, help="write reports JSONL here")
    _add_classifier_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("audit", help="audit a fixed file against its original")
    p.add_argument("--original", required=True)
    p.add_argument("--fixed", required=True)
    p.add_argument(
        "--gold", default=None, help="JSON file of gold [line, type] pairs"
    )
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("patterns", help="print the pattern catalog")
    p.add_argument("--out", default=None, help="write forge.json here")
    p.set_defaults(func=_cmd_patterns)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args.config)
        if args.workers is None:
            args.workers = int(
                _resolve(None, "WORKERS", config, "workers", os.cpu_count() or 1)
            )
        return args.func(args, config)
    except DceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
