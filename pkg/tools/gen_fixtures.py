#!/usr/bin/env python3
"""Regenerate committed test fixtures: host corpus, hermetic analyze records
with their replay store and golden reports, prompt goldens, audit cases, and
the desk-scale training dataset for the pivot service.

Deterministic: rerunning produces byte-identical outputs. Outputs are
committed; this tool only runs when fixtures need to change.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from dce import attribution, code_model as cm, harness, llm, oracle, pattern_forge as pf
from dce.classifiers import make_fixture_for_gold
from dce.harness import DatasetRecord, PipelineConfig, dumps_canonical

FIXTURES = REPO / "tests" / "fixtures"

VERBS = ["sum", "tally", "count", "scan", "fold", "merge", "probe", "trace", "rank", "sift"]
NOUNS = ["items", "marks", "cells", "steps", "rows", "beads", "coins", "notes", "ticks", "links"]
WORDS = ["amber", "basil", "cedar", "delta", "ember", "fjord", "gauze", "hazel", "iris", "jade"]
CLASSES = ["Walker", "Totals", "Banner", "Peaks", "Meter", "Weaver", "Ledger", "Racks", "Gauge", "Probe"]


def _fn(rng: random.Random) -> str:
    return f"{rng.choice(VERBS)}_{rng.choice(NOUNS)}"


def py_filter_sum(rng):
    f = _fn(rng)
    a, b, c, d = (rng.randrange(1, 40) for _ in range(4))
    return f"""def {f}(values, cutoff):
    total = 0
    for v in values:
        if v > cutoff:
            total = total + v
    return total

print({f}([{a}, {b}, {c}], {d}))
"""


def py_decorate(rng):
    f = _fn(rng)
    w = rng.choice(WORDS)
    return f"""def {f}(word):
    trimmed = word.strip()
    framed = '[' + trimmed + ']'
    return framed

print({f}(' {w} '))
"""


def py_halving(rng):
    f = _fn(rng)
    k = rng.randrange(3, 60)
    return f"""def {f}(n):
    steps = 0
    while n != 1:
        if n % 2 == 0:
            n = n // 2
        else:
            n = 3 * n + 1
        steps = steps + 1
    return steps

print({f}({k}))
"""


def py_dict_count(rng):
    f = _fn(rng)
    w1, w2, w3 = rng.sample(WORDS, 3)
    return f"""def {f}(items):
    counts = {{}}
    for item in items:
        key = item[0]
        counts[key] = counts.get(key, 0) + 1
    return counts

print({f}(['{w1}', '{w2}', '{w3}']))
"""


def py_main_guard(rng):
    f = _fn(rng)
    w1, w2 = rng.sample(WORDS, 2)
    k = rng.randrange(3, 8)
    return f"""def {f}(words, limit):
    kept = []
    for w in words:
        if len(w) <= limit:
            kept.append(w)
    return kept

if __name__ == '__main__':
    print({f}(['{w1}', '{w2}'], {k}))
"""


def py_two_functions(rng):
    f, g = _fn(rng), _fn(rng)
    while g == f:
        g = _fn(rng)
    a, b, c = (rng.randrange(2, 30) for _ in range(3))
    return f"""def {g}(x, factor):
    return x * factor

def {f}(values, factor):
    acc = 0
    for v in values:
        acc = acc + {g}(v, factor)
    return acc

print({f}([{a}, {b}], {c}))
"""


def py_min_scan(rng):
    f = _fn(rng)
    a, b, c, d = (rng.randrange(1, 90) for _ in range(4))
    return f"""def {f}(values):
    low = values[0]
    for v in values:
        if v < low:
            low = v
    return low

print({f}([{a}, {b}, {c}, {d}]))
"""


def py_vowels(rng):
    f = _fn(rng)
    w = rng.choice(WORDS)
    return f"""def {f}(text):
    hits = 0
    for ch in text:
        if ch in 'aeiou':
            hits = hits + 1
    return hits

print({f}('{w}'))
"""


def py_search_flag(rng):
    f = _fn(rng)
    a, b, c = (rng.randrange(1, 50) for _ in range(3))
    return f"""def {f}(values, target):
    found = False
    for v in values:
        if v == target:
            found = True
    return found

print({f}([{a}, {b}, {c}], {b}))
"""


def py_parse_guard(rng):
    f = _fn(rng)
    k = rng.randrange(10, 99)
    return f"""def {f}(raw):
    try:
        value = int(raw)
    except ValueError:
        value = 0
    return value

print({f}('{k}'))
"""


def java_halving(rng):
    cls = rng.choice(CLASSES)
    k = rng.randrange(5, 99)
    return f"""public class {cls} {{
    public static int stepsUntil(int n) {{
        int steps = 0;
        while (n > 1) {{
            n = n / 2;
            steps = steps + 1;
        }}
        return steps;
    }}

    public static void main(String[] args) {{
        System.out.println(stepsUntil({k}));
    }}
}}
"""


def java_array_sum(rng):
    cls = rng.choice(CLASSES)
    a, b, c, d = (rng.randrange(1, 40) for _ in range(4))
    return f"""public class {cls} {{
    public static int sumAbove(int[] values, int cutoff) {{
        int total = 0;
        for (int i = 0; i < values.length; i = i + 1) {{
            if (values[i] > cutoff) {{
                total = total + values[i];
            }}
        }}
        return total;
    }}

    public static void main(String[] args) {{
        int[] data = {{{a}, {b}, {c}}};
        System.out.println(sumAbove(data, {d}));
    }}
}}
"""


def java_frame(rng):
    cls = rng.choice(CLASSES)
    w = rng.choice(WORDS)
    return f"""public class {cls} {{
    public static String frame(String word) {{
        String trimmed = word.trim();
        String framed = "[" + trimmed + "]";
        return framed;
    }}

    public static void main(String[] args) {{
        System.out.println(frame(" {w} "));
    }}
}}
"""


def java_max_scan(rng):
    cls = rng.choice(CLASSES)
    a, b, c = (rng.randrange(1, 90) for _ in range(3))
    return f"""public class {cls} {{
    public static int highest(int[] values) {{
        int best = values[0];
        for (int i = 1; i < values.length; i = i + 1) {{
            if (values[i] > best) {{
                best = values[i];
            }}
        }}
        return best;
    }}

    public static void main(String[] args) {{
        int[] row = {{{a}, {b}, {c}}};
        System.out.println(highest(row));
    }}
}}
"""


def java_modulo(rng):
    cls = rng.choice(CLASSES)
    a, b = rng.randrange(10, 60), rng.randrange(2, 7)
    return f"""public class {cls} {{
    public static int multiples(int limit, int step) {{
        int hits = 0;
        for (int i = 0; i < limit; i = i + 1) {{
            if (i % step == 0) {{
                hits = hits + 1;
            }}
        }}
        return hits;
    }}

    public static void main(String[] args) {{
        System.out.println(multiples({a}, {b}));
    }}
}}
"""


def java_repeat(rng):
    cls = rng.choice(CLASSES)
    w = rng.choice(WORDS)
    k = rng.randrange(2, 6)
    return f"""public class {cls} {{
    public static String repeat(int times) {{
        String out = "";
        for (int i = 0; i < times; i = i + 1) {{
            out = out + "{w}";
        }}
        return out;
    }}

    public static void main(String[] args) {{
        System.out.println(repeat({k}));
    }}
}}
"""


def java_counter_field(rng):
    cls = rng.choice(CLASSES)
    a, b = rng.randrange(1, 50), rng.randrange(1, 50)
    return f"""public class {cls} {{
    private int total;

    public {cls}(int opening) {{
        this.total = opening;
    }}

    public int add(int amount) {{
        total = total + amount;
        return total;
    }}

    public static void main(String[] args) {{
        {cls} box = new {cls}({a});
        System.out.println(box.add({b}));
    }}
}}
"""


PY_TEMPLATES = [
    py_filter_sum, py_decorate, py_halving, py_dict_count, py_main_guard,
    py_two_functions, py_min_scan, py_vowels, py_search_flag, py_parse_guard,
]
JAVA_TEMPLATES = [
    java_halving, java_array_sum, java_frame, java_max_scan, java_modulo,
    java_repeat, java_counter_field,
]


def make_host(kind: str, template_idx: int, seed: int) -> tuple[str, str]:
    rng = random.Random(pf.derive_seed("host", kind, template_idx, seed))
    if kind == "python":
        return PY_TEMPLATES[template_idx % len(PY_TEMPLATES)](rng), "py"
    return JAVA_TEMPLATES[template_idx % len(JAVA_TEMPLATES)](rng), "java"


def assert_clean(source: str, tag: str, context: str) -> cm.CodeSnippet:
    snippet = cm.split_lines(source, cm.get_language(tag))
    ann = oracle.annotate(snippet)
    if ann.label != "normal":
        raise SystemExit(
            f"{context}: host not oracle-clean: {ann.label} {ann.lines}\n{source}"
        )
    if not pf.insertion_points(snippet):
        raise SystemExit(f"{context}: host has no insertion points\n{source}")
    return snippet


def gen_corpus() -> None:
    corpus_dir = FIXTURES / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for old in corpus_dir.glob("*"):
        old.unlink()
    n = 0
    for i in range(36):
        source, _ = make_host("python", i, i)
        assert_clean(source, "python", f"corpus py {i}")
        (corpus_dir / f"host_py_{i:02d}.py").write_text(source, encoding="utf-8")
        n += 1
    for i in range(24):
        source, _ = make_host("java", i, i)
        assert_clean(source, "java", f"corpus java {i}")
        (corpus_dir / f"host_jv_{i:02d}.java").write_text(source, encoding="utf-8")
        n += 1
    print(f"corpus: {n} hosts")


def host_pool(count: int, start_seed: int) -> list[cm.CodeSnippet]:
    """In-memory pool for dataset synthesis (pivot training)."""
    pool = []
    for i in range(count):
        kind = "python" if i % 5 < 3 else "java"
        source, _ = make_host(kind, i, start_seed + i)
        snippet = assert_clean(source, kind, f"pool {i}")
        pool.append(
            cm.CodeSnippet(snippet.language, snippet.lines, origin_id=f"pool{i:04d}")
        )
    return pool


# --- hermetic analyze fixtures ------------------------------------------------

_EXPLANATIONS = {
    "unused": "The value assigned on line {i} is never read by any later statement.",
    "guard": "The condition on line {i} always evaluates to false, so its branch can never execute.",
    "body": "Line {i} sits inside a branch whose guard can never hold, so it never runs.",
    "after": "Line {i} follows an unconditional control transfer and can never be reached.",
}


def _explanation(snippet: cm.CodeSnippet, idx: int, kind: str) -> str:
    if kind == "unused":
        return _EXPLANATIONS["unused"].format(i=idx)
    rec = snippet.line(idx)
    if rec.kind is cm.LineKind.CONDITION:
        return _EXPLANATIONS["guard"].format(i=idx)
    stripped = rec.text.strip()
    if stripped.startswith(("return", "raise", "throw")):
        return _EXPLANATIONS["body"].format(i=idx)
    return _EXPLANATIONS["after"].format(i=idx) if "return" in stripped else _EXPLANATIONS["body"].format(i=idx)


def canned_response(record: DatasetRecord, fixed_code: str) -> str:
    snippet = record.snippet()
    blocks = []
    for idx, kind in record.dead_lines:
        label = "Unused" if kind == "unused" else "Unreachable"
        blocks.append(
            f"Line Number: {idx}\nType: {label}\n"
            f"Explanation: {_explanation(snippet, idx, kind)}\n"
        )
    fence = "```java" if record.language == "java" else "```python"
    return (
        "Dead code: Yes\n"
        + "\n".join(blocks)
        + f"\nFixed Code:\n{fence}\n{fixed_code}```\n"
    )


def _mutant_record(
    rid: str, host: cm.CodeSnippet, pattern_id: str, seed: int, split: str
) -> tuple[DatasetRecord, str]:
    block = pf.instantiate(pattern_id, host.language, seed)
    insertion = pf.insert(host, block, seed)
    ann = oracle.annotate(insertion.mutated, insertion)
    record = DatasetRecord(
        id=rid,
        language=host.language.tag,
        code=cm.render(insertion.mutated),
        label=ann.label,
        dead_lines=tuple((f.index, f.type) for f in ann.lines),
        pattern_id=pattern_id,
        split=split,
    )
    start, end = insertion.inserted_span
    fixed = "\n".join(
        rec.text for rec in insertion.mutated.lines if not start <= rec.index <= end
    ) + "\n"
    return record, fixed


def _unused_record(
    rid: str, host: cm.CodeSnippet, seed: int, count: int, split: str
) -> tuple[DatasetRecord, str]:
    rng = random.Random(pf.derive_seed("fixture-unused", seed))
    mutated, gold = harness._fresh_unused_lines(host, rng, count)
    ann = oracle.annotate(mutated)
    record = DatasetRecord(
        id=rid,
        language=host.language.tag,
        code=cm.render(mutated),
        label="unused",
        dead_lines=tuple((f.index, f.type) for f in ann.lines),
        pattern_id=None,
        split=split,
    )
    drop = {i for i, _ in gold}
    fixed = "\n".join(
        rec.text for rec in mutated.lines if rec.index not in drop
    ) + "\n"
    return record, fixed


def _normal_record(rid: str, host: cm.CodeSnippet, split: str) -> DatasetRecord:
    return DatasetRecord(
        id=rid,
        language=host.language.tag,
        code=cm.render(host),
        label="normal",
        dead_lines=(),
        pattern_id=None,
        split=split,
    )


def gen_analyze_fixtures() -> list[DatasetRecord]:
    hosts = {
        "py": [host_pool_one("python", i, 500 + i) for i in range(6)],
        "jv": [host_pool_one("java", i, 600 + i) for i in range(5)],
    }
    pad = cm.split_lines(
        (FIXTURES / "pad_fields.py").read_text(encoding="utf-8"), cm.PYTHON
    )

    records: list[DatasetRecord] = []
    fixes: dict[str, str] = {}

    records.append(_normal_record("fx01_normal_py", hosts["py"][0], "test"))
    records.append(_normal_record("fx02_normal_jv", hosts["jv"][0], "test"))
    records.append(_normal_record("fx03_normal_py", hosts["py"][1], "test"))

    r, fix = _unused_record("fx04_unused_py", hosts["py"][2], 41, 1, "test")
    records.append(r); fixes[r.id] = fix
    r, fix = _unused_record("fx05_unused_jv", hosts["jv"][1], 42, 2, "test")
    records.append(r); fixes[r.id] = fix
    r, fix = _unused_record("fx06_unused_py", hosts["py"][3], 43, 2, "test")
    records.append(r); fixes[r.id] = fix

    mutants = [
        ("fx07_unreach_py", hosts["py"][4], "sorted_array", 71),
        ("fx08_unreach_jv", hosts["jv"][2], "floor_compare", 72),
        ("fx09_unreach_py", hosts["py"][5], "after_assert", 73),
        ("fx10_unreach_jv", hosts["jv"][3], "min_max", 74),
        ("fx11_unreach_jv", hosts["jv"][4], "tautology_false", 75),
    ]
    for rid, host, pid, seed in mutants:
        r, fix = _mutant_record(rid, host, pid, seed, "test")
        records.append(r); fixes[r.id] = fix

    # a snippet carrying both kinds: natural unused plus an inserted pattern
    block = pf.instantiate("modular_arith", cm.PYTHON, 76)
    insertion = pf.insert(pad, block, 76)
    ann = oracle.annotate(insertion.mutated, insertion)
    assert ann.label == "both", ann
    r = DatasetRecord(
        id="fx12_both_py",
        language="python",
        code=cm.render(insertion.mutated),
        label="both",
        dead_lines=tuple((f.index, f.type) for f in ann.lines),
        pattern_id="modular_arith",
        split="test",
    )
    records.append(r)
    start, end = insertion.inserted_span
    drop = set(range(start, end + 1)) | {
        f.index for f in ann.lines if not start <= f.index <= end
    }
    fixes[r.id] = _drop_lines(insertion.mutated, drop)

    path = FIXTURES / "analyze_records.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps_canonical(record.to_dict()) + "\n")
    print(f"analyze records: {len(records)}")

    gen_replay(records, fixes)
    return records


def host_pool_one(kind: str, template_idx: int, seed: int) -> cm.CodeSnippet:
    source, _ = make_host(kind, template_idx, seed)
    return assert_clean(source, kind, f"analyze host {kind}/{template_idx}")


def gen_replay(records: list[DatasetRecord], fixes: dict[str, str]) -> None:
    replay_dir = FIXTURES / "replay"
    replay_dir.mkdir(parents=True, exist_ok=True)
    for old in replay_dir.glob("*.txt"):
        old.unlink()
    count = 0
    for record in records:
        if not record.dead_lines:
            continue  # filtered by the pivot; never reaches the LLM
        snippet = record.snippet()
        classifier = make_fixture_for_gold(snippet, list(record.dead_lines))
        scores = attribution.attribute(snippet, classifier)
        candidates = attribution.select_candidates(
            scores, harness.DEFAULT_TAU, harness.DEFAULT_EPSILON
        )
        messages = llm.build_hinted_prompt(snippet, candidates)
        response = canned_response(record, fixes[record.id])
        (replay_dir / f"{llm.messages_hash(messages)}.txt").write_text(
            response, encoding="utf-8"
        )
        count += 1
    print(f"replay store: {count} responses")


def gen_prompt_goldens(records: list[DatasetRecord]) -> None:
    golden_dir = FIXTURES / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    pad = cm.split_lines(
        (FIXTURES / "pad_fields.py").read_text(encoding="utf-8"), cm.PYTHON
    )
    targets = {
        "prompt_base_pad_fields": llm.build_base_prompt(pad),
        "prompt_hinted_pad_fields": llm.build_hinted_prompt(
            pad, attribution.CandidateSet((4,), (5, 6, 7, 8), 2.0, 0.02)
        ),
        "prompt_base_fx08": llm.build_base_prompt(
            [r for r in records if r.id == "fx08_unreach_jv"][0].snippet()
        ),
    }
    for name, messages in targets.items():
        payload = dumps_canonical([m.to_dict() for m in messages]) + "\n"
        (golden_dir / f"{name}.json").write_text(payload, encoding="utf-8")
    print(f"prompt goldens: {len(targets)}")


def gen_report_goldens(records: list[DatasetRecord]) -> None:
    config = PipelineConfig(
        classifier_kind="fixture",
        transport=llm.ReplayTransport(FIXTURES / "replay"),
        deterministic=True,
    )
    reports = harness.run_batch(records, config, workers=1)
    errors = [r for r in reports if r.error]
    if errors:
        raise SystemExit(f"golden run has errors: {[(r.record_id, r.error) for r in errors]}")
    harness.write_reports(reports, FIXTURES / "golden" / "analyze_reports.jsonl")
    print(f"report goldens: {len(reports)}")


# --- audit cases ----------------------------------------------------------------


def gen_audit_cases() -> None:
    cases = []
    pool = host_pool(40, 2000)
    for i in range(20):  # unused-class cases
        host = pool[i]
        rng = random.Random(pf.derive_seed("audit-unused", i))
        mutated, gold = harness._fresh_unused_lines(host, rng, 1 + i % 2)
        record_code = cm.render(mutated)
        drop = {g[0] for g in gold}
        variant = i % 3
        if variant == 0:
            fixed = _drop_lines(mutated, drop)
            judgment = "positive"
        elif variant == 1:
            partial = set(list(sorted(drop))[:-1]) or set()
            fixed = _drop_lines(mutated, partial) if partial else record_code
            judgment = "negative"  # at least one gold line survives
        else:
            live = _first_live_statement(mutated, drop)
            fixed = _drop_lines(mutated, drop | {live})
            judgment = "negative"  # touches a live line
        cases.append(
            {
                "name": f"unused_case_{i:02d}",
                "language": host.language.tag,
                "original": record_code,
                "gold": [[idx, kind] for idx, kind in gold],
                "fixed": fixed,
                "judgment": judgment,
            }
        )
    for i in range(20):  # unreachable-class cases
        host = pool[20 + i]
        pid = pf.catalog()[i % len(pf.catalog())].id
        block = pf.instantiate(pid, host.language, 3000 + i)
        insertion = pf.insert(host, block, 3000 + i)
        mutated = insertion.mutated
        record_code = cm.render(mutated)
        start, end = insertion.inserted_span
        span = set(range(start, end + 1))
        variant = i % 3
        if variant == 0:
            fixed = _drop_lines(mutated, span)
            judgment = "positive"
        elif variant == 1:
            keep_guard = {idx for idx, kind in insertion.gold_lines if kind == "unreachable"}
            fixed = _drop_lines(mutated, keep_guard - {min(keep_guard)})
            judgment = "negative"  # guard line survives
        else:
            live = _first_live_statement(mutated, span)
            fixed = _drop_lines(mutated, span | {live})
            judgment = "negative"
        cases.append(
            {
                "name": f"unreachable_case_{i:02d}",
                "language": host.language.tag,
                "original": record_code,
                "gold": [[idx, kind] for idx, kind in insertion.gold_lines],
                "fixed": fixed,
                "judgment": judgment,
            }
        )
    path = FIXTURES / "audit_cases.json"
    path.write_text(json.dumps(cases, indent=2) + "\n", encoding="utf-8")
    print(f"audit cases: {len(cases)}")


def _drop_lines(snippet: cm.CodeSnippet, indices: set[int]) -> str:
    kept = [rec.text for rec in snippet.lines if rec.index not in indices]
    return "\n".join(kept) + "\n"


def _first_live_statement(snippet: cm.CodeSnippet, excluded: set[int]) -> int:
    for rec in snippet.lines:
        if rec.index in excluded:
            continue
        if rec.kind is cm.LineKind.STATEMENT:
            return rec.index
    raise SystemExit("no live statement to remove")


# --- pivot training dataset ------------------------------------------------------


def gen_pivot_dataset() -> None:
    out_dir = REPO / "pivot_service" / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    pool = host_pool(240, 10_000)
    split = pf.split_patterns(seed=11, train_fraction=0.5)
    records = harness.synth_dataset(pool, ratios=(2, 1, 1), seed=11, pattern_split=split)
    harness.write_dataset(records, out_dir / "desk_dataset.jsonl")
    by = {}
    for r in records:
        by[(r.split, r.label)] = by.get((r.split, r.label), 0) + 1
    print(f"pivot dataset: {len(records)} records; {sorted(by.items())}")


def main() -> None:
    gen_corpus()
    records = gen_analyze_fixtures()
    gen_prompt_goldens(records)
    gen_report_goldens(records)
    gen_audit_cases()
    gen_pivot_dataset()


if __name__ == "__main__":
    main()
