"""Parametric catalog of always-false adversarial unreachable patterns.

Each pattern instantiates to a self-contained DeadBlock: fresh-variable
preamble, an always-false guard, and an inert body. Blocks never read or
write host identifiers, so stripping the inserted span restores the host
byte-exactly and the body can never execute.

Generation is a pure function of (pattern id, language, seed).
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass

from . import folding
from .code_model import (
    CodeSnippet,
    Language,
    LineKind,
    extract_guard,
    insert_lines,
    split_lines,
    strip_code_text,
)
from .errors import NoInsertionPoint, UnknownPattern, UnsupportedLanguage

BODY_INDENT = "    "

# families whose blocks remain visible to return/literal-level tools
NAIVE_FAMILIES = ("after_return", "tautology")


@dataclass(frozen=True)
class PatternSpec:
    id: str
    family: str
    languages: frozenset[str]
    arity: int
    description: str
    example: str


@dataclass(frozen=True)
class DeadBlock:
    preamble_lines: tuple[str, ...]
    guard_line: str
    body_lines: tuple[str, ...]
    pattern_id: str
    language: Language

    def all_lines(self) -> list[str]:
        return [*self.preamble_lines, self.guard_line, *self.body_lines]


@dataclass(frozen=True)
class InsertionRecord:
    mutated: CodeSnippet
    inserted_span: tuple[int, int]  # 1-based inclusive
    gold_lines: tuple[tuple[int, str], ...]  # (index, "unused" | "unreachable")
    pattern_id: str


def derive_seed(*parts) -> int:
    key = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


class _Names:
    """Seeded fresh-identifier stream: two letters, underscore, digit."""

    def __init__(self, rng: random.Random):
        self._rng = rng
        self._used: set[str] = set()

    def fresh(self) -> str:
        while True:
            name = (
                self._rng.choice("abcdefghijklmnopqrstuvwxyz")
                + self._rng.choice("abcdefghijklmnopqrstuvwxyz")
                + "_"
                + str(self._rng.randrange(10))
            )
            if name not in self._used:
                self._used.add(name)
                return name


def _inert_py(names: _Names, rng: random.Random, feed: str | None) -> str:
    target = names.fresh()
    if feed is not None and rng.random() < 0.5:
        return f"{target} = {feed} + {rng.randrange(1, 9)}"
    return f"{target} = {rng.randrange(1, 99)}"


def _inert_java(names: _Names, rng: random.Random, feed: str | None) -> str:
    target = names.fresh()
    if feed is not None and rng.random() < 0.5:
        return f"int {target} = {feed} + {rng.randrange(1, 9)};"
    return f"int {target} = {rng.randrange(1, 99)};"


# Builders return (preamble, guard, body) with block-relative indentation:
# preamble/guard flush left, body one unit deep, java blocks close with "}".


def _b_after_return(lang: str, rng: random.Random, names: _Names):
    a, k, m = names.fresh(), rng.randrange(0, 9), rng.randrange(1, 9)
    b, j = names.fresh(), rng.randrange(1, 99)
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} > {k + m}:", [
            f"{BODY_INDENT}return None",
            f"{BODY_INDENT}{b} = {j}",
        ]
    return [f"int {a} = {k};"], f"if ({a} > {k + m}) {{", [
        f"{BODY_INDENT}return;",
        f"{BODY_INDENT}int {b} = {j};",
        "}",
    ]


def _b_after_return_throw(lang: str, rng: random.Random, names: _Names):
    a, k, m = names.fresh(), rng.randrange(0, 9), rng.randrange(1, 9)
    b, j = names.fresh(), rng.randrange(1, 99)
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} > {k + m}:", [
            f"{BODY_INDENT}raise ValueError('dead path')",
            f"{BODY_INDENT}{b} = {j}",
        ]
    return [f"int {a} = {k};"], f"if ({a} > {k + m}) {{", [
        f"{BODY_INDENT}throw new RuntimeException();",
        f"{BODY_INDENT}int {b} = {j};",
        "}",
    ]


def _b_covered_branch(lang: str, rng: random.Random, names: _Names):
    a, k, t = names.fresh(), rng.randrange(0, 20), rng.randrange(0, 20)
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} > {t} and {a} <= {t}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};"], f"if ({a} > {t} && {a} <= {t}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_covered_branch_eq(lang: str, rng: random.Random, names: _Names):
    a, k, t = names.fresh(), rng.randrange(0, 20), rng.randrange(0, 20)
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} == {t} and {a} != {t}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};"], f"if ({a} == {t} && {a} != {t}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_floor_compare(lang: str, rng: random.Random, names: _Names):
    a, b = names.fresh(), names.fresh()
    k, d = rng.randrange(1, 9), rng.randrange(1, 9)
    if lang == "python":
        return [f"{a} = {k}.{d}", f"{b} = {a} // 1"], f"if {a} < {b}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, b)}",
        ]
    return [f"double {a} = {k}.{d};", f"double {b} = Math.floor({a});"], (
        f"if ({a} < {b}) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_floor_compare_int(lang: str, rng: random.Random, names: _Names):
    a, b = names.fresh(), names.fresh()
    k, d = rng.randrange(1, 9), rng.randrange(1, 9)
    if lang == "python":
        return [f"{a} = {k}.{d}", f"{b} = int({a})"], f"if {b} > {a}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, b)}",
        ]
    return [f"double {a} = {k}.{d};", f"int {b} = (int) {a};"], (
        f"if ({b} > {a}) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_after_assert(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 20)
    if lang == "python":
        return [f"{a} = {k}", f"assert {a} > 0"], f"if {a} < 0:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};", f"assert {a} > 0;"], f"if ({a} < 0) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_after_assert_range(lang: str, rng: random.Random, names: _Names):
    a, k, w = names.fresh(), rng.randrange(1, 20), rng.randrange(3, 9)
    if lang == "python":
        return [f"{a} = {k}", f"assert {a} < {k + w}"], f"if {a} >= {k + w}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};", f"assert {a} < {k + w};"], f"if ({a} >= {k + w}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_sorted_array(lang: str, rng: random.Random, names: _Names):
    a = names.fresh()
    vals = rng.sample(range(1, 50), 3)
    if lang == "python":
        inner = ", ".join(str(v) for v in vals)
        return [f"{a} = sorted([{inner}])"], f"if {a}[0] > {a}[-1]:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    inner = ", ".join(str(v) for v in sorted(vals))
    return [f"int[] {a} = {{{inner}}};"], (
        f"if ({a}[0] > {a}[{a}.length - 1]) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_sorted_array_desc(lang: str, rng: random.Random, names: _Names):
    a = names.fresh()
    vals = rng.sample(range(1, 50), 3)
    if lang == "python":
        inner = ", ".join(str(v) for v in vals)
        return [f"{a} = sorted([{inner}])"], f"if {a}[-1] < {a}[0]:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    inner = ", ".join(str(v) for v in sorted(vals))
    return [f"int[] {a} = {{{inner}}};"], (
        f"if ({a}[{a}.length - 1] < {a}[0]) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_modular_arith(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 99)
    m, j = rng.randrange(2, 6), rng.randrange(1, 4)
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} % {m} == {m + j}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};"], f"if ({a} % {m} == {m + j}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_modular_arith_even(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 50)
    if lang == "python":
        return [f"{a} = {k} * 2"], f"if {a} % 2 == 1:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k} * 2;"], f"if ({a} % 2 == 1) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_squared_nonneg(lang: str, rng: random.Random, names: _Names):
    a = names.fresh()
    k = rng.choice([v for v in range(-9, 10) if v != 0])
    if lang == "python":
        return [f"{a} = {k}"], f"if {a} * {a} < 0:", [
            f"{BODY_INDENT}{_inert_py(names, rng, a)}",
        ]
    return [f"int {a} = {k};"], f"if ({a} * {a} < 0) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, a)}",
        "}",
    ]


def _b_squared_nonneg_sum(lang: str, rng: random.Random, names: _Names):
    a, b = names.fresh(), names.fresh()
    k, m = rng.randrange(1, 9), rng.randrange(1, 9)
    if lang == "python":
        return [f"{a} = {k}", f"{b} = {m}"], (
            f"if {a} * {a} + {b} * {b} < 0:"
        ), [f"{BODY_INDENT}{_inert_py(names, rng, a)}"]
    return [f"int {a} = {k};", f"int {b} = {m};"], (
        f"if ({a} * {a} + {b} * {b} < 0) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, a)}", "}"]


_WORDS = ("pad", "tmp", "buf", "tag", "key", "raw", "end", "mid")


def _b_string_length(lang: str, rng: random.Random, names: _Names):
    a = names.fresh()
    s1, s2 = rng.choice(_WORDS), rng.choice(_WORDS)
    if lang == "python":
        return [f"{a} = '{s1}' + '{s2}'"], f"if len({a}) < 0:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f'String {a} = "{s1}" + "{s2}";'], f"if ({a}.length() < 0) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, None)}",
        "}",
    ]


def _b_string_length_concat(lang: str, rng: random.Random, names: _Names):
    a = names.fresh()
    s1, s2 = rng.choice(_WORDS), rng.choice(_WORDS)
    if lang == "python":
        return [f"{a} = '{s1}' + '{s2}'"], f"if len({a}) < {len(s1)}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f'String {a} = "{s1}" + "{s2}";'], (
        f"if ({a}.length() < {len(s1)}) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_type_contradiction(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 99)
    if lang == "python":
        return [f"{a} = int({k})"], f"if isinstance({a}, str):", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f"Object {a} = Integer.valueOf({k});"], (
        f"if ({a} instanceof String) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_type_contradiction_str(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 99)
    if lang == "python":
        return [f"{a} = str({k})"], f"if isinstance({a}, int):", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f"Object {a} = String.valueOf({k});"], (
        f"if ({a} instanceof Integer) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_tautology(lang: str, rng: random.Random, names: _Names):
    c2 = rng.randrange(0, 9)
    c1 = c2 + rng.randrange(1, 9)
    if lang == "python":
        return [], f"if {c1} < {c2}:", [f"{BODY_INDENT}{_inert_py(names, rng, None)}"]
    return [], f"if ({c1} < {c2}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, None)}",
        "}",
    ]


def _b_tautology_false(lang: str, rng: random.Random, names: _Names):
    if lang == "python":
        return [], "if False:", [f"{BODY_INDENT}{_inert_py(names, rng, None)}"]
    return [], "if (false) {", [f"{BODY_INDENT}{_inert_java(names, rng, None)}", "}"]


def _b_min_max(lang: str, rng: random.Random, names: _Names):
    a, b, c = names.fresh(), names.fresh(), names.fresh()
    v1, v2 = rng.randrange(1, 50), rng.randrange(1, 50)
    if lang == "python":
        return [f"{a} = {v1}", f"{b} = {v2}", f"{c} = min({a}, {b})"], (
            f"if {c} > {a}:"
        ), [f"{BODY_INDENT}{_inert_py(names, rng, c)}"]
    return [f"int {a} = {v1};", f"int {b} = {v2};", f"int {c} = Math.min({a}, {b});"], (
        f"if ({c} > {a}) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, c)}", "}"]


def _b_min_max_max(lang: str, rng: random.Random, names: _Names):
    a, b, c = names.fresh(), names.fresh(), names.fresh()
    v1, v2 = rng.randrange(1, 50), rng.randrange(1, 50)
    if lang == "python":
        return [f"{a} = {v1}", f"{b} = {v2}", f"{c} = max({a}, {b})"], (
            f"if {c} < {a}:"
        ), [f"{BODY_INDENT}{_inert_py(names, rng, c)}"]
    return [f"int {a} = {v1};", f"int {b} = {v2};", f"int {c} = Math.max({a}, {b});"], (
        f"if ({c} < {a}) {{"
    ), [f"{BODY_INDENT}{_inert_java(names, rng, c)}", "}"]


def _b_abs_nonneg(lang: str, rng: random.Random, names: _Names):
    a, k = names.fresh(), rng.randrange(1, 50)
    if lang == "python":
        return [f"{a} = -{k}"], f"if abs({a}) < 0:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f"int {a} = -{k};"], f"if (Math.abs({a}) < 0) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, None)}",
        "}",
    ]


def _b_abs_nonneg_shift(lang: str, rng: random.Random, names: _Names):
    a, k, m = names.fresh(), rng.randrange(1, 50), rng.randrange(1, 20)
    if lang == "python":
        return [f"{a} = {k}"], f"if abs({a}) + {m} < {m}:", [
            f"{BODY_INDENT}{_inert_py(names, rng, None)}",
        ]
    return [f"int {a} = {k};"], f"if (Math.abs({a}) + {m} < {m}) {{", [
        f"{BODY_INDENT}{_inert_java(names, rng, None)}",
        "}",
    ]


_BOTH = frozenset({"python", "java"})

_CATALOG: list[tuple[str, str, int, str, str, object]] = [
    ("after_return", "after_return", 2,
     "always-false guard whose body starts with a return",
     "x = 3; if x > 7: return None; y = 5", _b_after_return),
    ("after_return_throw", "after_return", 2,
     "always-false guard whose body starts with a raise/throw",
     "x = 3; if x > 7: raise ValueError(...)", _b_after_return_throw),
    ("covered_branch", "covered_branch", 1,
     "complementary range conditions collapsed into one contradiction",
     "x = 4; if x > 9 and x <= 9:", _b_covered_branch),
    ("covered_branch_eq", "covered_branch", 1,
     "equality and inequality on the same value conjoined",
     "x = 4; if x == 9 and x != 9:", _b_covered_branch_eq),
    ("floor_compare", "floor_compare", 2,
     "value compared below its own floor: b = floor(a); if a < b",
     "a = 3.7; b = a // 1; if a < b:", _b_floor_compare),
    ("floor_compare_int", "floor_compare", 2,
     "integer truncation compared above the source value",
     "a = 3.7; b = int(a); if b > a:", _b_floor_compare_int),
    ("after_assert", "after_assert", 1,
     "guard contradicting an immediately preceding assert",
     "a = 5; assert a > 0; if a < 0:", _b_after_assert),
    ("after_assert_range", "after_assert", 1,
     "guard outside a range pinned by an assert",
     "a = 5; assert a < 9; if a >= 9:", _b_after_assert_range),
    ("sorted_array", "sorted_array", 1,
     "first element of a sorted array compared above the last",
     "a = sorted([4, 9, 1]); if a[0] > a[-1]:", _b_sorted_array),
    ("sorted_array_desc", "sorted_array", 1,
     "last element of a sorted array compared below the first",
     "a = sorted([4, 9, 1]); if a[-1] < a[0]:", _b_sorted_array_desc),
    ("modular_arith", "modular_arith", 1,
     "remainder compared against a value at least the modulus",
     "a = 17; if a % 3 == 5:", _b_modular_arith),
    ("modular_arith_even", "modular_arith", 1,
     "doubled value tested for odd remainder",
     "a = 6 * 2; if a % 2 == 1:", _b_modular_arith_even),
    ("squared_nonneg", "squared_nonneg", 1,
     "square tested negative",
     "a = -4; if a * a < 0:", _b_squared_nonneg),
    ("squared_nonneg_sum", "squared_nonneg", 2,
     "sum of squares tested negative",
     "a = 2; b = 3; if a * a + b * b < 0:", _b_squared_nonneg_sum),
    ("string_length", "string_length", 1,
     "string length tested negative",
     "s = 'ab' + 'cd'; if len(s) < 0:", _b_string_length),
    ("string_length_concat", "string_length", 1,
     "concatenation length tested below one part",
     "s = 'ab' + 'cd'; if len(s) < 2:", _b_string_length_concat),
    ("type_contradiction", "type_contradiction", 1,
     "int-valued binding tested for string type",
     "a = int(7); if isinstance(a, str):", _b_type_contradiction),
    ("type_contradiction_str", "type_contradiction", 1,
     "string-valued binding tested for integer type",
     "a = str(7); if isinstance(a, int):", _b_type_contradiction_str),
    ("tautology", "tautology", 1,
     "comparison between literal constants that never holds",
     "if 8 < 2:", _b_tautology),
    ("tautology_false", "tautology", 1,
     "literal false guard",
     "if False:", _b_tautology_false),
    ("min_max", "min_max", 3,
     "minimum of two values tested above an operand",
     "c = min(a, b); if c > a:", _b_min_max),
    ("min_max_max", "min_max", 3,
     "maximum of two values tested below an operand",
     "c = max(a, b); if c < a:", _b_min_max_max),
    ("abs_nonneg", "abs_nonneg", 1,
     "absolute value tested negative",
     "a = -4; if abs(a) < 0:", _b_abs_nonneg),
    ("abs_nonneg_shift", "abs_nonneg", 1,
     "absolute value plus offset tested below the offset",
     "a = 4; if abs(a) + 3 < 3:", _b_abs_nonneg_shift),
]

_BY_ID = {entry[0]: entry for entry in _CATALOG}


def catalog() -> list[PatternSpec]:
    """All registered patterns, ordered by id."""
    specs = [
        PatternSpec(pid, family, _BOTH, arity, desc, example)
        for pid, family, arity, desc, example, _ in _CATALOG
    ]
    return sorted(specs, key=lambda s: s.id)


def catalog_json() -> str:
    payload = [
        {
            "id": spec.id,
            "family": spec.family,
            "languages": sorted(spec.languages),
            "description": spec.description,
            "example": spec.example,
        }
        for spec in catalog()
    ]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def is_naive_detectable(pattern_id: str) -> bool:
    if pattern_id not in _BY_ID:
        raise UnknownPattern(pattern_id)
    return _BY_ID[pattern_id][1] in NAIVE_FAMILIES


def instantiate(pattern_id: str, language: Language, seed: int) -> DeadBlock:
    if pattern_id not in _BY_ID:
        raise UnknownPattern(pattern_id)
    spec = _BY_ID[pattern_id]
    if language.tag not in _BOTH:
        raise UnsupportedLanguage(f"pattern {pattern_id} does not support {language.tag}")
    rng = random.Random(derive_seed("instantiate", pattern_id, language.tag, seed))
    names = _Names(rng)
    preamble, guard, body = spec[5](language.tag, rng, names)
    return DeadBlock(
        preamble_lines=tuple(preamble),
        guard_line=guard,
        body_lines=tuple(body),
        pattern_id=pattern_id,
        language=language,
    )


def prove_guard_false(block: DeadBlock) -> bool:
    """Constant-fold the preamble and evaluate the guard; True iff the guard
    provably evaluates false. Unprovable blocks yield False, never an error."""
    guard = extract_guard(block.guard_line, block.language)
    if guard is None:
        return False
    try:
        env = folding.fold_statements(list(block.preamble_lines), block.language)
        value = folding.eval_expr(guard, env, block.language)
    except folding.FoldError:
        return False
    return not bool(value)


# --- identifiers and insertion -------------------------------------------

_IDENT = re.compile(r"[A-Za-z_]\w*")

# names a block may mention without declaring: keywords plus the modeled
# library surface; everything else in a block is a generated fresh local
_ENV_NAMES = frozenset({
    "if", "elif", "else", "while", "for", "return", "raise", "assert", "and",
    "or", "not", "in", "is", "def", "class", "None", "True", "False", "import",
    "math", "Math", "Arrays", "Integer", "String", "Object", "Double",
    "floor", "sorted", "abs", "len", "min", "max", "int", "str", "float",
    "bool", "list", "isinstance", "instanceof", "new", "ValueError",
    "RuntimeException", "true", "false", "null", "throw", "long", "short",
    "byte", "double", "boolean", "char", "final", "var", "void",
})


def block_identifiers(block: DeadBlock) -> set[str]:
    """Fresh identifiers declared/used by the block (library names excluded)."""
    found: set[str] = set()
    for line in block.all_lines():
        code = strip_code_text(line, block.language)
        for tok in _IDENT.findall(code):
            if tok not in _ENV_NAMES:
                found.add(tok)
    return found


def snippet_identifiers(snippet: CodeSnippet) -> set[str]:
    found: set[str] = set()
    for rec in snippet.lines:
        code = strip_code_text(rec.text, snippet.language)
        found.update(_IDENT.findall(code))
    return found


_PY_TERMINATORS = re.compile(r"^(return|break|continue|raise)\b")
_JAVA_TERMINATORS = re.compile(r"^(return|break|continue|throw)\b")


def insertion_points(host: CodeSnippet) -> list[tuple[int, int]]:
    """Legal statement boundaries as (after_line, indent) pairs.

    A boundary sits after a statement line at bracket depth 0 (python) or
    inside a method body (java, brace depth >= 2), never directly after a
    control-transfer statement and never inside a string or comment that
    spans lines.
    """
    points: list[tuple[int, int]] = []
    if host.language.tag == "java":
        depth = 0
        in_block_comment = False
        for rec in host.lines:
            text = rec.text
            if in_block_comment:
                if "*/" in text:
                    in_block_comment = False
                    text = text.split("*/", 1)[1]
                else:
                    continue
            code = strip_code_text(text, host.language)
            if "/*" in rec.text and "*/" not in rec.text.split("/*", 1)[1]:
                in_block_comment = True
            depth += code.count("{") - code.count("}")
            stripped = code.strip()
            if (
                rec.kind is LineKind.STATEMENT
                and stripped.endswith(";")
                and depth >= 2
                and not _JAVA_TERMINATORS.match(stripped)
            ):
                points.append((rec.index, rec.indent))
        return points

    depth = 0
    in_triple: str | None = None
    for rec in host.lines:
        text = rec.text
        i = 0
        if in_triple:
            pos = text.find(in_triple)
            if pos < 0:
                continue
            i = pos + 3
            in_triple = None
        # track bracket depth and triple-quote state on the remainder
        n = len(text)
        while i < n:
            ch = text[i]
            if ch == "#":
                break
            if text[i : i + 3] in ("'''", '"""'):
                quote = text[i : i + 3]
                end = text.find(quote, i + 3)
                if end < 0:
                    in_triple = quote
                    break
                i = end + 3
                continue
            if ch in "'\"":
                quote = ch
                i += 1
                while i < n and text[i] != quote:
                    if text[i] == "\\":
                        i += 1
                    i += 1
                i += 1
                continue
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                depth -= 1
            i += 1
        if in_triple or depth != 0:
            continue
        code = strip_code_text(text, host.language)
        stripped = code.strip()
        if (
            rec.kind is LineKind.STATEMENT
            and not stripped.endswith("\\")
            and not _PY_TERMINATORS.match(stripped)
        ):
            points.append((rec.index, rec.indent))
    return points


def insert(host: CodeSnippet, block: DeadBlock, seed: int) -> InsertionRecord:
    """Place the block at a seeded-random legal boundary, indentation matched
    to the surrounding scope. Colliding fresh names are remapped first."""
    points = insertion_points(host)
    if not points:
        raise NoInsertionPoint("host has no legal statement boundary")
    rng = random.Random(derive_seed("insert", block.pattern_id, seed))

    host_names = snippet_identifiers(host)
    renames: dict[str, str] = {}
    for name in sorted(block_identifiers(block)):
        candidate = name
        while candidate in host_names:
            candidate = f"{name[:2]}_{rng.randrange(10, 100)}"
        if candidate != name:
            renames[name] = candidate
            host_names.add(candidate)

    lines = block.all_lines()
    if renames:
        pattern = re.compile(
            r"\b(" + "|".join(re.escape(k) for k in sorted(renames, key=len, reverse=True)) + r")\b"
        )
        lines = [pattern.sub(lambda m: renames[m.group(1)], ln) for ln in lines]

    after, indent = points[rng.randrange(len(points))]
    pad = " " * indent
    rendered = [pad + ln if ln.strip() else ln for ln in lines]
    mutated = insert_lines(host, after, rendered)

    start = after + 1
    end = after + len(rendered)
    gold: list[tuple[int, str]] = []
    n_pre = len(block.preamble_lines)
    for offset, raw in enumerate(lines):
        idx = start + offset
        if offset < n_pre:
            gold.append((idx, "unused"))
        elif raw.strip() in ("}", "};"):
            continue  # closing punctuation carries no dead-line label
        else:
            gold.append((idx, "unreachable"))
    return InsertionRecord(
        mutated=mutated,
        inserted_span=(start, end),
        gold_lines=tuple(gold),
        pattern_id=block.pattern_id,
    )


def strip_insertion(record: InsertionRecord) -> CodeSnippet:
    """Remove the inserted span; used to check reversibility."""
    start, end = record.inserted_span
    kept = [
        rec.text for rec in record.mutated.lines if not start <= rec.index <= end
    ]
    snippet = split_lines("\n".join(kept) + "\n", record.mutated.language)
    return CodeSnippet(snippet.language, snippet.lines, record.mutated.origin_id)


def split_patterns(seed: int, train_fraction: float) -> tuple[list[str], list[str]]:
    """Stratified disjoint split of catalog ids; every family with >= 2
    members lands in both halves."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = random.Random(derive_seed("split_patterns", seed))
    by_family: dict[str, list[str]] = {}
    for spec in catalog():
        by_family.setdefault(spec.family, []).append(spec.id)
    train: list[str] = []
    test: list[str] = []
    singletons: list[str] = []
    for family in sorted(by_family):
        members = sorted(by_family[family])
        rng.shuffle(members)
        if len(members) == 1:
            singletons.append(members[0])
            continue
        k = round(len(members) * train_fraction)
        k = max(1, min(len(members) - 1, k))
        train.extend(members[:k])
        test.extend(members[k:])
    rng.shuffle(singletons)
    total = len(train) + len(test) + len(singletons)
    want_train = round(total * train_fraction)
    for pid in singletons:
        if len(train) < want_train:
            train.append(pid)
        else:
            test.append(pid)
    return sorted(train), sorted(test)
