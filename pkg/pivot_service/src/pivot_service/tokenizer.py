"""Code tokenizer and vocabulary for the tiny encoder.

Numeric literals collapse to <num>, string literals to <str>, line breaks to
<nl>; identifiers outside the vocabulary map to <unk>, which is itself a
useful signal since generated fresh names never recur across records.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from pathlib import Path

PAD, UNK, NUM, STR, NL = "<pad>", "<unk>", "<num>", "<str>", "<nl>"
SPECIALS = (PAD, UNK, NUM, STR, NL)

_TOKEN = re.compile(
    r"""
    (?P<str>"(?:\\.|[^"\\])*"|'(?:\\.|[^'\\])*')
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<word>[A-Za-z_]\w*)
  | (?P<op>==|!=|<=|>=|&&|\|\||//|\*\*|[-+*/%<>=!(){}\[\]:;,.])
    """,
    re.VERBOSE,
)


def tokenize(code: str) -> list[str]:
    out: list[str] = []
    for line in code.splitlines():
        for match in _TOKEN.finditer(line):
            if match.lastgroup == "str":
                out.append(STR)
            elif match.lastgroup == "num":
                out.append(NUM)
            else:
                out.append(match.group())
        out.append(NL)
    return out


class Vocab:
    def __init__(self, index: dict[str, int]):
        self.index = index

    @classmethod
    def build(cls, corpus: list[str], min_freq: int = 1, max_size: int = 4096) -> "Vocab":
        counts: Counter = Counter()
        for code in corpus:
            counts.update(tokenize(code))
        index = {tok: i for i, tok in enumerate(SPECIALS)}
        for tok, freq in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if tok in index or freq < min_freq:
                continue
            if len(index) >= max_size:
                break
            index[tok] = len(index)
        return cls(index)

    def __len__(self) -> int:
        return len(self.index)

    def encode(self, code: str, max_len: int) -> list[int]:
        unk = self.index[UNK]
        ids = [self.index.get(tok, unk) for tok in tokenize(code)[:max_len]]
        if not ids:
            ids = [unk]
        return ids

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.index, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))
