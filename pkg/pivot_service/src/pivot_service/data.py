"""Dataset loading. Records are line-delimited JSON with at least
{id, language, code, label, split}; "both" trains as unreachable."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import LABELS


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    id: str
    language: str
    code: str
    label: int  # index into LABELS
    split: str


_LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}


def label_index(name: str) -> int:
    if name == "both":
        return _LABEL_INDEX["unreachable"]
    if name not in _LABEL_INDEX:
        raise DatasetError(f"unknown label {name!r}")
    return _LABEL_INDEX[name]


def load_dataset(path: str | Path) -> list[Sample]:
    samples: list[Sample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                samples.append(
                    Sample(
                        id=str(raw["id"]),
                        language=str(raw["language"]),
                        code=str(raw["code"]),
                        label=label_index(str(raw["label"])),
                        split=str(raw.get("split", "train")),
                    )
                )
            except (json.JSONDecodeError, KeyError, DatasetError) as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from None
    if not samples:
        raise DatasetError(f"{path}: dataset is empty")
    return samples


def split_samples(samples: list[Sample]) -> dict[str, list[Sample]]:
    out: dict[str, list[Sample]] = {"train": [], "dev": [], "test": []}
    for sample in samples:
        out.setdefault(sample.split, []).append(sample)
    if not out["train"]:
        raise DatasetError("dataset has no train split")
    return out
