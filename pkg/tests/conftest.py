import json
from pathlib import Path

import pytest

from dce import code_model as cm

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def pad_source() -> str:
    return (FIXTURES / "pad_fields.py").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def pad_snippet(pad_source) -> cm.CodeSnippet:
    return cm.split_lines(pad_source, cm.PYTHON)


@pytest.fixture(scope="session")
def pad_gold_texts(pad_snippet):
    unused = {pad_snippet.line(4).text}
    unreachable = {pad_snippet.line(i).text for i in (5, 6, 7, 8)}
    return unused, unreachable


def load_json(name: str):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))
