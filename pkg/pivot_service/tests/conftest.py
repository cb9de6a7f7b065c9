import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
REPO_TESTS = HERE.parent.parent / "tests"  # shared protocol suite lives there
sys.path.insert(0, str(REPO_TESTS))

DATASET = HERE / "fixtures" / "desk_dataset.jsonl"

# acceptance-scale training configuration; TrainConfig defaults stay at the
# published fine-tuning values, but this from-scratch desk model needs a
# higher learning rate and more epochs
TRAIN_KWARGS = dict(epochs=40, learning_rate=3e-4, patience=8, seed=0)


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    from pivot_service.train import TrainConfig, train

    out = tmp_path_factory.mktemp("artifact")
    config = TrainConfig(
        dataset=str(DATASET), output_dir=str(out / "model"), **TRAIN_KWARGS
    )
    return train(config)


@pytest.fixture(scope="session")
def train_seconds(artifact_dir):
    import json

    manifest = json.loads((artifact_dir / "manifest.json").read_text())
    return manifest["train_seconds"]
