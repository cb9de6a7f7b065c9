"""Training loop: fit the tiny encoder on a dataset JSONL and write a model
artifact directory (weights, vocab, manifest with dev metrics)."""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from . import LABELS
from .data import Sample, load_dataset, split_samples
from .model import TinyCodeEncoder, pad_batch
from .tokenizer import Vocab

MANIFEST_NAME = "manifest.json"
WEIGHTS_NAME = "weights.pt"
VOCAB_NAME = "vocab.json"
BASE_MODEL_ID = "tiny-code-encoder-v1"


@dataclass
class TrainConfig:
    dataset: str
    output_dir: str
    base_model: str = BASE_MODEL_ID
    epochs: int = 3
    batch_size: int = 16
    learning_rate: float = 5e-5
    seed: int = 0
    max_len: int = 192
    dim: int = 64
    layers: int = 2
    heads: int = 4
    patience: int = 5
    min_freq: int = 1


def _dataset_fingerprint(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _evaluate(model, vocab, samples: list[Sample], max_len: int) -> dict:
    model.eval()
    correct = 0
    confusion = [[0] * len(LABELS) for _ in LABELS]
    with torch.no_grad():
        for start in range(0, len(samples), 64):
            chunk = samples[start : start + 64]
            ids, mask = pad_batch(
                [vocab.encode(s.code, max_len) for s in chunk], max_len
            )
            pred = model(ids, mask).argmax(dim=1)
            for sample, p in zip(chunk, pred.tolist()):
                confusion[sample.label][p] += 1
                correct += int(p == sample.label)
    per_class = {}
    for i, name in enumerate(LABELS):
        support = sum(confusion[i])
        hits = confusion[i][i]
        per_class[name] = {
            "recall": hits / support if support else 0.0,
            "support": support,
        }
    dead_total = sum(sum(confusion[i]) for i in (1, 2))
    dead_hits = sum(confusion[i][j] for i in (1, 2) for j in (1, 2))
    return {
        "accuracy": correct / len(samples) if samples else 0.0,
        "per_class": per_class,
        "dead_recall_pooled": dead_hits / dead_total if dead_total else 0.0,
        "n": len(samples),
    }


def train(config: TrainConfig) -> Path:
    """Fit on the train split, early-stop on dev pooled dead recall plus
    accuracy, and write the artifact directory. Returns its path."""
    started = time.perf_counter()
    torch.manual_seed(config.seed)
    random.seed(config.seed)

    samples = load_dataset(config.dataset)
    splits = split_samples(samples)
    train_set = splits["train"]
    dev_set = splits["dev"] or splits["train"]

    vocab = Vocab.build([s.code for s in train_set], min_freq=config.min_freq)
    model = TinyCodeEncoder(
        vocab_size=len(vocab),
        num_classes=len(LABELS),
        dim=config.dim,
        heads=config.heads,
        layers=config.layers,
        max_len=config.max_len,
    )

    counts = [max(1, sum(1 for s in train_set if s.label == i)) for i in range(len(LABELS))]
    weights = torch.tensor(
        [len(train_set) / (len(LABELS) * c) for c in counts], dtype=torch.float32
    )
    criterion = nn.CrossEntropyLoss(weight=weights)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    encoded = [(vocab.encode(s.code, config.max_len), s.label) for s in train_set]
    rng = random.Random(config.seed)

    best_score = -1.0
    best_state = None
    best_metrics: dict = {}
    stale = 0
    epochs_run = 0
    for epoch in range(config.epochs):
        epochs_run = epoch + 1
        model.train()
        order = list(range(len(encoded)))
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            batch = [encoded[i] for i in order[start : start + config.batch_size]]
            ids, mask = pad_batch([seq for seq, _ in batch], config.max_len)
            labels = torch.tensor([label for _, label in batch], dtype=torch.long)
            optimizer.zero_grad()
            loss = criterion(model(ids, mask), labels)
            loss.backward()
            optimizer.step()

        metrics = _evaluate(model, vocab, dev_set, config.max_len)
        score = metrics["dead_recall_pooled"] + metrics["accuracy"]
        if score > best_score:
            best_score = score
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
            best_metrics = metrics
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out / WEIGHTS_NAME)
    vocab.save(out / VOCAB_NAME)
    manifest = {
        "base_model": config.base_model,
        "dataset_fingerprint": _dataset_fingerprint(config.dataset),
        "dev_metrics": best_metrics,
        "labels": list(LABELS),
        "vocab_size": len(vocab),
        "config": asdict(config),
        "epochs_run": epochs_run,
        "train_seconds": round(time.perf_counter() - started, 3),
    }
    (out / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out


def load_artifact(model_dir: str | Path) -> tuple[TinyCodeEncoder, Vocab, dict]:
    model_dir = Path(model_dir)
    manifest_path = model_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    vocab = Vocab.load(model_dir / VOCAB_NAME)
    cfg = manifest["config"]
    model = TinyCodeEncoder(
        vocab_size=manifest["vocab_size"],
        num_classes=len(manifest["labels"]),
        dim=cfg["dim"],
        heads=cfg["heads"],
        layers=cfg["layers"],
        max_len=cfg["max_len"],
    )
    model.load_state_dict(torch.load(model_dir / WEIGHTS_NAME, weights_only=True))
    model.eval()
    return model, vocab, manifest
