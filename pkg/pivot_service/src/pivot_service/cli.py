"""Command line: train an artifact, serve it, or print its manifest."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .train import MANIFEST_NAME, TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pivot-service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a dataset JSONL")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="artifact output directory")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--learning-rate", type=float, default=5e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patience", type=int, default=5)

    p = sub.add_parser("serve", help="serve an artifact over HTTP")
    p.add_argument("--model", required=True, help="artifact directory")
    p.add_argument("--bind", default="127.0.0.1:8321", help="host:port")

    p = sub.add_parser("manifest", help="print an artifact manifest")
    p.add_argument("--model", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        config = TrainConfig(
            dataset=args.dataset,
            output_dir=args.out,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            seed=args.seed,
            patience=args.patience,
        )
        out = train(config)
        manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
        dev = manifest["dev_metrics"]
        print(f"artifact: {out}")
        print(
            f"dev accuracy {dev['accuracy']:.3f}, "
            f"pooled dead recall {dev['dead_recall_pooled']:.3f}, "
            f"epochs run {manifest['epochs_run']}"
        )
        return 0
    if args.command == "serve":
        import uvicorn

        from .server import create_app

        host, _, port = args.bind.rpartition(":")
        app = create_app(args.model)
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
        return 0
    if args.command == "manifest":
        path = Path(args.model) / MANIFEST_NAME
        print(path.read_text(encoding="utf-8"), end="")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
