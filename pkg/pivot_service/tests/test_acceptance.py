"""Secondary acceptance: wire conformance via the shared protocol suite and
the scaled learning check on the held-out dev split."""

import json
import os
import socket
import subprocess
import sys
import time
from pathlib import Path

import requests
from fastapi.testclient import TestClient

from pivot_service.server import create_app

from conftest import DATASET
from fake_server import run_protocol_suite


class TestSecondaryAcceptance:
    def test_wire_conformance(self, artifact_dir):
        """The service passes the same protocol fixture suite the gateway's
        fake server is tested with (schema, simplex, batch ordering)."""
        client = TestClient(create_app(artifact_dir))

        def post(path, body):
            resp = client.post(path, json=body)
            try:
                return resp.status_code, resp.json()
            except ValueError:
                return resp.status_code, None

        run_protocol_suite(post)
        print("PASS wire-conformance: shared protocol suite green")

    def test_scaled_learning_check(self, artifact_dir, train_seconds):
        """Pooled dead-class recall >= 0.85 on the held-out dev split, trained
        well within the 15-minute budget."""
        manifest = json.loads((artifact_dir / "manifest.json").read_text())
        dev = manifest["dev_metrics"]
        assert dev["dead_recall_pooled"] >= 0.85
        assert train_seconds < 15 * 60
        print(
            f"PASS scaled-learning: dev pooled dead recall "
            f"{dev['dead_recall_pooled']:.3f} (n={dev['n']}), "
            f"trained in {train_seconds:.0f}s"
        )

    def test_gateway_client_against_live_service(self, artifact_dir):
        """End-to-end interop: the remote classifier client talks to a real
        served instance over HTTP."""
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]

        src_dir = Path(__file__).parent.parent / "src"
        env = dict(os.environ)
        env["PYTHONPATH"] = str(src_dir) + os.pathsep + env.get("PYTHONPATH", "")
        proc = subprocess.Popen(
            [
                sys.executable, "-m", "pivot_service.cli", "serve",
                "--model", str(artifact_dir),
                "--bind", f"127.0.0.1:{port}",
            ],
            env=env,
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        base = f"http://127.0.0.1:{port}"
        try:
            deadline = time.time() + 30
            while time.time() < deadline:
                try:
                    if requests.get(f"{base}/healthz", timeout=1).status_code == 200:
                        break
                except requests.RequestException:
                    time.sleep(0.2)
            else:
                raise AssertionError("service did not become healthy in 30s")

            from dce.classifiers import ClassifierConfig, RemoteClassifier
            from dce.code_model import PYTHON, split_lines

            client = RemoteClassifier(
                ClassifierConfig(kind="remote", endpoint=base, batch_size=4)
            )
            snippets = [
                split_lines(f"total = {i}\nprint(total)\n", PYTHON) for i in range(6)
            ]
            batched = client.classify_batch(snippets)
            assert len(batched) == 6
            for probs in batched:
                assert abs(sum(probs.as_tuple()) - 1.0) <= 1e-6
            single = client.classify(snippets[0])
            assert abs(sum(single.as_tuple()) - 1.0) <= 1e-6
            print("PASS gateway-interop: remote client served over live HTTP")
        finally:
            proc.terminate()
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()
