import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from dce import llm
from dce.attribution import CandidateSet
from dce.errors import ReplayMiss, TransportUnavailable, UnparseableVerdict
from dce.harness import dumps_canonical

from conftest import FIXTURES


class TestPromptBuilding:
    def test_base_prompt_contains_contract(self, pad_snippet):
        messages = llm.build_base_prompt(pad_snippet)
        assert [m.role for m in messages] == ["system", "user"]
        user = messages[1].content
        assert "Dead code: Yes or No" in user
        assert "4:     s3 = s1 + '<EOS>'  # Unused Variable" in user

    def test_prompts_differ_only_in_code(self, pad_snippet):
        import dce.code_model as cm

        other = cm.split_lines("x = 1\nprint(x)\n", cm.PYTHON)
        a = llm.build_base_prompt(pad_snippet)
        b = llm.build_base_prompt(other)
        assert a[0] == b[0]
        prefix_a = a[1].content.split("Code:\n")[0]
        prefix_b = b[1].content.split("Code:\n")[0]
        assert prefix_a == prefix_b

    def test_deterministic(self, pad_snippet):
        assert llm.build_base_prompt(pad_snippet) == llm.build_base_prompt(pad_snippet)

    def test_golden_prompts(self, pad_snippet):
        for name, messages in (
            ("prompt_base_pad_fields", llm.build_base_prompt(pad_snippet)),
            (
                "prompt_hinted_pad_fields",
                llm.build_hinted_prompt(
                    pad_snippet, CandidateSet((4,), (5, 6, 7, 8), 2.0, 0.02)
                ),
            ),
        ):
            golden = (FIXTURES / "golden" / f"{name}.json").read_text(encoding="utf-8")
            assert dumps_canonical([m.to_dict() for m in messages]) + "\n" == golden

    def test_hinted_suspect_section(self, pad_snippet):
        messages = llm.build_hinted_prompt(
            pad_snippet, CandidateSet((4,), (5,), 2.0, 0.02)
        )
        tail = messages[1].content.splitlines()[-1]
        assert tail == (
            "Suspect Lines: unused: 4: s3 = s1 + '<EOS>'  # Unused Variable"
            " ; unreachable: 5: if len(s2) == 0: # Unreachable Code"
        )

    def test_empty_candidates_render_none(self, pad_snippet):
        messages = llm.build_hinted_prompt(pad_snippet, CandidateSet((), (), 2.0, 0.02))
        assert messages[1].content.splitlines()[-1] == "Suspect Lines: none"

    def test_hinted_contains_base(self, pad_snippet):
        base = llm.build_base_prompt(pad_snippet)[1].content
        hinted = llm.build_hinted_prompt(
            pad_snippet, CandidateSet((4,), (), 2.0, 0.02)
        )[1].content
        without_suspects = "\n".join(
            line
            for line in hinted.splitlines()
            if not line.startswith("Suspect Lines:")
        ) + "\n"
        assert without_suspects.replace(" and suspect lines", "") == base


class TestReplayTransport:
    def test_round_trip(self, tmp_path, pad_snippet):
        messages = llm.build_base_prompt(pad_snippet)
        (tmp_path / f"{llm.messages_hash(messages)}.txt").write_text(
            "Dead code: No\n", encoding="utf-8"
        )
        transport = llm.ReplayTransport(tmp_path)
        assert llm.chat(messages, transport) == "Dead code: No\n"

    def test_miss(self, tmp_path, pad_snippet):
        transport = llm.ReplayTransport(tmp_path)
        with pytest.raises(ReplayMiss):
            llm.chat(llm.build_base_prompt(pad_snippet), transport)

    def test_committed_store_serves_fixture_prompts(self):
        store = FIXTURES / "replay"
        assert any(store.glob("*.txt"))


class _ScriptedChatServer:
    def __init__(self, replies):
        self.bodies = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                server.bodies.append(json.loads(self.rfile.read(length)))
                content = replies[min(len(server.bodies) - 1, len(replies) - 1)]
                payload = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": content}}]}
                ).encode()
                self.send_response(200)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self.httpd = HTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        return False

    @property
    def url(self):
        return f"http://127.0.0.1:{self.httpd.server_port}"


class TestLiveTransport:
    def test_posts_openai_shape(self, pad_snippet, monkeypatch):
        with _ScriptedChatServer(["Dead code: No"]) as server:
            transport = llm.LiveTransport(
                base_url=server.url, api_key="k", model="test-model"
            )
            out = llm.chat(llm.build_base_prompt(pad_snippet), transport)
            assert out == "Dead code: No"
            body = server.bodies[0]
            assert body["model"] == "test-model"
            assert body["temperature"] == 0.1
            assert body["messages"][0]["role"] == "system"

    def test_env_configuration(self, monkeypatch):
        monkeypatch.delenv(llm.ENV_BASE_URL, raising=False)
        monkeypatch.delenv(llm.ENV_MODEL, raising=False)
        with pytest.raises(TransportUnavailable):
            llm.LiveTransport()

    def test_http_error(self, pad_snippet):
        transport = llm.LiveTransport(
            base_url="http://127.0.0.1:9", api_key="k", model="m", timeout=0.5
        )
        with pytest.raises(TransportUnavailable):
            llm.chat(llm.build_base_prompt(pad_snippet), transport)


APPENDIX_STYLE_OUTPUT = """Dead code: Yes
Line Number: 4
Type: Unused
Explanation: The variable s3 is defined but never used in any subsequent code. Instead of using s3, the code mistakenly uses the literal string 's3'.

Fixed Code:
```python
def pad_fields(Data):
    s1 = input()
    s2 = s1 + '<PAD>'
    if len(s2) == 0: # Unreachable Code
        print('Empty string')
        Data.pad_str = None
        Data.eos_str = None
    else:
        Data.pad_str = s2
        Data.eos_str = s3
```
"""


class TestParseResponse:
    def test_appendix_style_block(self):
        verdict = llm.parse_response(APPENDIX_STYLE_OUTPUT)
        assert verdict.has_dead_code is True
        assert len(verdict.findings) == 1
        finding = verdict.findings[0]
        assert finding.line == 4
        assert finding.type == "unused"
        assert finding.explanation.startswith("The variable s3 is defined")
        assert verdict.fixed_code.startswith("def pad_fields(Data):")
        assert "```" not in verdict.fixed_code

    def test_no_alone(self):
        verdict = llm.parse_response("Dead code: No")
        assert verdict.has_dead_code is False
        assert verdict.findings == ()
        assert verdict.fixed_code is None

    def test_unknown_type_dropped_with_warning(self):
        text = (
            "Dead code: Yes\nLine Number: 3\nType: Dead\n"
            "Explanation: something\n"
        )
        verdict = llm.parse_response(text)
        assert verdict.findings == ()
        assert verdict.warnings

    def test_missing_header_raises(self):
        with pytest.raises(UnparseableVerdict):
            llm.parse_response("no structure at all")

    def test_multiple_findings(self):
        text = (
            "Dead code: Yes\n"
            "Line Number: 2\nType: Unused\nExplanation: never read\n"
            "Line Number: 5\nType: Unreachable\nExplanation: guard is false\n"
            "Fixed Code:\nx = 1\n"
        )
        verdict = llm.parse_response(text)
        assert [(f.line, f.type) for f in verdict.findings] == [
            (2, "unused"),
            (5, "unreachable"),
        ]
        assert verdict.fixed_code == "x = 1\n"

    def test_case_insensitive_header(self):
        assert llm.parse_response("DEAD CODE: YES\n").has_dead_code is True

    def test_multiline_explanation(self):
        text = (
            "Dead code: Yes\nLine Number: 2\nType: Unused\n"
            "Explanation: first line\nsecond line\n\nFixed Code:\ny = 2\n"
        )
        verdict = llm.parse_response(text)
        assert verdict.findings[0].explanation == "first line\nsecond line"

    def test_round_trips_committed_replay_responses(self):
        for path in sorted((FIXTURES / "replay").glob("*.txt")):
            verdict = llm.parse_response(path.read_text(encoding="utf-8"))
            assert verdict.has_dead_code is True
            assert verdict.findings
            assert verdict.fixed_code


class TestRequestVerdict:
    def test_retry_appends_reminder(self, pad_snippet):
        with _ScriptedChatServer(["gibberish", "Dead code: No"]) as server:
            transport = llm.LiveTransport(
                base_url=server.url, api_key="k", model="m"
            )
            verdict = llm.request_verdict(
                llm.build_base_prompt(pad_snippet), transport
            )
            assert verdict.has_dead_code is False
            assert len(server.bodies) == 2
            retry_messages = server.bodies[1]["messages"]
            assert retry_messages[-1]["content"] == llm.FORMAT_REMINDER

    def test_second_failure_raises(self, pad_snippet):
        with _ScriptedChatServer(["gibberish", "still gibberish"]) as server:
            transport = llm.LiveTransport(
                base_url=server.url, api_key="k", model="m"
            )
            with pytest.raises(UnparseableVerdict):
                llm.request_verdict(llm.build_base_prompt(pad_snippet), transport)
