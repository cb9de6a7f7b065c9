import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dce import code_model as cm
from dce.classifiers import (
    ClassProbabilities,
    ClassifierConfig,
    FixtureClassifier,
    HeuristicClassifier,
    RemoteClassifier,
    decide_label,
    make_fixture_for_gold,
)
from dce.errors import RemoteMalformed, RemoteUnavailable

from fake_server import FakeClassifierServer, run_protocol_suite


def _fix(pad_gold_texts):
    unused, unreachable = pad_gold_texts
    return FixtureClassifier(unused, unreachable)


class TestClassProbabilities:
    def test_simplex_enforced(self):
        with pytest.raises(ValueError):
            ClassProbabilities(0.5, 0.5, 0.5)

    def test_normalized(self):
        probs = ClassProbabilities.normalized(0.9, 0.475, 0.05)
        assert abs(sum(probs.as_tuple()) - 1.0) <= 1e-9

    @given(
        st.tuples(
            st.floats(0.01, 10),
            st.floats(0.01, 10),
            st.floats(0.01, 10),
        )
    )
    @settings(max_examples=300, deadline=None)
    def test_normalized_always_on_simplex(self, raw):
        probs = ClassProbabilities.normalized(*raw)
        assert abs(sum(probs.as_tuple()) - 1.0) <= 1e-6
        assert all(0.0 <= v <= 1.0 for v in probs.as_tuple())


class TestDecideLabel:
    def test_tie_prefers_unreachable(self):
        probs = ClassProbabilities.normalized(0.2, 0.4, 0.4)
        assert decide_label(probs) == "unreachable"

    def test_unused_beats_normal_on_tie(self):
        probs = ClassProbabilities.normalized(0.4, 0.4, 0.2)
        assert decide_label(probs) == "unused"

    def test_normal_ceiling(self):
        probs = ClassProbabilities.normalized(0.5, 0.3, 0.2)
        assert decide_label(probs) == "normal"
        assert decide_label(probs, normal_ceiling=0.9) == "unused"


class TestHeuristic:
    def test_clean_snippet(self):
        snip = cm.split_lines("x = 1\nprint(x)\n", cm.PYTHON)
        probs = HeuristicClassifier().classify(snip)
        assert probs.as_tuple() == (0.9, 0.05, 0.05)

    def test_one_unused_finding(self, pad_snippet):
        probs = HeuristicClassifier().classify(pad_snippet)
        assert probs.p_normal == pytest.approx(0.90 / 1.425)
        assert probs.p_unused == pytest.approx(0.475 / 1.425)
        assert probs.p_unreachable == pytest.approx(0.05 / 1.425)

    def test_saturation_at_two_findings(self):
        src = "if False:\n    print(1)\n    print(2)\n    print(3)\nprint('x')\n"
        snip = cm.split_lines(src, cm.PYTHON)
        probs = HeuristicClassifier().classify(snip)
        # three unreachable findings clamp to the same mass as two
        assert probs.p_unreachable == pytest.approx(0.90 / (0.90 + 0.05 + 0.90))


class TestFixture:
    def test_all_present(self, pad_snippet, pad_gold_texts):
        probs = _fix(pad_gold_texts).classify(pad_snippet)
        # pre-normalization (0, 0.85, 0.85)
        assert probs.as_tuple() == pytest.approx((0.0, 0.5, 0.5))

    def test_unused_line_deleted(self, pad_snippet, pad_gold_texts):
        probs = _fix(pad_gold_texts).classify(cm.delete_line(pad_snippet, 4))
        # pre-normalization (0.10, 0.05, 0.85)
        assert probs.as_tuple() == pytest.approx((0.10, 0.05, 0.85))

    def test_masked_guard_counts_absent(self, pad_snippet, pad_gold_texts):
        masked = cm.mask_condition(pad_snippet, 5)
        probs = _fix(pad_gold_texts).classify(masked)
        # p_unreachable pre-normalization = 0.05 + 0.8 * 3/4 = 0.65
        assert probs.p_unreachable == pytest.approx(0.65 / 1.5)

    def test_monotonic_in_corresponding_class(self, pad_snippet, pad_gold_texts):
        # removing a gold line never increases the probability of ITS class
        clf = _fix(pad_gold_texts)
        base = clf.classify(pad_snippet)
        out = clf.classify(cm.delete_line(pad_snippet, 4))
        assert out.p_unused <= base.p_unused + 1e-12
        for i in (6, 7, 8):
            out = clf.classify(cm.delete_line(pad_snippet, i))
            assert out.p_unreachable <= base.p_unreachable + 1e-12

    def test_empty_gold_is_normal_prior(self):
        clf = FixtureClassifier(set(), set())
        snip = cm.split_lines("x = 1\nprint(x)\n", cm.PYTHON)
        assert clf.classify(snip).as_tuple() == pytest.approx((0.9, 0.05, 0.05))

    def test_make_fixture_for_gold(self, pad_snippet):
        clf = make_fixture_for_gold(
            pad_snippet, [(4, "unused"), (5, "unreachable")]
        )
        assert clf.gold_unused == {pad_snippet.line(4).text}
        assert clf.gold_unreachable == {pad_snippet.line(5).text}


class TestRemote:
    def _client(self, endpoint, **kw):
        return RemoteClassifier(
            ClassifierConfig(
                kind="remote", endpoint=endpoint, backoff_base=0.01, **kw
            )
        )

    def test_well_formed_response(self, pad_snippet):
        with FakeClassifierServer() as server:
            server.scripted.append(
                (200, {"probs": {"normal": 0.1, "unused": 0.7, "unreachable": 0.2},
                       "model": "m1"})
            )
            probs = self._client(server.endpoint).classify(pad_snippet)
        assert probs.as_tuple() == (0.1, 0.7, 0.2)

    def test_broken_simplex_is_malformed(self, pad_snippet):
        with FakeClassifierServer() as server:
            server.scripted.append(
                (200, {"probs": {"normal": 0.1, "unused": 0.5, "unreachable": 0.2},
                       "model": "m1"})
            )
            with pytest.raises(RemoteMalformed):
                self._client(server.endpoint).classify(pad_snippet)

    def test_retry_then_success(self, pad_snippet, caplog):
        with FakeClassifierServer() as server:
            server.scripted.extend([(500, {"error": "boom"}), (500, {"error": "boom"})])
            with caplog.at_level(logging.WARNING, logger="dce.classifiers"):
                probs = self._client(server.endpoint).classify(pad_snippet)
            assert len(server.requests) == 3
            assert sum("attempt" in r.message for r in caplog.records) == 2
        assert abs(sum(probs.as_tuple()) - 1.0) <= 1e-6

    def test_unavailable_after_retries(self, pad_snippet):
        with FakeClassifierServer() as server:
            server.scripted.extend([(503, None)] * 3)
            with pytest.raises(RemoteUnavailable):
                self._client(server.endpoint).classify(pad_snippet)

    def test_batch_matches_serial(self, pad_snippet):
        snippets = [pad_snippet, cm.delete_line(pad_snippet, 4), cm.mask_condition(pad_snippet, 5)]
        with FakeClassifierServer() as server:
            client = self._client(server.endpoint, batch_size=2)
            batched = client.classify_batch(snippets)
            serial = [client.classify(s) for s in snippets]
        assert [b.as_tuple() for b in batched] == [s.as_tuple() for s in serial]

    def test_batch_length_mismatch_is_malformed(self, pad_snippet):
        with FakeClassifierServer() as server:
            server.scripted.append((200, {"results": []}))
            with pytest.raises(RemoteMalformed):
                self._client(server.endpoint).classify_batch([pad_snippet])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ClassifierConfig(kind="remote")
        with pytest.raises(ValueError):
            ClassifierConfig(kind="heuristic", batch_size=0)


class TestWireProtocolSuite:
    def test_fake_server_conforms(self):
        import requests

        with FakeClassifierServer() as server:
            def post_json(path, body):
                resp = requests.post(server.endpoint + path, json=body, timeout=5)
                try:
                    return resp.status_code, resp.json()
                except ValueError:
                    return resp.status_code, None

            run_protocol_suite(post_json)
