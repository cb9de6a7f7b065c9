import pytest

from dce import code_model as cm, pattern_forge as pf
from dce.errors import NoInsertionPoint, UnknownPattern

from conftest import FIXTURES


class TestCatalog:
    def test_size_and_unique_ids(self):
        specs = pf.catalog()
        assert len(specs) >= 16
        assert len({s.id for s in specs}) == len(specs)

    def test_sorted_by_id(self):
        ids = [s.id for s in pf.catalog()]
        assert ids == sorted(ids)

    def test_table_families_present(self):
        families = {s.family for s in pf.catalog()}
        assert {
            "after_return", "covered_branch", "floor_compare",
            "after_assert", "sorted_array",
        } <= families
        # at least 7 additional families beyond the published table
        extra = families - {
            "after_return", "covered_branch", "floor_compare",
            "after_assert", "sorted_array",
        }
        assert len(extra) >= 7

    def test_after_return_supports_both_languages(self):
        spec = {s.id: s for s in pf.catalog()}["after_return"]
        assert {"python", "java"} <= set(spec.languages)

    def test_floor_family_exists(self):
        assert any(s.family == "floor_compare" for s in pf.catalog())

    def test_catalog_json_schema(self):
        import json

        entries = json.loads(pf.catalog_json())
        assert len(entries) == len(pf.catalog())
        for entry in entries:
            assert set(entry) == {"id", "family", "languages", "description", "example"}


class TestInstantiate:
    def test_deterministic(self):
        a = pf.instantiate("sorted_array", cm.PYTHON, 7)
        b = pf.instantiate("sorted_array", cm.PYTHON, 7)
        assert a == b

    def test_seeds_differ(self):
        a = pf.instantiate("sorted_array", cm.PYTHON, 7)
        b = pf.instantiate("sorted_array", cm.PYTHON, 8)
        assert a.all_lines() != b.all_lines()

    def test_after_assert_shape(self):
        block = pf.instantiate("after_assert", cm.PYTHON, 0)
        assert len(block.preamble_lines) == 2
        assert block.preamble_lines[1].startswith("assert ")
        assert block.guard_line.startswith("if ")
        assert block.guard_line.endswith("< 0:")

    def test_sorted_array_shape(self):
        block = pf.instantiate("sorted_array", cm.PYTHON, 7)
        assert "sorted([" in block.preamble_lines[0]
        assert "[0] >" in block.guard_line

    def test_unknown_pattern(self):
        with pytest.raises(UnknownPattern):
            pf.instantiate("nonesuch", cm.PYTHON, 0)


class TestProveGuardFalse:
    def test_floor_example(self):
        block = pf.DeadBlock(
            preamble_lines=("a = 3.7", "b = a // 1"),
            guard_line="if a < b:",
            body_lines=("    x = 1",),
            pattern_id="floor_compare",
            language=cm.PYTHON,
        )
        assert pf.prove_guard_false(block) is True

    def test_true_guard_not_proved(self):
        block = pf.DeadBlock(
            preamble_lines=("x = 1",),
            guard_line="if x > 0:",
            body_lines=("    y = 2",),
            pattern_id="adhoc",
            language=cm.PYTHON,
        )
        assert pf.prove_guard_false(block) is False

    def test_unprovable_returns_false_not_error(self):
        block = pf.DeadBlock(
            preamble_lines=("x = unknown_call()",),
            guard_line="if x > 0:",
            body_lines=(),
            pattern_id="adhoc",
            language=cm.PYTHON,
        )
        assert pf.prove_guard_false(block) is False

    def test_failing_assert_not_proved(self):
        block = pf.DeadBlock(
            preamble_lines=("x = 1", "assert x > 5"),
            guard_line="if x < 0:",
            body_lines=(),
            pattern_id="adhoc",
            language=cm.PYTHON,
        )
        assert pf.prove_guard_false(block) is False

    @pytest.mark.parametrize("language", [cm.PYTHON, cm.JAVA])
    def test_catalog_sweep(self, language):
        for spec in pf.catalog():
            for seed in range(5):
                block = pf.instantiate(spec.id, language, seed)
                assert pf.prove_guard_false(block), (
                    spec.id, language.tag, seed, block.all_lines()
                )


class TestInsert:
    @pytest.fixture()
    def host(self):
        src = (FIXTURES / "corpus" / "host_py_00.py").read_text(encoding="utf-8")
        return cm.split_lines(src, cm.PYTHON)

    def test_span_arithmetic(self, pad_snippet):
        block = pf.instantiate("covered_branch", cm.PYTHON, 3)
        record = pf.insert(pad_snippet, block, 3)
        start, end = record.inserted_span
        assert end - start + 1 == len(block.all_lines())
        assert len(record.mutated) == len(pad_snippet) + len(block.all_lines())

    def test_reversible(self, pad_snippet):
        block = pf.instantiate("min_max", cm.PYTHON, 5)
        record = pf.insert(pad_snippet, block, 5)
        assert cm.render(pf.strip_insertion(record)) == cm.render(pad_snippet)

    def test_gold_typing(self, pad_snippet):
        block = pf.instantiate("after_assert", cm.PYTHON, 2)
        record = pf.insert(pad_snippet, block, 2)
        start, _ = record.inserted_span
        kinds = dict(record.gold_lines)
        assert kinds[start] == "unused"
        assert kinds[start + 1] == "unused"
        assert kinds[start + 2] == "unreachable"

    def test_java_brace_carries_no_gold(self, host):
        src = (FIXTURES / "corpus" / "host_jv_00.java").read_text(encoding="utf-8")
        jhost = cm.split_lines(src, cm.JAVA)
        block = pf.instantiate("sorted_array", cm.JAVA, 4)
        record = pf.insert(jhost, block, 4)
        gold_texts = [record.mutated.line(i).text.strip() for i, _ in record.gold_lines]
        assert "}" not in gold_texts

    def test_fresh_names_do_not_collide(self, host):
        block = pf.instantiate("min_max", cm.PYTHON, 1)
        record = pf.insert(host, block, 1)
        start, end = record.inserted_span
        inserted = [record.mutated.line(i).text for i in range(start, end + 1)]
        pseudo = pf.DeadBlock(
            tuple(inserted[: len(block.preamble_lines)]),
            inserted[len(block.preamble_lines)],
            tuple(inserted[len(block.preamble_lines) + 1 :]),
            block.pattern_id,
            cm.PYTHON,
        )
        host_idents = pf.snippet_identifiers(host)
        assert not pf.block_identifiers(pseudo) & host_idents

    def test_indentation_matches_scope(self, pad_snippet):
        block = pf.instantiate("tautology", cm.PYTHON, 9)
        record = pf.insert(pad_snippet, block, 9)
        start, _ = record.inserted_span
        anchor = record.mutated.line(start - 1)
        assert record.mutated.line(start).indent == anchor.indent

    def test_no_insertion_point(self):
        snip = cm.split_lines("else:\n", cm.PYTHON)
        block = pf.instantiate("tautology", cm.PYTHON, 0)
        with pytest.raises(NoInsertionPoint):
            pf.insert(snip, block, 0)

    def test_deterministic(self, pad_snippet):
        block = pf.instantiate("abs_nonneg", cm.PYTHON, 11)
        r1 = pf.insert(pad_snippet, block, 11)
        r2 = pf.insert(pad_snippet, block, 11)
        assert cm.render(r1.mutated) == cm.render(r2.mutated)
        assert r1.gold_lines == r2.gold_lines


class TestSplitPatterns:
    def test_disjoint_cover(self):
        train, test = pf.split_patterns(seed=3, train_fraction=0.5)
        ids = {s.id for s in pf.catalog()}
        assert set(train) | set(test) == ids
        assert not set(train) & set(test)

    def test_half_split_sizes(self):
        train, test = pf.split_patterns(seed=3, train_fraction=0.5)
        total = len(pf.catalog())
        assert abs(len(train) - total / 2) <= 1

    def test_families_stratified(self):
        train, test = pf.split_patterns(seed=5, train_fraction=0.5)
        by_family: dict[str, list[str]] = {}
        for spec in pf.catalog():
            by_family.setdefault(spec.family, []).append(spec.id)
        for family, members in by_family.items():
            if len(members) >= 2:
                assert set(members) & set(train), family
                assert set(members) & set(test), family

    def test_deterministic(self):
        assert pf.split_patterns(9, 0.5) == pf.split_patterns(9, 0.5)

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            pf.split_patterns(0, 1.0)
