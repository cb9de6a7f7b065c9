import pytest

from pivot_service.data import DatasetError, label_index, load_dataset, split_samples

from conftest import DATASET


class TestLoadDataset:
    def test_loads_committed_dataset(self):
        samples = load_dataset(DATASET)
        assert len(samples) > 200
        assert {s.split for s in samples} == {"train", "dev", "test"}

    def test_both_maps_to_unreachable(self):
        assert label_index("both") == label_index("unreachable")

    def test_unknown_label_rejected(self):
        with pytest.raises(DatasetError):
            label_index("mystery")

    def test_schema_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"id":"a","language":"python","code":"x","label":"normal","split":"train"}\n'
            '{"id":"b"}\n',
            encoding="utf-8",
        )
        with pytest.raises(DatasetError) as excinfo:
            load_dataset(path)
        assert ":2:" in str(excinfo.value)

    def test_empty_dataset_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DatasetError):
            load_dataset(path)

    def test_split_requires_train(self, tmp_path):
        path = tmp_path / "devonly.jsonl"
        path.write_text(
            '{"id":"a","language":"python","code":"x","label":"normal","split":"dev"}\n',
            encoding="utf-8",
        )
        with pytest.raises(DatasetError):
            split_samples(load_dataset(path))
