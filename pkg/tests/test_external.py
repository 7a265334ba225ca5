import pytest

from stancebench.corpus import PUBLISHED_COUNTS, StanceLabel, TopicDataset
from stancebench.errors import ParseError, ValidationError
from stancebench.external import (
    import_predictions,
    read_predictions_file,
    write_predictions_file,
)

from conftest import make_posts


def _dataset(counts=(2, 2, 1)):
    return TopicDataset("HC", test=make_posts("HC", counts, prefix="t"))


def _write(path, rows):
    path.write_text(
        "".join(f"{pid}\t{lab}\n" for pid, lab in rows), encoding="utf-8"
    )
    return path


class TestImportPredictions:
    def test_full_coverage_accepted_at_official_size(self, tmp_path):
        ds = TopicDataset("HC", test=make_posts("HC", PUBLISHED_COUNTS["HC"]["test"], "t"))
        assert len(ds.test) == 295
        rows = [(p.id, "AGAINST") for p in ds.test]
        path = _write(tmp_path / "preds.tsv", rows)
        imported = import_predictions(path, ds, model_name="bert")
        assert len(imported.predictions) == 295
        assert imported.labels_for(ds) == [StanceLabel.AGAINST] * 295

    def test_missing_id_named(self, tmp_path):
        ds = _dataset()
        rows = [(p.id, "FAVOR") for p in ds.test][:-1]
        path = _write(tmp_path / "preds.tsv", rows)
        with pytest.raises(ValidationError, match=ds.test[-1].id):
            import_predictions(path, ds)

    def test_duplicate_id_rejected(self, tmp_path):
        ds = _dataset()
        rows = [(p.id, "FAVOR") for p in ds.test]
        rows.append(rows[0])
        path = _write(tmp_path / "preds.tsv", rows)
        with pytest.raises(ParseError, match="duplicate"):
            import_predictions(path, ds)

    def test_unknown_id_rejected(self, tmp_path):
        ds = _dataset()
        rows = [(p.id, "FAVOR") for p in ds.test] + [("ghost", "NONE")]
        path = _write(tmp_path / "preds.tsv", rows)
        with pytest.raises(ValidationError, match="ghost"):
            import_predictions(path, ds)

    def test_bad_label_rejected(self, tmp_path):
        ds = _dataset()
        rows = [(p.id, "SORTA") for p in ds.test]
        path = _write(tmp_path / "preds.tsv", rows)
        with pytest.raises(ParseError):
            import_predictions(path, ds)

    def test_roundtrip_with_writer(self, tmp_path):
        ds = _dataset()
        labels = [p.gold for p in ds.test]
        path = tmp_path / "out.tsv"
        write_predictions_file(path, [p.id for p in ds.test], labels)
        assert read_predictions_file(path) == {
            p.id: p.gold for p in ds.test
        }
        imported = import_predictions(path, ds)
        assert imported.labels_for(ds) == labels
