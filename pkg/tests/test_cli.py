"""End-to-end command-line tests over synthetic fixture data."""

import json

import pytest

from stancebench.cli import main
from stancebench.corpus import StanceLabel, load_semeval

from conftest import semeval_rows, write_official_shaped_files, write_semeval_file

TOPIC_TEXTS = {
    "FAVOR": [
        "down with religion and superstition #SemST",
        "free thought beats blind faith every time #SemST",
        "science explains the world without gods #SemST",
        "reason is my only temple friends #SemST",
        "no gods required to be good #SemST",
        "skeptics unite against dogma now #SemST",
        "question everything including scripture #SemST",
        "faith is not a virtue folks #SemST",
        "the age of reason is here #SemST",
        "godless and happy about it #SemST",
    ],
    "AGAINST": [
        "prayer gives me strength daily #SemST",
        "god created all of this beauty #SemST",
        "blessed is the faithful heart #SemST",
        "scripture guides my every step #SemST",
        "the lord watches over us all #SemST",
        "faith moves mountains believe it #SemST",
        "church brought our family together #SemST",
        "his grace is sufficient for me #SemST",
        "trust in god and be saved #SemST",
        "miracles happen to the faithful #SemST",
    ],
    "NONE": [
        "the game starts at seven tonight #SemST",
        "new coffee shop opened downtown #SemST",
        "traffic was heavy this morning #SemST",
        "the weather looks nice this week #SemST",
        "my cat knocked over a plant #SemST",
        "finally finished that big report #SemST",
        "trying a new pasta recipe today #SemST",
        "the bus was late again #SemST",
        "weekend plans include hiking #SemST",
        "phone battery died at noon #SemST",
    ],
}


@pytest.fixture
def workspace(tmp_path):
    """Fixture data directory plus a run config."""
    rows_train = []
    rows_test = []
    i = 100
    for label, texts in TOPIC_TEXTS.items():
        for k, text in enumerate(texts):
            row = (str(i), "Atheism", text, label)
            (rows_train if k < 7 else rows_test).append(row)
            i += 1
    write_semeval_file(tmp_path / "at_train.tsv", rows_train)
    write_semeval_file(tmp_path / "at_test.tsv", rows_test)

    mpchi_lines = ["Sentence,Stance"]
    for label in ("FAVOR",) * 6 + ("AGAINST",) * 6 + ("NONE",) * 6:
        mpchi_lines.append(f"a sentence about the {label.lower()} claim,{label}")
    (tmp_path / "mmr.csv").write_text("\n".join(mpchi_lines) + "\n", encoding="utf-8")

    config = {
        "out_dir": str(tmp_path / "runs"),
        "seed": 11,
        "topics": ["AT"],
        "datasets": {
            "semeval": {"train": "at_train.tsv", "test": "at_test.tsv"},
            "mpchi": {"MMR": {"path": "mmr.csv", "train_fraction": 0.7}},
        },
        "embeddings": {"dim": 12},
        "models": {
            "tan": {"hidden": 6},
            "sen_svm": {"epochs": 60},
        },
        "vote": {
            "num_runs": 2,
            "validation_fraction": 0.2,
            "checkpoint_epochs": [2, 3],
        },
        "tune": {
            "model": "sen_svm",
            "topic": "AT",
            "grid": {"lambda_": [0.1, 0.01], "epochs": [20]},
            "folds": 3,
        },
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return tmp_path, cfg_path


def test_ingest_roundtrips(workspace):
    tmp_path, cfg = workspace
    assert main(["ingest", "--config", str(cfg)]) == 0
    out = tmp_path / "runs" / "ingest"
    ds = load_semeval(out / "AT.train.tsv", split="train")
    assert len(ds.train) == 21
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["master_seed"] == 11 and meta["config_hash"]


def test_stats_prints_counts(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["stats", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("topic\tsplit")
    assert "AT\ttrain\t7\t7\t7\t21" in lines


def test_stats_expect_published(tmp_path, capsys):
    train, test = write_official_shaped_files(tmp_path, topics=["AT", "HC"])
    config = {
        "out_dir": str(tmp_path / "runs"),
        "topics": ["AT", "HC"],
        "datasets": {"semeval": {"train": train.name, "test": test.name}},
    }
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config), encoding="utf-8")
    assert main(["stats", "--config", str(cfg), "--expect-published"]) == 0
    out = capsys.readouterr().out
    assert "AT\ttrain\t92\t304\t117\t513" in out
    assert "HC\ttest\t45\t172\t78\t295" in out


def test_stats_expect_published_catches_mismatch(tmp_path, capsys):
    rows = semeval_rows("AT", "train", (92, 304, 116))  # one NONE short
    train = write_semeval_file(tmp_path / "train.tsv", rows)
    test = write_semeval_file(
        tmp_path / "test.tsv", semeval_rows("AT", "test", (32, 160, 28), 90000)
    )
    config = {
        "topics": ["AT"],
        "datasets": {"semeval": {"train": train.name, "test": test.name}},
    }
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config), encoding="utf-8")
    assert main(["stats", "--config", str(cfg), "--expect-published"]) == 1


def test_preprocess_dumps_tokens(workspace):
    tmp_path, cfg = workspace
    assert main(["preprocess", "--config", str(cfg)]) == 0
    body = (tmp_path / "runs" / "preprocess" / "AT.tokens.tsv").read_text()
    assert "semst" not in body  # marker dropped by default
    assert "\ttrain\t" in body and "\ttest\t" in body


def test_svm_train_evaluate_compare_flow(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["train", "--config", str(cfg), "--model", "sen_svm"]) == 0
    pred = tmp_path / "runs" / "predictions" / "sen_svm" / "AT.tsv"
    assert pred.exists() and len(pred.read_text().splitlines()) == 9
    assert (tmp_path / "runs" / "models" / "sen_svm" / "AT.json").exists()

    assert main(["evaluate", "--config", str(cfg), "--model", "sen_svm"]) == 0
    report = json.loads(
        (tmp_path / "runs" / "reports" / "sen_svm" / "AT.json").read_text()
    )
    assert "official_macro_f1_favor_against" in report
    assert report["config_hash"]

    assert main(["compare", "--config", str(cfg), "--reference-rows"]) == 0
    table = (tmp_path / "runs" / "reports" / "comparison.txt").read_text()
    assert "sen_svm" in table and "cnn (reported)" in table

    assert main(["error-analysis", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "misclassified by every model" in out


def test_evaluate_rerun_byte_identical(workspace):
    tmp_path, cfg = workspace
    assert main(["train", "--config", str(cfg), "--model", "sen_svm"]) == 0
    report = tmp_path / "runs" / "reports" / "sen_svm" / "AT.json"
    assert main(["evaluate", "--config", str(cfg), "--model", "sen_svm"]) == 0
    first = report.read_bytes()
    assert main(["evaluate", "--config", str(cfg), "--model", "sen_svm"]) == 0
    assert report.read_bytes() == first


def test_neural_train_and_revote_predict(workspace):
    tmp_path, cfg = workspace
    assert main(["train", "--config", str(cfg), "--model", "tan"]) == 0
    pred = tmp_path / "runs" / "predictions" / "tan" / "AT.tsv"
    matrix = tmp_path / "runs" / "matrices" / "tan" / "AT.tsv"
    assert pred.exists() and matrix.exists()
    first = pred.read_bytes()
    # predict re-votes from the persisted matrix without retraining
    assert main(["predict", "--config", str(cfg), "--model", "tan"]) == 0
    assert pred.read_bytes() == first


def test_train_determinism_across_out_dirs(workspace):
    tmp_path, cfg = workspace
    out_a = str(tmp_path / "out_a")
    out_b = str(tmp_path / "out_b")
    assert main(["train", "--config", str(cfg), "--model", "sen_svm", "--out", out_a]) == 0
    assert main(["train", "--config", str(cfg), "--model", "sen_svm", "--out", out_b]) == 0
    a = (tmp_path / "out_a" / "predictions" / "sen_svm" / "AT.tsv").read_bytes()
    b = (tmp_path / "out_b" / "predictions" / "sen_svm" / "AT.tsv").read_bytes()
    assert a == b


def test_import_external_and_strictness(workspace):
    tmp_path, cfg = workspace
    ds_test_ids = [str(i) for i in range(100, 130)]
    # only ids 107..109, 117..119, 127..129 are test posts (k >= 7 per class)
    test_ids = [i for i in ds_test_ids if int(i) % 10 >= 7]
    ext = tmp_path / "bert.tsv"
    ext.write_text(
        "".join(f"{pid}\tFAVOR\n" for pid in test_ids), encoding="utf-8"
    )
    assert (
        main(
            ["import-external", "--config", str(cfg), "--model", "bert_ext",
             "--in", str(ext)]
        )
        == 0
    )
    out = tmp_path / "runs" / "predictions" / "bert_ext" / "AT.tsv"
    assert out.exists()
    # incomplete file is rejected
    ext.write_text(f"{test_ids[0]}\tFAVOR\n", encoding="utf-8")
    assert (
        main(
            ["import-external", "--config", str(cfg), "--model", "bert_ext",
             "--in", str(ext)]
        )
        == 1
    )


def test_evaluate_reproduces_hand_computed_metric(tmp_path, capsys):
    # gold [F,F,A,A,N,N] vs predictions [F,A,A,A,N,F] -> official 0.65
    gold = ["FAVOR", "FAVOR", "AGAINST", "AGAINST", "NONE", "NONE"]
    pred = ["FAVOR", "AGAINST", "AGAINST", "AGAINST", "NONE", "FAVOR"]
    test_rows = [
        (str(200 + i), "Atheism", f"tweet number {i}", g) for i, g in enumerate(gold)
    ]
    train_rows = [(str(100 + i), "Atheism", f"train {i}", g) for i, g in enumerate(gold)]
    write_semeval_file(tmp_path / "train.tsv", train_rows)
    write_semeval_file(tmp_path / "test.tsv", test_rows)
    pred_file = tmp_path / "preds.tsv"
    pred_file.write_text(
        "".join(f"{200 + i}\t{p}\n" for i, p in enumerate(pred)), encoding="utf-8"
    )
    cfg = tmp_path / "c.json"
    cfg.write_text(
        json.dumps(
            {
                "out_dir": str(tmp_path / "runs"),
                "topics": ["AT"],
                "datasets": {"semeval": {"train": "train.tsv", "test": "test.tsv"}},
            }
        ),
        encoding="utf-8",
    )
    assert (
        main(
            ["evaluate", "--config", str(cfg), "--model", "fixture",
             "--pred", str(pred_file)]
        )
        == 0
    )
    assert "official metric 0.6500" in capsys.readouterr().out
    report = json.loads(
        (tmp_path / "runs" / "reports" / "fixture" / "AT.json").read_text()
    )
    assert report["official_macro_f1_favor_against"] == 0.65


def test_tune_never_touches_test(workspace):
    tmp_path, cfg = workspace
    assert main(["tune", "--config", str(cfg)]) == 0
    doc = json.loads((tmp_path / "runs" / "tune" / "sen_svm_AT.json").read_text())
    assert doc["splits_accessed"] == ["train"]
    assert doc["best_params"]["epochs"] == 20


def test_theorem_check_passes(capsys):
    assert main(["theorem-check", "--trials", "5", "--posts", "3"]) == 0
    out = capsys.readouterr().out
    assert "target invariance holds" in out


def test_grad_check_passes(capsys):
    assert main(["grad-check"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_unknown_config_key_is_validation_error(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"outdir": "x"}), encoding="utf-8")
    assert main(["stats", "--config", str(cfg)]) == 1


def test_unknown_model_is_validation_error(workspace):
    _, cfg = workspace
    assert main(["train", "--config", str(cfg), "--model", "bert"]) == 1


def test_missing_file_is_validation_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(
        json.dumps(
            {"topics": ["AT"], "datasets": {"semeval": {"train": "no.tsv", "test": "no.tsv"}}}
        ),
        encoding="utf-8",
    )
    # missing data file surfaces as a runtime failure exit, not a crash
    assert main(["stats", "--config", str(cfg)]) in (1, 2)
