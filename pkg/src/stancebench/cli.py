"""Command-line surface: config-driven, reproducible runs.

Exit codes: 0 success, 1 validation/configuration error, 2 runtime or
training failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig
from .corpus import (
    CLASS_ORDER,
    MPCHI_TOPICS,
    PUBLISHED_COUNTS,
    SEMEVAL_TOPICS,
    StanceLabel,
    dataset_stats,
    write_semeval,
)
from .errors import ConfigError, StanceBenchError, ValidationError
from .evaluation import (
    all_models_missed,
    macro_f1_favor_against,
    render_comparison,
)
from .external import import_predictions, write_predictions_file
from .hyperparams import checkpoint_epochs
from .preprocess import (
    load_default_frequency_table,
    load_default_normalization,
    preprocess_text,
)
from .runner import (
    ALL_MODEL_NAMES,
    SVM_MODEL_NAMES,
    run_neural_model,
    run_svm_model,
)
from .svm import SenSvm, TwoStepSvm, load_model, predict_label, save_model
from .tune import SplitAccessRecorder, grid_search_svm
from .verification import (
    ATTENTION_INVARIANCE_TOL,
    PAIRED_FORWARD_TOL,
    attention_invariance_suite,
    model_gradcheck_suite,
    op_gradcheck_suite,
)
from .vote import PredictionMatrix, default_tie_break


def _write_meta(out_dir: Path, cfg: RunConfig) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"config_hash": cfg.hash(), "master_seed": cfg.seed}
    (out_dir / "run_meta.json").write_text(
        json.dumps(meta, sort_keys=True), encoding="utf-8"
    )


def _topics(cfg: RunConfig, args) -> list[str]:
    if getattr(args, "topic", None):
        return [args.topic]
    if cfg.topics:
        return cfg.topics
    raise ConfigError("no topics: set 'topics' in the config or pass --topic")


def _load_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config PATH is required for this command")
    cfg = RunConfig.from_file(args.config)
    if args.seed is not None:
        cfg.raw["seed"] = args.seed
    if args.out is not None:
        cfg.raw["out_dir"] = args.out
    return cfg


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    out = cfg.out_dir / "ingest"
    _write_meta(out, cfg)
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        write_semeval(ds.train, out / f"{topic}.train.tsv")
        write_semeval(ds.test, out / f"{topic}.test.tsv")
        stats = dataset_stats(ds)
        print(
            f"{topic}: train {stats['train']['TOTAL']} posts, "
            f"test {stats['test']['TOTAL']} posts -> {out}"
        )
    return 0


def cmd_stats(args) -> int:
    cfg = _load_config(args)
    print("topic\tsplit\tFAVOR\tAGAINST\tNONE\tTOTAL")
    mismatches = []
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        stats = dataset_stats(ds)
        for split in ("train", "test"):
            row = stats[split]
            print(
                f"{topic}\t{split}\t{row['FAVOR']}\t{row['AGAINST']}\t"
                f"{row['NONE']}\t{row['TOTAL']}"
            )
            if args.expect_published and topic in PUBLISHED_COUNTS:
                expected = PUBLISHED_COUNTS[topic][split]
                actual = (row["FAVOR"], row["AGAINST"], row["NONE"])
                if expected != actual:
                    mismatches.append((topic, split, expected, actual))
    if mismatches:
        for topic, split, expected, actual in mismatches:
            print(
                f"MISMATCH {topic}/{split}: expected {expected}, got {actual}",
                file=sys.stderr,
            )
        raise ValidationError(f"{len(mismatches)} count mismatches")
    return 0


def cmd_preprocess(args) -> int:
    cfg = _load_config(args)
    out = cfg.out_dir / "preprocess"
    _write_meta(out, cfg)
    pcfg = cfg.preprocess_config()
    lex = load_default_normalization()
    freq = load_default_frequency_table()
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        lines = []
        for split, posts in (("train", ds.train), ("test", ds.test)):
            for post in posts:
                tokens = preprocess_text(post.text, pcfg, lex=lex, freq=freq)
                lines.append(f"{post.id}\t{split}\t{' '.join(tokens)}")
        path = out / f"{topic}.tokens.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"{topic}: wrote {len(lines)} token rows -> {path}")
    return 0


def _predictions_path(cfg: RunConfig, model: str, topic: str) -> Path:
    return cfg.out_dir / "predictions" / model / f"{topic}.tsv"


def cmd_train(args) -> int:
    cfg = _load_config(args)
    if not args.model:
        raise ConfigError("--model NAME is required (one of %s)" % (ALL_MODEL_NAMES,))
    model_name = args.model
    if model_name not in ALL_MODEL_NAMES:
        raise ConfigError(f"unknown model {model_name!r}")
    _write_meta(cfg.out_dir, cfg)
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        pred_path = _predictions_path(cfg, model_name, topic)
        pred_path.parent.mkdir(parents=True, exist_ok=True)
        if model_name in SVM_MODEL_NAMES:
            svm_cfg = cfg.svm_train_config(model_name, topic)
            cls = SenSvm if model_name == "sen_svm" else TwoStepSvm
            trained = cls(topic, svm_cfg).fit(ds.train)
            predictions = [trained.predict(p) for p in ds.test]
            model_dir = cfg.out_dir / "models" / model_name
            model_dir.mkdir(parents=True, exist_ok=True)
            if model_name == "sen_svm":
                save_model(trained.model, model_dir / f"{topic}.json")
            else:
                save_model(trained.model.stage1, model_dir / f"{topic}.stage1.json")
                save_model(trained.model.stage2, model_dir / f"{topic}.stage2.json")
        else:
            table = cfg.embedding_table()
            output = run_neural_model(
                ds,
                model_name,
                table,
                schedule=cfg.schedule(model_name, topic),
                vote_cfg=cfg.vote_config(
                    model_name, topic, checkpoint_epochs(model_name, topic)
                ),
                seed=cfg.seed,
            )
            matrix_path = cfg.out_dir / "matrices" / model_name / f"{topic}.tsv"
            matrix_path.parent.mkdir(parents=True, exist_ok=True)
            output.matrix.save(matrix_path)
            predictions = output.predictions
        write_predictions_file(pred_path, [p.id for p in ds.test], predictions)
        print(f"{model_name}/{topic}: wrote predictions -> {pred_path}")
    return 0


def cmd_predict(args) -> int:
    cfg = _load_config(args)
    if not args.model:
        raise ConfigError("--model NAME is required")
    model_name = args.model
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        pred_path = _predictions_path(cfg, model_name, topic)
        pred_path.parent.mkdir(parents=True, exist_ok=True)
        if model_name in SVM_MODEL_NAMES:
            # Refit deterministically from the saved configuration.
            model_dir = cfg.out_dir / "models" / model_name
            if model_name == "sen_svm":
                linear = load_model(model_dir / f"{topic}.json")
                trained = SenSvm(topic, cfg.svm_train_config(model_name, topic))
                trained.pipeline.fit(
                    [trained._view(p) for p in ds.train]
                )
                trained.model = linear
                preds = [trained.predict(p) for p in ds.test]
            else:
                trained = TwoStepSvm(topic, cfg.svm_train_config(model_name, topic))
                views = [trained._view(p) for p in ds.train]
                trained.stage1_pipeline.fit(views)
                trained.stage2_pipeline.fit(views)
                from .svm import CascadeModel

                trained.model = CascadeModel(
                    stage1=load_model(model_dir / f"{topic}.stage1.json"),
                    stage2=load_model(model_dir / f"{topic}.stage2.json"),
                )
                preds = [trained.predict(p) for p in ds.test]
        else:
            matrix_path = cfg.out_dir / "matrices" / model_name / f"{topic}.tsv"
            if not matrix_path.exists():
                raise ValidationError(
                    f"no saved prediction matrix at {matrix_path}; run train first"
                )
            matrix = PredictionMatrix.load(matrix_path)
            tie = default_tie_break(p.gold for p in ds.train)
            preds = matrix.vote(tie)
        write_predictions_file(pred_path, [p.id for p in ds.test], preds)
        print(f"{model_name}/{topic}: wrote predictions -> {pred_path}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    if not args.model:
        raise ConfigError("--model NAME is required")
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        pred_file = args.pred or _predictions_path(cfg, args.model, topic)
        imported = import_predictions(pred_file, ds, model_name=args.model)
        preds = imported.labels_for(ds)
        report = macro_f1_favor_against(preds, [p.gold for p in ds.test])
        report_dir = cfg.out_dir / "reports" / args.model
        report_dir.mkdir(parents=True, exist_ok=True)
        doc = json.loads(report.to_text())
        doc["config_hash"] = cfg.hash()
        doc["master_seed"] = cfg.seed
        (report_dir / f"{topic}.json").write_text(
            json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8"
        )
        print(f"{args.model}/{topic}: official metric {report.official:.4f}")
    return 0


def _scan_predictions(cfg: RunConfig, topics: list[str]):
    root = cfg.out_dir / "predictions"
    if not root.exists():
        raise ValidationError(f"no predictions directory at {root}")
    found: dict[str, dict[str, Path]] = {}
    for model_dir in sorted(root.iterdir()):
        if not model_dir.is_dir():
            continue
        for topic in topics:
            path = model_dir / f"{topic}.tsv"
            if path.exists():
                found.setdefault(model_dir.name, {})[topic] = path
    if not found:
        raise ValidationError(f"no per-topic prediction files under {root}")
    return found


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    topics = _topics(cfg, args)
    found = _scan_predictions(cfg, topics)
    per_model = {}
    for model, paths in found.items():
        reports = {}
        for topic, path in paths.items():
            ds = cfg.load_topic_dataset(topic)
            preds = import_predictions(path, ds, model_name=model).labels_for(ds)
            reports[topic] = macro_f1_favor_against(preds, [p.gold for p in ds.test])
        per_model[model] = reports
    family = None
    if args.reference_rows:
        if all(t in SEMEVAL_TOPICS for t in topics):
            family = "semeval"
        elif all(t in MPCHI_TOPICS for t in topics):
            family = "mpchi"
        else:
            raise ConfigError("--reference-rows needs all-SemEval or all-MPCHI topics")
    table = render_comparison(per_model, topics=topics, reference_family=family)
    report_dir = cfg.out_dir / "reports"
    report_dir.mkdir(parents=True, exist_ok=True)
    stamp = f"# config={cfg.hash()} seed={cfg.seed}\n"
    (report_dir / "comparison.txt").write_text(stamp + table.to_text(), encoding="utf-8")
    (report_dir / "comparison.tsv").write_text(stamp + table.to_tsv(), encoding="utf-8")
    print(table.to_text(), end="")
    return 0


def cmd_error_analysis(args) -> int:
    cfg = _load_config(args)
    topics = _topics(cfg, args)
    found = _scan_predictions(cfg, topics)
    lines = []
    total = 0
    for topic in topics:
        ds = cfg.load_topic_dataset(topic)
        model_preds = {}
        for model, paths in found.items():
            if topic in paths:
                model_preds[model] = import_predictions(
                    paths[topic], ds, model_name=model
                ).labels_for(ds)
        if not model_preds:
            continue
        report = all_models_missed(model_preds, [p.gold for p in ds.test], ds.test)
        text = report.to_text()
        if text:
            lines.append(text.rstrip("\n"))
        total += len(report.all_posts())
    report_dir = cfg.out_dir / "reports"
    report_dir.mkdir(parents=True, exist_ok=True)
    stamp = f"# config={cfg.hash()} seed={cfg.seed}\n"
    (report_dir / "error_analysis.tsv").write_text(
        stamp + "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )
    print(f"{total} posts misclassified by every model")
    return 0


def cmd_grad_check(args) -> int:
    reports = {}
    reports.update(op_gradcheck_suite(seed=args.seed or 0))
    reports.update(model_gradcheck_suite(seed=args.seed or 0))
    failed = []
    for name, report in sorted(reports.items()):
        status = "PASS" if report.passed else "FAIL"
        print(f"{name:<20} max_rel_err={report.max_rel_error:.3e}  {status}")
        if not report.passed:
            failed.append(name)
    if failed:
        raise ValidationError(f"gradient checks failed: {failed}")
    return 0


def cmd_theorem_check(args) -> int:
    report = attention_invariance_suite(
        trials=args.trials, posts_per_trial=args.posts, seed=args.seed or 0
    )
    print(
        f"attention deviation over {report.trials} models x "
        f"{report.posts_per_trial} posts: max {report.max_attention_deviation:.3e} "
        f"(tolerance {ATTENTION_INVARIANCE_TOL:.0e})"
    )
    print(
        f"paired full/minus forward difference over {report.paired_pairs} pairs: "
        f"max {report.max_paired_forward_diff:.3e} "
        f"(tolerance {PAIRED_FORWARD_TOL:.0e})"
    )
    if not report.passed:
        raise ValidationError("attention target-invariance check failed")
    print("target invariance holds")
    return 0


def cmd_import_external(args) -> int:
    cfg = _load_config(args)
    if not args.infile or not args.model:
        raise ConfigError("import-external needs --in FILE and --model NAME")
    for topic in _topics(cfg, args):
        ds = cfg.load_topic_dataset(topic)
        imported = import_predictions(
            args.infile, ds, model_name=args.model, provenance=str(args.infile)
        )
        pred_path = _predictions_path(cfg, args.model, topic)
        pred_path.parent.mkdir(parents=True, exist_ok=True)
        write_predictions_file(
            pred_path, [p.id for p in ds.test], imported.labels_for(ds)
        )
        print(f"imported {len(imported.predictions)} predictions -> {pred_path}")
    return 0


def cmd_tune(args) -> int:
    cfg = _load_config(args)
    section = cfg.tune_section()
    topic = args.topic or section["topic"]
    ds = cfg.load_topic_dataset(topic)
    recorder = SplitAccessRecorder(ds)
    result = grid_search_svm(
        recorder,
        args.model or section["model"],
        section["grid"],
        folds=section.get("folds", 5),
        seed=cfg.seed,
    )
    if "test" in result.splits_accessed:
        raise ValidationError("tuning touched the test split")
    out = cfg.out_dir / "tune"
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "config_hash": cfg.hash(),
        "master_seed": cfg.seed,
        "model": result.model_name,
        "topic": result.topic,
        "best_params": result.best_params,
        "best_score": round(result.best_score, 6),
        "splits_accessed": sorted(result.splits_accessed),
        "results": [
            {"params": params, "score": None if s is None else round(s, 6)}
            for params, s in result.results
        ],
    }
    path = out / f"{result.model_name}_{result.topic}.json"
    path.write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")
    print(
        f"best {result.model_name}/{result.topic}: {result.best_params} "
        f"(cv metric {result.best_score:.4f}) -> {path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stancebench",
        description="Stance detection benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration JSON file")
        p.add_argument("--topic", help="restrict to one topic code")
        p.add_argument("--model", help="model name")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        return p

    common(sub.add_parser("ingest", help="load, validate, and re-serialize datasets"))
    stats = common(sub.add_parser("stats", help="print per-topic class counts"))
    stats.add_argument(
        "--expect-published",
        action="store_true",
        help="fail on any mismatch with the published official counts",
    )
    common(sub.add_parser("preprocess", help="dump preprocessed token sequences"))
    common(sub.add_parser("train", help="train a model and write test predictions"))
    common(sub.add_parser("predict", help="predict from saved artifacts"))
    evaluate = common(sub.add_parser("evaluate", help="score a predictions file"))
    evaluate.add_argument("--pred", help="explicit predictions file to score")
    compare = common(sub.add_parser("compare", help="cross-model comparison table"))
    compare.add_argument(
        "--reference-rows",
        action="store_true",
        help="append published reference result rows",
    )
    common(sub.add_parser("error-analysis", help="posts every model misclassified"))
    common(sub.add_parser("grad-check", help="finite-difference gradient checks"))
    theorem = common(
        sub.add_parser("theorem-check", help="attention target-invariance suite")
    )
    theorem.add_argument("--trials", type=int, default=100)
    theorem.add_argument("--posts", type=int, default=10)
    imp = common(sub.add_parser("import-external", help="import external predictions"))
    imp.add_argument("--in", dest="infile", help="predictions file to import")
    common(sub.add_parser("tune", help="5-fold CV grid search on the training split"))
    return parser


_HANDLERS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "error-analysis": cmd_error_analysis,
    "grad-check": cmd_grad_check,
    "theorem-check": cmd_theorem_check,
    "import-external": cmd_import_external,
    "tune": cmd_tune,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except StanceBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failure boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
