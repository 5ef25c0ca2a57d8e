"""Command-line entry point.

Subcommands: gen, validate, summarize, extract, train, predict, rank,
eval-grid, eval-models, eval-portability, impact.  Every file-producing run
writes a ``run_manifest.json`` next to its outputs with the resolved
parameters, seeds, and input digests needed to reproduce it.  Flags mirror
config-file keys one-to-one; a JSON config supplies defaults and explicit
flags win.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .domain import (
    Region,
    format_summary_table,
    load_dataset,
    save_dataset,
    summarize_dataset,
    validate_case,
)
from .errors import DataError
from .eval import (
    ExperimentConfig,
    ExperimentReport,
    Task,
    run_agreement_grid,
    run_model_comparison,
    run_portability,
)
from .features import (
    SCHEMA,
    ModelFamily,
    extract_matrix,
    read_matrix_csv,
    write_manifest,
    write_matrix_csv,
)
from .forest import (
    TrainConfig,
    fit_forest,
    load_model,
    predict_matrix,
    rank_matrix,
    save_model,
)
from .impact import (
    EconomyParams,
    PopulationParams,
    ThroughputParams,
    format_impact_table,
    impact_summary,
)
from .synth import GeneratorConfig, corpus_report, generate_dataset
from .valence import bundled_lexicon_path, load_lexicon


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_config_file(args) -> dict:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise DataError("config file must hold a JSON object")
        return obj
    return {}


def _resolve(args, config: dict, key: str, default):
    """Flag value if given, else config-file value, else built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _write_manifest(out_dir: Path, subcommand: str, parameters: dict, inputs: dict, outputs: list[str]):
    manifest = {
        "tool": "crowdverdict",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": {name: {"path": str(p), "sha256": _sha256(Path(p))} for name, p in inputs.items()},
        "outputs": sorted(outputs),
        "schema_version": SCHEMA.version,
    }
    path = out_dir / "run_manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(args) -> Path | None:
    out = getattr(args, "out", None)
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _lexicon_path(args, config: dict) -> Path:
    return Path(_resolve(args, config, "lexicon", bundled_lexicon_path()))


def _forest_config(args, config: dict) -> TrainConfig:
    return TrainConfig(
        n_trees=int(_resolve(args, config, "trees", 200)),
        max_depth=_resolve(args, config, "max_depth", None),
        min_leaf=int(_resolve(args, config, "min_leaf", 5)),
        features_per_split=_resolve(args, config, "features_per_split", None),
        bootstrap=not bool(_resolve(args, config, "no_bootstrap", False)),
        rng_seed=int(_resolve(args, config, "seed", 0)),
    )


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_reports(out_dir: Path, reports: list[ExperimentReport], stem: str) -> list[str]:
    outputs = []
    rows = []
    for report in reports:
        tag = (
            f"{report.task.value}_{report.model.value}_"
            f"{report.train_selector}_{report.test_selector}"
        ).replace("=", "-").replace(",", "+").replace(" ", "")
        report_name = f"{stem}_{tag}.json"
        _write_json(out_dir / report_name, report.to_dict())
        outputs.append(report_name)
        roc_name = f"roc_{stem}_{tag}.csv"
        with open(out_dir / roc_name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fpr", "tpr", "threshold"])
            for fpr, tpr, thr in report.curve.to_rows():
                writer.writerow([f"{fpr:.9g}", f"{tpr:.9g}", f"{thr:.9g}"])
        outputs.append(roc_name)
        rows.append(
            [report.task.value, report.model.value, report.train_selector,
             report.test_selector, f"{report.auc:.4f}"]
        )
    agg_name = f"{stem}_summary.csv"
    with open(out_dir / agg_name, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task", "model", "train_selector", "test_selector", "auc"])
        writer.writerows(rows)
    outputs.append(agg_name)
    return outputs


# --------------------------------------------------------------------------
# Subcommands


def _cmd_gen(args) -> int:
    config_file = _load_config_file(args)
    mix = _resolve(args, config_file, "agreement_mix", None)
    noise = _resolve(args, config_file, "noise_schedule", None)
    kwargs = {}
    if mix is not None:
        kwargs["agreement_mix"] = tuple(float(v) for v in mix)
    if noise is not None:
        kwargs["noise_schedule"] = tuple(float(v) for v in noise)
    for key in ("noise_flip_weight", "severity_skew", "severity_agreement_noise"):
        value = _resolve(args, config_file, key, None)
        if value is not None:
            kwargs[key] = float(value)
    gen_config = GeneratorConfig(
        n_cases=int(_resolve(args, config_file, "n", 1000)),
        region=Region(_resolve(args, config_file, "region", "na")),
        punish_rate=float(_resolve(args, config_file, "punish_rate", 0.5)),
        report_link=float(_resolve(args, config_file, "report_link", 1.0)),
        performance_link=float(_resolve(args, config_file, "performance_link", 1.0)),
        chat_link=float(_resolve(args, config_file, "chat_link", 1.0)),
        valence_link=float(_resolve(args, config_file, "valence_link", 1.0)),
        report_intensity_scale=float(_resolve(args, config_file, "report_intensity_scale", 1.0)),
        rng_seed=int(_resolve(args, config_file, "seed", 0)),
        **kwargs,
    )
    lexicon_path = _lexicon_path(args, config_file)
    lexicon = load_lexicon(lexicon_path)
    out_dir = _out_dir(args)
    if out_dir is None:
        raise DataError("gen requires --out DIRECTORY")
    _log(f"generating {gen_config.n_cases} cases (seed {gen_config.rng_seed})")
    corpus = generate_dataset(gen_config, lexicon)
    cases_path = out_dir / "cases.jsonl"
    save_dataset(corpus.cases, cases_path)
    with open(out_dir / "ground_truth.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"summary": corpus.ground_truth.summary}, sort_keys=True))
        fh.write("\n")
        for entry in corpus.ground_truth.per_case:
            fh.write(json.dumps(entry, sort_keys=True))
            fh.write("\n")
    _write_manifest(
        out_dir,
        "gen",
        {**gen_config.to_dict(), "lexicon": str(lexicon_path)},
        {"lexicon": lexicon_path},
        ["cases.jsonl", "ground_truth.jsonl"],
    )
    _log(f"wrote {cases_path}")
    return 0


def _cmd_validate(args) -> int:
    n = 0
    for case in load_dataset(args.cases):
        result = validate_case(case)
        if not result.ok:
            for violation in result.violations:
                print(f"{case.case_id}: {violation}")
            raise DataError(f"case {case.case_id} failed validation")
        n += 1
    print(f"ok: {n} cases valid")
    return 0


def _cmd_summarize(args) -> int:
    summary = summarize_dataset(load_dataset(args.cases))
    print(format_summary_table(summary))
    out_dir = _out_dir(args)
    if out_dir is not None:
        _write_json(out_dir / "summary.json", summary.to_dict())
        _write_manifest(out_dir, "summarize", {"cases": str(args.cases)}, {"cases": Path(args.cases)}, ["summary.json"])
    return 0


def _cmd_extract(args) -> int:
    config_file = _load_config_file(args)
    model = ModelFamily(_resolve(args, config_file, "model", "full"))
    lexicon_path = _lexicon_path(args, config_file)
    lexicon = load_lexicon(lexicon_path)
    cases = list(load_dataset(args.cases))
    _log(f"extracting {model.value} features for {len(cases)} cases")
    matrix = extract_matrix(cases, lexicon, model)
    out_dir = _out_dir(args)
    if out_dir is None:
        raise DataError("extract requires --out DIRECTORY")
    write_matrix_csv(matrix, out_dir / "features.csv")
    write_manifest(out_dir / "schema_manifest.json")
    _write_manifest(
        out_dir,
        "extract",
        {"cases": str(args.cases), "lexicon": str(lexicon_path), "model": model.value},
        {"cases": Path(args.cases), "lexicon": lexicon_path},
        ["features.csv", "schema_manifest.json"],
    )
    return 0


def _cmd_train(args) -> int:
    config_file = _load_config_file(args)
    forest_config = _forest_config(args, config_file)
    matrix = read_matrix_csv(args.features)
    _log(f"training on {matrix.n_cases} rows x {matrix.n_features} features")
    forest = fit_forest(matrix, forest_config)
    out_dir = _out_dir(args)
    if out_dir is None:
        raise DataError("train requires --out DIRECTORY")
    save_model(forest, out_dir / "model.json")
    _write_manifest(
        out_dir,
        "train",
        {"features": str(args.features), **forest_config.to_dict()},
        {"features": Path(args.features)},
        ["model.json"],
    )
    return 0


def _cmd_predict(args) -> int:
    matrix = read_matrix_csv(args.features)
    forest = load_model(args.model, expected_schema_version=matrix.schema_version)
    if forest.n_features != matrix.n_features:
        raise DataError(
            f"model expects {forest.n_features} features, matrix has {matrix.n_features}"
        )
    scores = predict_matrix(forest, matrix.x)
    out_dir = _out_dir(args)
    if out_dir is None:
        raise DataError("predict requires --out DIRECTORY")
    with open(out_dir / "scores.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "punish_probability"])
        for i, score in enumerate(scores):
            writer.writerow([i, f"{score:.9g}"])
    _write_manifest(
        out_dir,
        "predict",
        {"model": str(args.model), "features": str(args.features)},
        {"model": Path(args.model), "features": Path(args.features)},
        ["scores.csv"],
    )
    return 0


def _cmd_rank(args) -> int:
    matrix = read_matrix_csv(args.features)
    ranking = rank_matrix(matrix)
    top = args.top if args.top is not None else 5
    for position, (name, gain) in enumerate(ranking[:top], start=1):
        print(f"{position}\t{name}\t{gain:.6f}")
    out_dir = _out_dir(args)
    if out_dir is not None:
        with open(out_dir / "ranking.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rank", "feature", "information_gain_bits"])
            for position, (name, gain) in enumerate(ranking, start=1):
                writer.writerow([position, name, f"{gain:.9g}"])
        _write_manifest(
            out_dir,
            "rank",
            {"features": str(args.features), "top": top},
            {"features": Path(args.features)},
            ["ranking.csv"],
        )
    return 0


def _experiment_config(args, config_file: dict) -> ExperimentConfig:
    return ExperimentConfig(
        forest=_forest_config(args, config_file),
        split_seed=int(_resolve(args, config_file, "split_seed", 0)),
        test_fraction=float(_resolve(args, config_file, "test_fraction", 0.2)),
    )


def _cmd_eval_grid(args) -> int:
    config_file = _load_config_file(args)
    lexicon = load_lexicon(_lexicon_path(args, config_file))
    cases = list(load_dataset(args.cases))
    config = _experiment_config(args, config_file)
    _log(f"agreement grid on {len(cases)} cases")
    reports = run_agreement_grid(cases, lexicon, config)
    ordered = [reports[key] for key in sorted(reports, key=lambda k: (k[0].rank, k[1].rank))]
    for report in ordered:
        print(
            f"train {report.train_selector} -> test {report.test_selector}: "
            f"auc {report.auc:.4f}"
        )
    out_dir = _out_dir(args)
    if out_dir is not None:
        outputs = _write_reports(out_dir, ordered, "grid")
        _write_manifest(
            out_dir,
            "eval-grid",
            {"cases": str(args.cases), **config.forest.to_dict(),
             "split_seed": config.split_seed, "test_fraction": config.test_fraction},
            {"cases": Path(args.cases)},
            outputs,
        )
    return 0


def _cmd_eval_models(args) -> int:
    config_file = _load_config_file(args)
    lexicon = load_lexicon(_lexicon_path(args, config_file))
    cases = list(load_dataset(args.cases))
    task = Task(_resolve(args, config_file, "task", "decision"))
    config = _experiment_config(args, config_file)
    _log(f"model comparison ({task.value}) on {len(cases)} cases")
    reports = run_model_comparison(cases, lexicon, task, config)
    ordered = [reports[m] for m in (ModelFamily.PERFORMANCE, ModelFamily.REPORT, ModelFamily.CHAT, ModelFamily.FULL)]
    for report in ordered:
        print(f"{report.model.value}: auc {report.auc:.4f} ({report.n_features} features)")
    out_dir = _out_dir(args)
    if out_dir is not None:
        outputs = _write_reports(out_dir, ordered, "models")
        _write_manifest(
            out_dir,
            "eval-models",
            {"cases": str(args.cases), "task": task.value, **config.forest.to_dict(),
             "split_seed": config.split_seed, "test_fraction": config.test_fraction},
            {"cases": Path(args.cases)},
            outputs,
        )
    return 0


def _cmd_eval_portability(args) -> int:
    config_file = _load_config_file(args)
    lexicon = load_lexicon(_lexicon_path(args, config_file))
    train_cases = list(load_dataset(args.train_cases))
    test_cases = list(load_dataset(args.test_cases))
    task = Task(_resolve(args, config_file, "task", "decision"))
    model = ModelFamily(_resolve(args, config_file, "model", "full"))
    config = _experiment_config(args, config_file)
    zero_chat = bool(_resolve(args, config_file, "zero_chat", False))
    report = run_portability(
        train_cases, test_cases, lexicon, task, config, model=model, zero_chat=zero_chat
    )
    print(
        f"train {report.train_selector} -> test {report.test_selector} "
        f"[{report.model.value}, zero_chat={zero_chat}]: auc {report.auc:.4f}"
    )
    out_dir = _out_dir(args)
    if out_dir is not None:
        outputs = _write_reports(out_dir, [report], "portability")
        _write_manifest(
            out_dir,
            "eval-portability",
            {"train_cases": str(args.train_cases), "test_cases": str(args.test_cases),
             "task": task.value, "model": model.value, "zero_chat": zero_chat,
             **config.forest.to_dict(), "split_seed": config.split_seed,
             "test_fraction": config.test_fraction},
            {"train_cases": Path(args.train_cases), "test_cases": Path(args.test_cases)},
            outputs,
        )
    return 0


def _cmd_impact(args) -> int:
    config_file = _load_config_file(args)

    def val(key, default):
        return float(_resolve(args, config_file, key, default))

    throughput = ThroughputParams(
        total_votes=val("total_votes", 105_000_000.0),
        toxic_players=val("toxic_players", 560_000.0),
        votes_first_year=val("votes_first_year", 47_000_000.0),
        votes_per_second=val("votes_per_second", 1.49),
        majority_vote_fraction=val("majority_vote_fraction", 0.5),
    )
    economy = EconomyParams(
        ip_per_vote=val("ip_per_vote", 5.0),
        champion_ip=val("champion_ip", 450.0),
        champion_rp=val("champion_rp", 260.0),
        usd_per_bundle=val("usd_per_bundle", 10.0),
        rp_per_bundle=val("rp_per_bundle", 1380.0),
    )
    population = PopulationParams(
        daily_players=val("daily_players", 12_000_000.0),
        minutes_per_day=val("minutes_per_day", 83.0),
        match_minutes=val("match_minutes", 37.5),
        matches_per_day=val("matches_per_day", 2.21),
        innocents_per_match=val("innocents_per_match", 9.0),
    )
    paper_mode = bool(getattr(args, "paper_mode", False) or config_file.get("paper_mode", False))
    summary = impact_summary(throughput, economy, population, paper_mode)
    print(format_impact_table(summary))
    print(json.dumps(summary, sort_keys=True))
    out_dir = _out_dir(args)
    if out_dir is not None:
        _write_json(out_dir / "impact.json", summary)
        _write_manifest(out_dir, "impact", summary, {}, ["impact.json"])
    return 0


# --------------------------------------------------------------------------
# Parser assembly


def build_parser() -> _Parser:
    parser = _Parser(prog="crowdverdict", description=__doc__)
    parser.add_argument("--version", action="version", version=f"crowdverdict {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; explicit flags win")
        p.add_argument("--out", help="output directory (artifacts + run manifest)")

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    add_common(p)
    p.add_argument("--n", type=int, help="number of cases (default 1000)")
    p.add_argument("--seed", type=int, help="generator seed (default 0)")
    p.add_argument("--region", choices=[r.value for r in Region], help="corpus region tag")
    p.add_argument("--punish-rate", dest="punish_rate", type=float)
    p.add_argument("--agreement-mix", dest="agreement_mix", type=float, nargs=3,
                   metavar=("MAJ", "SM", "OM"))
    p.add_argument("--noise-schedule", dest="noise_schedule", type=float, nargs=3,
                   metavar=("MAJ", "SM", "OM"))
    p.add_argument("--noise-flip-weight", dest="noise_flip_weight", type=float)
    p.add_argument("--severity-skew", dest="severity_skew", type=float)
    p.add_argument("--severity-agreement-noise", dest="severity_agreement_noise", type=float)
    p.add_argument("--report-link", dest="report_link", type=float)
    p.add_argument("--performance-link", dest="performance_link", type=float)
    p.add_argument("--chat-link", dest="chat_link", type=float)
    p.add_argument("--valence-link", dest="valence_link", type=float)
    p.add_argument("--report-intensity-scale", dest="report_intensity_scale", type=float)
    p.add_argument("--lexicon", help="valence lexicon file (default: bundled test lexicon)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="validate a corpus file")
    add_common(p)
    p.add_argument("--cases", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("summarize", help="per-region corpus counts")
    add_common(p)
    p.add_argument("--cases", required=True)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("extract", help="extract a feature matrix CSV")
    add_common(p)
    p.add_argument("--cases", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--model", choices=[m.value for m in ModelFamily])
    p.set_defaults(func=_cmd_extract)

    def add_forest_flags(p):
        p.add_argument("--trees", type=int)
        p.add_argument("--max-depth", dest="max_depth", type=int)
        p.add_argument("--min-leaf", dest="min_leaf", type=int)
        p.add_argument("--features-per-split", dest="features_per_split", type=int)
        p.add_argument("--no-bootstrap", dest="no_bootstrap", action="store_const", const=True)
        p.add_argument("--seed", type=int, help="forest seed (default 0)")

    p = sub.add_parser("train", help="train a forest on a feature CSV")
    add_common(p)
    p.add_argument("--features", required=True)
    add_forest_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score a feature CSV with a trained model")
    add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("rank", help="information-gain feature ranking")
    add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--top", type=int, help="rows to print (default 5)")
    p.set_defaults(func=_cmd_rank)

    def add_eval_flags(p):
        add_forest_flags(p)
        p.add_argument("--split-seed", dest="split_seed", type=int)
        p.add_argument("--test-fraction", dest="test_fraction", type=float)
        p.add_argument("--lexicon")

    p = sub.add_parser("eval-grid", help="train/test AUC per agreement level (3x3)")
    add_common(p)
    p.add_argument("--cases", required=True)
    add_eval_flags(p)
    p.set_defaults(func=_cmd_eval_grid)

    p = sub.add_parser("eval-models", help="compare feature-family models")
    add_common(p)
    p.add_argument("--cases", required=True)
    p.add_argument("--task", choices=[t.value for t in Task])
    add_eval_flags(p)
    p.set_defaults(func=_cmd_eval_models)

    p = sub.add_parser("eval-portability", help="train on one corpus, test on another")
    add_common(p)
    p.add_argument("--train-cases", dest="train_cases", required=True)
    p.add_argument("--test-cases", dest="test_cases", required=True)
    p.add_argument("--task", choices=[t.value for t in Task])
    p.add_argument("--model", choices=[m.value for m in ModelFamily])
    p.add_argument("--zero-chat", dest="zero_chat", action="store_const", const=True,
                   help="zero chat features on both sides (lexicon-less region mode)")
    add_eval_flags(p)
    p.set_defaults(func=_cmd_eval_portability)

    p = sub.add_parser("impact", help="cost/throughput/victim estimates")
    add_common(p)
    p.add_argument("--paper-mode", dest="paper_mode", action="store_const", const=True,
                   help="round the per-vote price to $0.02 for the headline cost")
    for flag in (
        "total-votes", "toxic-players", "votes-first-year", "votes-per-second",
        "majority-vote-fraction", "ip-per-vote", "champion-ip", "champion-rp",
        "usd-per-bundle", "rp-per-bundle", "daily-players", "minutes-per-day",
        "match-minutes", "matches-per-day", "innocents-per-match",
    ):
        p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), type=float)
    p.set_defaults(func=_cmd_impact)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal invariant failures
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
