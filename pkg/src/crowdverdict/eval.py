"""ROC/AUC computation and the three experiment designs.

* agreement grid: train a forest per reviewer-agreement level, evaluate each
  on every agreement level's held-out stratum (3x3 reports).
* model comparison: performance / report / chat / full feature families on a
  shared train/test split, for the decision task or either one-vs-rest
  overwhelming-majority task.
* portability: train on one corpus, evaluate on a disjoint corpus, optionally
  zeroing chat features for lexicon-less regions.

Splits are seeded and stratified; every report carries a fingerprint with the
parameters and seeds that reproduce it.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import AgreementLevel, Case, Decision
from .errors import DataError, SchemaMismatchError, StratumError
from .features import FeatureMatrix, ModelFamily, extract_matrix
from .forest import RandomForest, TrainConfig, fit_forest_arrays, predict_matrix
from .valence import ValenceLexicon


class Task(enum.Enum):
    """Prediction target.

    DECISION is punish vs pardon; the OM tasks are one-vs-rest over the full
    population (positive = the overwhelming-majority verdict of that kind).
    """

    DECISION = "decision"
    OM_PARDON = "om_pardon"
    OM_PUNISH = "om_punish"


DEFAULT_TEST_FRACTION = 0.2


@dataclass(frozen=True)
class ExperimentConfig:
    forest: TrainConfig = TrainConfig()
    split_seed: int = 0
    test_fraction: float = DEFAULT_TEST_FRACTION

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise DataError("test_fraction must be in (0, 1)")


@dataclass(frozen=True)
class RocCurve:
    """Points from (0,0) to (1,1); one point per distinct score, plus the origin."""

    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    thresholds: tuple[float, ...]  # score cutoff per point; inf at the origin

    def __len__(self) -> int:
        return len(self.fpr)

    def to_rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.fpr, self.tpr, self.thresholds))


def roc_auc(scored: Sequence[tuple[float, object]]) -> tuple[RocCurve, float]:
    """ROC curve over distinct score thresholds and its trapezoidal AUC.

    ``scored`` holds (score, label) pairs; labels may be Decision values,
    bools, or 0/1 ints (truthy = positive).  Tied scores collapse into a
    single curve point.
    """
    if not scored:
        raise DataError("roc_auc requires at least one scored example")
    scores = np.asarray([s for s, _ in scored], dtype=np.float64)
    labels = np.asarray(
        [(lbl is Decision.PUNISH if isinstance(lbl, Decision) else bool(lbl)) for _, lbl in scored],
        dtype=np.int64,
    )
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise DataError("roc_auc requires both labels to be present")
    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    l_sorted = labels[order]
    # Group ties: one curve point per distinct score.
    distinct_end = np.nonzero(np.diff(s_sorted))[0]
    ends = np.concatenate([distinct_end, [len(s_sorted) - 1]])
    tp_cum = np.cumsum(l_sorted)[ends]
    fp_cum = (ends + 1) - tp_cum
    fpr = np.concatenate([[0.0], fp_cum / neg])
    tpr = np.concatenate([[0.0], tp_cum / pos])
    thresholds = np.concatenate([[np.inf], s_sorted[ends]])
    auc = float(np.trapezoid(tpr, fpr))
    return (
        RocCurve(fpr=tuple(map(float, fpr)), tpr=tuple(map(float, tpr)), thresholds=tuple(map(float, thresholds))),
        auc,
    )


@dataclass(frozen=True)
class ExperimentReport:
    task: Task
    model: ModelFamily
    train_selector: str
    test_selector: str
    auc: float
    curve: RocCurve
    n_train: int
    n_test: int
    n_features: int
    fingerprint: dict

    def to_dict(self, include_curve: bool = True) -> dict:
        out = {
            "task": self.task.value,
            "model": self.model.value,
            "train_selector": self.train_selector,
            "test_selector": self.test_selector,
            "auc": round(self.auc, 4),
            "auc_raw": self.auc,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "n_features": self.n_features,
            "fingerprint": self.fingerprint,
        }
        if include_curve:
            out["curve"] = {
                "fpr": list(self.curve.fpr),
                "tpr": list(self.curve.tpr),
                "thresholds": [repr(t) if not np.isfinite(t) else t for t in self.curve.thresholds],
            }
        return out


# --------------------------------------------------------------------------
# Splits


def stratified_split(
    strata: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded disjoint train/test indices with per-stratum proportions."""
    train_parts = []
    test_parts = []
    for value in np.unique(strata):
        idx = np.nonzero(strata == value)[0]
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, int(value)))))
        perm = idx[gen.permutation(idx.size)]
        n_test = max(1, int(round(idx.size * test_fraction))) if idx.size > 1 else 0
        test_parts.append(perm[:n_test])
        train_parts.append(perm[n_test:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def _task_labels(matrix: FeatureMatrix, task: Task) -> np.ndarray:
    om = AgreementLevel.OVERWHELMING_MAJORITY.rank
    if task is Task.DECISION:
        return matrix.y.astype(np.uint8)
    if task is Task.OM_PARDON:
        return ((matrix.agreement == om) & (matrix.y == 0)).astype(np.uint8)
    return ((matrix.agreement == om) & (matrix.y == 1)).astype(np.uint8)


def _corpus_fingerprint(matrix: FeatureMatrix) -> str:
    h = hashlib.sha256()
    h.update(matrix.x.tobytes())
    h.update(matrix.y.tobytes())
    h.update(matrix.agreement.tobytes())
    return h.hexdigest()[:16]


def _fingerprint(
    task: Task,
    model: ModelFamily,
    train_selector: str,
    test_selector: str,
    config: ExperimentConfig,
    seed: int,
    corpus_ids: dict[str, str],
    zero_chat: bool = False,
) -> dict:
    return {
        "task": task.value,
        "model": model.value,
        "train_selector": train_selector,
        "test_selector": test_selector,
        "forest": {**config.forest.to_dict(), "rng_seed": seed},
        "split_seed": config.split_seed,
        "test_fraction": config.test_fraction,
        "schema_version": "",  # filled by caller
        "zero_chat": zero_chat,
        **corpus_ids,
    }


def _evaluate(
    forest: RandomForest, x_test: np.ndarray, labels_test: np.ndarray
) -> tuple[RocCurve, float]:
    scores = predict_matrix(forest, x_test)
    return roc_auc(list(zip(scores.tolist(), labels_test.tolist())))


# --------------------------------------------------------------------------
# Experiments


_AGREEMENT_NAMES = {level.rank: level.value for level in AgreementLevel}


def run_agreement_grid(
    cases: Sequence[Case],
    lexicon: ValenceLexicon,
    config: ExperimentConfig = ExperimentConfig(),
) -> dict[tuple[AgreementLevel, AgreementLevel], ExperimentReport]:
    """Fig-style 3x3 grid: forests trained per agreement level, tested per level.

    One shared split (stratified jointly by agreement and label) keeps train
    and test disjoint across all nine cells.
    """
    matrix = extract_matrix(cases, lexicon, ModelFamily.FULL)
    strata = matrix.agreement.astype(np.int64) * 2 + matrix.y
    train_idx, test_idx = stratified_split(strata, config.test_fraction, config.split_seed)
    corpus_id = {"corpus": _corpus_fingerprint(matrix)}

    for level in AgreementLevel:
        for label in (0, 1):
            for side, idx in (("train", train_idx), ("test", test_idx)):
                member = (matrix.agreement[idx] == level.rank) & (matrix.y[idx] == label)
                if not member.any():
                    decision = Decision.PUNISH if label else Decision.PARDON
                    raise StratumError(
                        f"empty {side} stratum: {level.value}/{decision.value}"
                    )

    reports: dict[tuple[AgreementLevel, AgreementLevel], ExperimentReport] = {}
    for train_level in AgreementLevel:
        rows = train_idx[matrix.agreement[train_idx] == train_level.rank]
        seed = int(np.random.SeedSequence((config.forest.rng_seed, train_level.rank)).generate_state(1)[0])
        cell_config = TrainConfig(**{**config.forest.to_dict(), "rng_seed": seed})
        forest = fit_forest_arrays(
            matrix.x[rows], matrix.y[rows], cell_config, schema_version=matrix.schema_version
        )
        for test_level in AgreementLevel:
            test_rows = test_idx[matrix.agreement[test_idx] == test_level.rank]
            curve, auc = _evaluate(forest, matrix.x[test_rows], matrix.y[test_rows])
            fp = _fingerprint(
                Task.DECISION,
                ModelFamily.FULL,
                f"agreement={train_level.value}",
                f"agreement={test_level.value}",
                config,
                seed,
                corpus_id,
            )
            fp["schema_version"] = matrix.schema_version
            reports[(train_level, test_level)] = ExperimentReport(
                task=Task.DECISION,
                model=ModelFamily.FULL,
                train_selector=f"agreement={train_level.value}",
                test_selector=f"agreement={test_level.value}",
                auc=auc,
                curve=curve,
                n_train=int(rows.size),
                n_test=int(test_rows.size),
                n_features=matrix.n_features,
                fingerprint=fp,
            )
    return reports


def run_model_comparison(
    cases: Sequence[Case],
    lexicon: ValenceLexicon,
    task: Task = Task.DECISION,
    config: ExperimentConfig = ExperimentConfig(),
) -> dict[ModelFamily, ExperimentReport]:
    """One report per feature family on a shared stratified train/test split."""
    full = extract_matrix(cases, lexicon, ModelFamily.FULL)
    labels = _task_labels(full, task)
    if labels.sum() == 0 or labels.sum() == len(labels):
        raise StratumError(f"corpus does not support task {task.value}: one class is empty")
    train_idx, test_idx = stratified_split(labels.astype(np.int64), config.test_fraction, config.split_seed)
    corpus_id = {"corpus": _corpus_fingerprint(full)}

    reports: dict[ModelFamily, ExperimentReport] = {}
    for family_index, model in enumerate(
        (ModelFamily.PERFORMANCE, ModelFamily.REPORT, ModelFamily.CHAT, ModelFamily.FULL)
    ):
        sub = full.select_model(model)
        seed = int(np.random.SeedSequence((config.forest.rng_seed, family_index)).generate_state(1)[0])
        cell_config = TrainConfig(**{**config.forest.to_dict(), "rng_seed": seed})
        forest = fit_forest_arrays(
            sub.x[train_idx], labels[train_idx], cell_config, schema_version=sub.schema_version
        )
        curve, auc = _evaluate(forest, sub.x[test_idx], labels[test_idx])
        fp = _fingerprint(
            task, model, "split=train", "split=test", config, seed, corpus_id
        )
        fp["schema_version"] = sub.schema_version
        reports[model] = ExperimentReport(
            task=task,
            model=model,
            train_selector="split=train",
            test_selector="split=test",
            auc=auc,
            curve=curve,
            n_train=int(train_idx.size),
            n_test=int(test_idx.size),
            n_features=sub.n_features,
            fingerprint=fp,
        )
    return reports


def run_portability(
    train_cases: Sequence[Case],
    test_cases: Sequence[Case],
    lexicon: ValenceLexicon,
    task: Task = Task.DECISION,
    config: ExperimentConfig = ExperimentConfig(),
    model: ModelFamily = ModelFamily.FULL,
    zero_chat: bool = False,
) -> ExperimentReport:
    """Train on one corpus, evaluate on another.

    ``zero_chat`` blanks the chat family on both sides, emulating a region
    whose chat language the lexicon cannot score.
    """
    train_full = extract_matrix(train_cases, lexicon, ModelFamily.FULL)
    test_full = extract_matrix(test_cases, lexicon, ModelFamily.FULL)
    if train_full.schema_version != test_full.schema_version:
        raise SchemaMismatchError("train and test corpora use different feature schemas")
    if zero_chat:
        train_full = train_full.zero_chat()
        test_full = test_full.zero_chat()
    train = train_full.select_model(model)
    test = test_full.select_model(model)
    train_labels = _task_labels(train, task)
    test_labels = _task_labels(test, task)
    forest = fit_forest_arrays(
        train.x, train_labels, config.forest, schema_version=train.schema_version
    )
    curve, auc = _evaluate(forest, test.x, test_labels)
    train_region = _region_selector(train_full)
    test_region = _region_selector(test_full)
    fp = _fingerprint(
        task,
        model,
        train_region,
        test_region,
        config,
        config.forest.rng_seed,
        {"train_corpus": _corpus_fingerprint(train_full), "test_corpus": _corpus_fingerprint(test_full)},
        zero_chat=zero_chat,
    )
    fp["schema_version"] = train.schema_version
    return ExperimentReport(
        task=task,
        model=model,
        train_selector=train_region,
        test_selector=test_region,
        auc=auc,
        curve=curve,
        n_train=train.n_cases,
        n_test=test.n_cases,
        n_features=train.n_features,
        fingerprint=fp,
    )


def _region_selector(matrix: FeatureMatrix) -> str:
    from .domain import Region

    present = sorted({int(v) for v in np.unique(matrix.region)})
    names = ",".join(tuple(Region)[v].value for v in present)
    return f"region={names}"
