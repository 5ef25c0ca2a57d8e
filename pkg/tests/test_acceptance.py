"""Acceptance suite: one test per criterion, one printed PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Exact-arithmetic criteria assert published figures; statistical
criteria run on the seeded synthetic corpora from conftest and assert the
stated tolerances.
"""

import random

import numpy as np
import pytest

from crowdverdict.domain import AgreementLevel, Decision, Region, validate_case
from crowdverdict.eval import (
    ExperimentConfig,
    Task,
    roc_auc,
    run_agreement_grid,
    run_portability,
    stratified_split,
)
from crowdverdict.features import (
    N_CHAT,
    N_FEATURES,
    N_PERFORMANCE,
    N_REPORT,
    SCHEMA,
    ModelFamily,
    extract_feature_vector,
    extract_matrix,
)
from crowdverdict.forest import (
    TrainConfig,
    best_split,
    fit_forest_arrays,
    predict_matrix,
    rank_features_information_gain,
    serialize_forest,
)
from crowdverdict.impact import (
    first_year_cost_usd,
    seconds_per_case,
    victims_protected,
    vote_cost_usd,
    votes_per_case,
)
from crowdverdict.synth import GeneratorConfig, corpus_report, generate_dataset
from crowdverdict.valence import score_text

from conftest import make_case
from test_eval import pairwise_auc
from test_forest import brute_force_best_split
from test_valence import oracle_score


def report(criterion: str, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS  [{detail}]")


FOREST_CONFIG = TrainConfig(n_trees=48, min_leaf=5, rng_seed=0)
GRID_CONFIG = ExperimentConfig(forest=TrainConfig(n_trees=96, min_leaf=5, rng_seed=0), split_seed=0)


def test_criterion_1_impact_arithmetic():
    """Published operational figures reproduce at the stated tolerances."""
    assert votes_per_case() == 187.5
    assert seconds_per_case() == pytest.approx(125.85, abs=0.02)
    assert round(vote_cost_usd(), 2) == 0.02
    assert first_year_cost_usd(paper_mode=True) == 470_000.0
    victims = victims_protected()
    assert victims.toxic_per_day == pytest.approx(686.75, abs=0.05)
    assert victims.toxic_matches_per_day == pytest.approx(1517.74, abs=0.2)
    assert victims.innocents_exposed_per_day == pytest.approx(13659.61, abs=1.0)
    report(
        "1 impact arithmetic",
        f"votes/case 187.5, s/case {seconds_per_case():.2f}, "
        f"cost ${vote_cost_usd():.4f}, year ${first_year_cost_usd(paper_mode=True):,.0f}",
    )


def test_criterion_2_valence_oracle(lexicon):
    """score_text equals a brute-force token-count oracle on 1,000 random texts."""
    rng = random.Random(20240808)
    vocabulary = list(lexicon.entries) + ["zzz", "qqq", "xx1", "don't", "noob2", "..."]
    zero_matches = 0
    for _ in range(1000):
        text = " ".join(rng.choice(vocabulary) for _ in range(rng.randint(0, 40)))
        got = score_text(lexicon, text)
        want = oracle_score(lexicon.entries, text)
        assert abs(got - want) < 1e-9
        if want == 0.0:
            assert got == 0.0
            zero_matches += 1
    report("2 valence oracle", f"1000 texts within 1e-9, {zero_matches} zero-match texts exact 0")


def test_criterion_3_feature_schema(corpus_small, lexicon):
    """452 = 364 + 28 + 60; fixture oracle equality; permutation invariance."""
    assert N_FEATURES == 452
    assert (N_PERFORMANCE, N_REPORT, N_CHAT) == (364, 28, 60)
    case = corpus_small.cases[0]
    vec = extract_feature_vector(case, lexicon, ModelFamily.FULL)
    assert len(vec) == 452

    # Spreadsheet-oracle equality on the handcrafted fixture (frozen literals
    # computed by tests/oracle_features.py).
    from test_features import (
        CHAT_FAMILY,
        PERFORMANCE_VERBAL_ABUSE,
        REPORT_VERBAL_ABUSE,
        build_fixture_case,
        build_oracle_lexicon,
    )
    from crowdverdict.features import (
        extract_chat_features,
        extract_performance_features,
        extract_report_features,
    )

    fixture = build_fixture_case()
    oracle_lexicon = build_oracle_lexicon()
    perf = extract_performance_features(fixture)
    start = SCHEMA.names.index("verbal.abuse.offender.kills.mean")
    assert perf[start : start + 52] == pytest.approx(PERFORMANCE_VERBAL_ABUSE, abs=1e-9)
    rep_values = extract_report_features(fixture)
    rep_names = SCHEMA.model_names(ModelFamily.REPORT)
    rep_start = rep_names.index("verbal.abuse.allied.report.count")
    assert rep_values[rep_start : rep_start + 4] == pytest.approx(REPORT_VERBAL_ABUSE, abs=1e-9)
    chat = extract_chat_features(fixture, oracle_lexicon)
    assert chat == pytest.approx(CHAT_FAMILY, abs=1e-9)

    rng = random.Random(11)
    multi = [c for c in corpus_small.cases if len(c.matches) >= 2]
    for i in range(100):
        case = multi[i % len(multi)]
        matches = list(case.matches)
        rng.shuffle(matches)
        shuffled = make_case(
            matches=matches,
            case_id=case.case_id,
            region=case.region,
            decision=case.decision,
            agreement=case.agreement,
        )
        a = extract_feature_vector(case, lexicon).values
        b = extract_feature_vector(shuffled, lexicon).values
        assert np.array_equal(a, b)
    report(
        "3 feature schema",
        "452 = 364+28+60; fixture equals oracle within 1e-9; "
        "100 match permutations bit-identical",
    )


def test_criterion_4_forest_correctness(corpus_10k, lexicon):
    """Split oracle, bit-reproducible fits, planted-signal AUC, permutation null."""
    rng = np.random.default_rng(20240404)
    for _ in range(50):
        n = int(rng.integers(2, 51))
        d = int(rng.integers(1, 7))
        min_leaf = int(rng.integers(1, max(2, n // 4)))
        if n < 2 * min_leaf:
            min_leaf = 1
        x = rng.integers(0, 5, size=(n, d)).astype(np.float64)
        y = rng.integers(0, 2, size=n).astype(np.uint8)
        got = best_split(x, y, min_leaf=min_leaf)
        want = brute_force_best_split(x, y, min_leaf)
        if want is None:
            assert got is None
        else:
            assert (got.feature_index, got.threshold, got.impurity_decrease) == want

    matrix = extract_matrix(list(corpus_10k.cases), lexicon, ModelFamily.FULL)
    seed_check = TrainConfig(n_trees=4, rng_seed=7)
    sample = matrix.x[:400]
    labels = matrix.y[:400]
    assert serialize_forest(fit_forest_arrays(sample, labels, seed_check)) == serialize_forest(
        fit_forest_arrays(sample, labels, seed_check)
    )

    train_idx, test_idx = stratified_split(matrix.y.astype(np.int64), 0.2, seed=0)
    forest = fit_forest_arrays(matrix.x[train_idx], matrix.y[train_idx], FOREST_CONFIG)
    scores = predict_matrix(forest, matrix.x[test_idx])
    _, auc = roc_auc(list(zip(scores.tolist(), matrix.y[test_idx].tolist())))
    assert auc >= 0.95

    perm = np.random.default_rng(1).permutation(matrix.n_cases)
    y_perm = matrix.y[perm]
    forest_null = fit_forest_arrays(matrix.x[train_idx], y_perm[train_idx], FOREST_CONFIG)
    null_scores = predict_matrix(forest_null, matrix.x[test_idx])
    _, auc_null = roc_auc(list(zip(null_scores.tolist(), y_perm[test_idx].tolist())))
    assert 0.45 <= auc_null <= 0.55
    report(
        "4 forest correctness",
        f"50 split oracles exact; AUC {auc:.4f} >= 0.95; permuted {auc_null:.4f}",
    )


def test_criterion_5_auc_oracle():
    """Trapezoidal AUC equals the pairwise estimator on 200 random instances."""
    rng = np.random.default_rng(20240505)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 501))
        labels = rng.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            labels[0] = 1 - labels[0]
        scores = np.round(rng.random(n), 2)
        scored = list(zip(scores.tolist(), labels.tolist()))
        _, auc = roc_auc(scored)
        worst = max(worst, abs(auc - pairwise_auc(scored)))
    assert worst < 1e-9
    report("5 auc oracle", f"200 instances <= 500 points, max |diff| {worst:.2e}")


def test_criterion_6_agreement_grid_ordering(corpus_20k, lexicon):
    """Training on higher agreement dominates; widest margin on the OM stratum."""
    reports = run_agreement_grid(list(corpus_20k.cases), lexicon, GRID_CONFIG)
    om = AgreementLevel.OVERWHELMING_MAJORITY
    sm = AgreementLevel.STRONG_MAJORITY
    maj = AgreementLevel.MAJORITY
    for test_level in AgreementLevel:
        auc_om = reports[(om, test_level)].auc
        auc_sm = reports[(sm, test_level)].auc
        auc_maj = reports[(maj, test_level)].auc
        assert auc_om >= auc_sm, f"test={test_level.value}: {auc_om:.4f} < {auc_sm:.4f}"
        assert auc_sm >= auc_maj - 0.01, f"test={test_level.value}: {auc_sm:.4f} < {auc_maj:.4f}-0.01"
    gap = reports[(om, om)].auc - reports[(maj, om)].auc
    assert gap >= 0.03
    report(
        "6 agreement grid",
        "ordering holds on all test strata; "
        f"OM-trained beats Majority-trained by {gap:.4f} on the OM stratum",
    )


def test_criterion_7_valence_calibration(corpus_20k, lexicon):
    """Measured means hit the configured targets; the OM gap is the widest."""
    calibration = corpus_report(corpus_20k.cases, lexicon)
    means = calibration.mean_valence_by_decision
    assert means[Decision.PUNISH.value] == pytest.approx(5.725, abs=0.05)
    assert means[Decision.PARDON.value] == pytest.approx(5.779, abs=0.05)
    assert calibration.punished_below_pardoned
    cells = calibration.mean_valence_by_decision_agreement
    om_gap = (
        cells[f"{Decision.PARDON.value}/{AgreementLevel.OVERWHELMING_MAJORITY.value}"]
        - cells[f"{Decision.PUNISH.value}/{AgreementLevel.OVERWHELMING_MAJORITY.value}"]
    )
    overall_gap = means[Decision.PARDON.value] - means[Decision.PUNISH.value]
    assert om_gap > overall_gap
    report(
        "7 valence calibration",
        f"punished {means[Decision.PUNISH.value]:.4f}, pardoned {means[Decision.PARDON.value]:.4f}; "
        f"OM gap {om_gap:.4f} > overall {overall_gap:.4f}",
    )


def test_criterion_8_feature_ranking(corpus_10k, lexicon):
    """The planted dominant feature ranks first; report family beats performance."""
    matrix = extract_matrix(list(corpus_10k.cases), lexicon, ModelFamily.FULL)
    ranking = rank_features_information_gain(matrix.x, matrix.y, matrix.names)
    dominant = corpus_10k.ground_truth.summary["dominant_feature"]
    assert ranking[0][0] == dominant
    family = dict(zip(SCHEMA.names, SCHEMA.families))
    top_report = max(gain for name, gain in ranking if family[name] == "report")
    top_performance = max(gain for name, gain in ranking if family[name] == "performance")
    assert top_report > top_performance
    report(
        "8 feature ranking",
        f"rank 1 = {dominant}; report {top_report:.3f} bits > performance {top_performance:.3f}",
    )


def test_criterion_9_portability(lexicon):
    """Shifted-region AUC degrades but beats chance; chat-zeroed chat model is chance."""
    na_train = list(generate_dataset(GeneratorConfig(n_cases=6000, rng_seed=801), lexicon).cases)
    na_test = list(generate_dataset(GeneratorConfig(n_cases=6000, rng_seed=802), lexicon).cases)
    euw = list(
        generate_dataset(
            GeneratorConfig(
                n_cases=6000, rng_seed=803, region=Region.EUW, report_intensity_scale=0.65
            ),
            lexicon,
        ).cases
    )
    config = ExperimentConfig(forest=FOREST_CONFIG)
    in_region = run_portability(na_train, na_test, lexicon, Task.DECISION, config)
    cross = run_portability(na_train, euw, lexicon, Task.DECISION, config)
    assert cross.auc < in_region.auc
    assert cross.auc > 0.55
    chance = run_portability(
        na_train, na_test, lexicon, Task.DECISION, config,
        model=ModelFamily.CHAT, zero_chat=True,
    )
    assert 0.45 <= chance.auc <= 0.55
    report(
        "9 portability",
        f"in-region {in_region.auc:.4f} > shifted {cross.auc:.4f} > 0.55; "
        f"chat-zeroed chat model {chance.auc:.4f}",
    )
