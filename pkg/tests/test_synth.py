"""Synthetic generator tests: determinism, validity, planted-signal logging."""

import pytest

from crowdverdict.domain import Decision, Region, serialize_case, validate_case
from crowdverdict.errors import GeneratorConfigError
from crowdverdict.synth import (
    GeneratorConfig,
    ValenceTargets,
    build_word_pools,
    corpus_report,
    dominant_feature_name,
    generate_dataset,
    solve_valence_targets,
)


class TestConfig:
    def test_defaults_validate(self):
        GeneratorConfig().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"punish_rate": 0.0},
            {"agreement_mix": (0.5, 0.5, 0.0)},
            {"agreement_mix": (0.5, 0.3, 0.3)},
            {"noise_schedule": (0.03, 0.12, 0.25)},  # must decrease
            {"severity_skew": 0.0},
            {"severity_agreement_noise": 0.0},
            {"report_intensity_scale": 0.0},
        ],
    )
    def test_bad_configs_rejected(self, kwargs):
        with pytest.raises(GeneratorConfigError):
            GeneratorConfig(**kwargs).validate()

    def test_round_trips_through_dict(self):
        config = GeneratorConfig(n_cases=5, region=Region.KR, rng_seed=9)
        assert GeneratorConfig.from_dict(config.to_dict()) == config

    def test_valence_target_ordering_enforced(self):
        with pytest.raises(GeneratorConfigError, match="below pardoned"):
            GeneratorConfig(
                valence_targets=ValenceTargets(punished_mean=5.9, pardoned_mean=5.7)
            ).validate()


class TestSolvedTargets:
    def test_mixture_recovers_overall_targets(self):
        config = GeneratorConfig()
        solved = solve_valence_targets(config)
        m = config.agreement_mix
        t = config.valence_targets
        mixture_punished = sum(w * v for w, v in zip(m, solved.measured_punished))
        mixture_pardoned = sum(w * v for w, v in zip(m, solved.measured_pardoned))
        assert mixture_punished == pytest.approx(t.punished_mean, abs=1e-12)
        assert mixture_pardoned == pytest.approx(t.pardoned_mean, abs=1e-12)

    def test_om_gap_too_wide_for_mix_rejected(self):
        config = GeneratorConfig(
            agreement_mix=(0.05, 0.05, 0.9),
            valence_targets=ValenceTargets(
                punished_mean=5.725,
                pardoned_mean=5.779,
                om_punished_mean=5.60,
                om_pardoned_mean=5.90,
            ),
        )
        with pytest.raises(GeneratorConfigError, match="agreement_mix"):
            solve_valence_targets(config)


class TestGenerate:
    def test_zero_cases(self, lexicon):
        corpus = generate_dataset(GeneratorConfig(n_cases=0), lexicon)
        assert len(corpus) == 0
        assert corpus.ground_truth.summary["counts"]["cases"] == 0

    def test_seed_determinism(self, lexicon):
        a = generate_dataset(GeneratorConfig(n_cases=40, rng_seed=42), lexicon)
        b = generate_dataset(GeneratorConfig(n_cases=40, rng_seed=42), lexicon)
        assert [serialize_case(c) for c in a.cases] == [serialize_case(c) for c in b.cases]
        assert a.ground_truth.per_case == b.ground_truth.per_case

    def test_different_seeds_differ(self, lexicon):
        a = generate_dataset(GeneratorConfig(n_cases=10, rng_seed=1), lexicon)
        b = generate_dataset(GeneratorConfig(n_cases=10, rng_seed=2), lexicon)
        assert [serialize_case(c) for c in a.cases] != [serialize_case(c) for c in b.cases]

    def test_every_case_passes_validation(self, corpus_small):
        for case in corpus_small.cases:
            result = validate_case(case)
            assert result.ok, result.violations

    def test_match_counts_in_range(self, corpus_small):
        sizes = {len(c.matches) for c in corpus_small.cases}
        assert sizes <= {1, 2, 3, 4, 5}
        assert len(sizes) >= 4  # uniform draw should hit most sizes

    def test_region_tag_respected(self, lexicon):
        corpus = generate_dataset(GeneratorConfig(n_cases=5, region=Region.EUW), lexicon)
        assert all(c.region is Region.EUW for c in corpus.cases)

    def test_ground_truth_aligned_with_cases(self, corpus_small):
        for case, entry in zip(corpus_small.cases, corpus_small.ground_truth.per_case):
            assert entry["case_id"] == case.case_id
            assert entry["decision"] == case.decision.value
            assert entry["agreement"] == case.agreement.value
            assert len(entry["themes"]) == len(case.matches)

    def test_infeasible_valence_target_rejected(self, lexicon):
        # Gap structure is consistent, but the level sits below the low word
        # pool's mean, so no two-pool mixture can reach it.
        config = GeneratorConfig(
            n_cases=5,
            valence_targets=ValenceTargets(
                punished_mean=1.5,
                pardoned_mean=1.6,
                om_punished_mean=1.48,
                om_pardoned_mean=1.63,
            ),
        )
        with pytest.raises(GeneratorConfigError, match="infeasible"):
            generate_dataset(config, lexicon)

    def test_dominant_feature_declaration(self):
        assert dominant_feature_name(GeneratorConfig()) == "verbal.abuse.allied.report.count"
        chat_heavy = GeneratorConfig(report_link=0.1, chat_link=2.0)
        assert dominant_feature_name(chat_heavy) == "case.offender.msg.count"

    def test_word_pools_span_lexicon(self, lexicon):
        pools = build_word_pools(lexicon)
        assert pools.low_mean < 4.5 < 6.5 < pools.high_mean
        assert set(pools.low_words).isdisjoint(pools.high_words)


class TestCorpusReport:
    def test_empty_corpus_rejected(self, lexicon):
        with pytest.raises(GeneratorConfigError):
            corpus_report([], lexicon)

    def test_punished_below_pardoned_and_report_link(self, corpus_20k, lexicon):
        report = corpus_report(corpus_20k.cases, lexicon)
        assert report.punished_below_pardoned
        assert report.report_count_punish_correlation > 0.3
        assert (
            report.mean_reports_per_match_by_decision[Decision.PUNISH.value]
            > report.mean_reports_per_match_by_decision[Decision.PARDON.value]
        )

    def test_equal_targets_give_equal_means(self, lexicon):
        config = GeneratorConfig(
            n_cases=3000,
            rng_seed=11,
            valence_targets=ValenceTargets(
                punished_mean=5.70,
                pardoned_mean=5.7000000001,
                om_punished_mean=5.70,
                om_pardoned_mean=5.7000000001,
            ),
            valence_link=1.0,
        )
        corpus = generate_dataset(config, lexicon)
        report = corpus_report(corpus.cases, lexicon)
        means = report.mean_valence_by_decision
        assert means[Decision.PUNISH.value] == pytest.approx(
            means[Decision.PARDON.value], abs=0.05
        )

    def test_deciles_monotone(self, corpus_small, lexicon):
        report = corpus_report(corpus_small.cases, lexicon)
        for deciles in report.valence_deciles_by_decision.values():
            assert all(b >= a for a, b in zip(deciles, deciles[1:]))

    def test_report_serializes(self, corpus_small, lexicon):
        import json

        payload = corpus_report(corpus_small.cases, lexicon).to_dict()
        json.dumps(payload)
