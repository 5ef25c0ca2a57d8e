"""Shared fixtures: the bundled lexicon, handcrafted cases, synthetic corpora.

The big corpora are session-scoped because several acceptance criteria share
them; everything derives deterministically from fixed seeds.
"""

from __future__ import annotations

import pytest

from crowdverdict.domain import (
    AgreementLevel,
    Case,
    ChatMessage,
    Decision,
    Match,
    PlayerStats,
    Region,
    Report,
    ReportCategory,
    ReportSource,
    Role,
)
from crowdverdict.synth import GeneratorConfig, generate_dataset
from crowdverdict.valence import load_bundled_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return load_bundled_lexicon()


def make_player(
    role: Role,
    kills: int = 3,
    deaths: int = 4,
    assists: int = 6,
    damage_dealt: int = 12000,
    damage_received: int = 14000,
    gold_earned: int = 9000,
    time_played: int | None = None,
    duration: int = 1800,
) -> PlayerStats:
    return PlayerStats(
        role=role,
        kills=kills,
        deaths=deaths,
        assists=assists,
        damage_dealt=damage_dealt,
        damage_received=damage_received,
        gold_earned=gold_earned,
        time_played=duration if time_played is None else time_played,
    )


def make_match(
    duration: int = 1800,
    offender_won: bool = False,
    offender: PlayerStats | None = None,
    allies: list[PlayerStats] | None = None,
    enemies: list[PlayerStats] | None = None,
    reports: list[Report] | None = None,
    chat: list[ChatMessage] | None = None,
) -> Match:
    players = [offender or make_player(Role.OFFENDER, duration=duration)]
    players += allies or [make_player(Role.ALLY, duration=duration) for _ in range(4)]
    players += enemies or [make_player(Role.ENEMY, duration=duration) for _ in range(5)]
    return Match(
        duration=duration,
        offender_won=offender_won,
        players=tuple(players),
        reports=tuple(
            reports
            if reports is not None
            else [Report(source=ReportSource.ALLY, category=ReportCategory.VERBAL_ABUSE)]
        ),
        chat=tuple(chat or []),
    )


def make_case(
    matches: list[Match] | None = None,
    case_id: str = "case-0",
    region: Region = Region.NA,
    decision: Decision = Decision.PUNISH,
    agreement: AgreementLevel = AgreementLevel.OVERWHELMING_MAJORITY,
) -> Case:
    return Case(
        case_id=case_id,
        region=region,
        decision=decision,
        agreement=agreement,
        matches=tuple(matches or [make_match()]),
    )


@pytest.fixture(scope="session")
def corpus_20k(lexicon):
    """Default-config corpus shared by the grid and calibration criteria."""
    return generate_dataset(GeneratorConfig(n_cases=20000, rng_seed=20240101), lexicon)


@pytest.fixture(scope="session")
def corpus_10k(lexicon):
    """Default-config corpus for the forest-quality criterion."""
    return generate_dataset(GeneratorConfig(n_cases=10000, rng_seed=424242), lexicon)


@pytest.fixture(scope="session")
def corpus_small(lexicon):
    """A 600-case corpus for cheaper end-to-end checks."""
    return generate_dataset(GeneratorConfig(n_cases=600, rng_seed=99), lexicon)
