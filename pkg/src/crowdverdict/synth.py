"""Seeded synthetic-case generator with transparent planted signal.

Stands in for the proprietary corpus: every statistical dependency between
features and verdicts is planted with known strength and logged, so
evaluation properties can be tested against ground truth.

Structure of a generated case:

* each case gets a latent severity in (0, 1] (skewed toward egregious), and
  its agreement level derives from severity plus one-sided assignment noise:
  juries agree more the clearer the behavior, and sometimes reach strong
  consensus on borderline cases, but essentially never disagree on egregious
  ones.  Band cutoffs are solved so realized agreement proportions match
  ``agreement_mix``; higher bands therefore span the whole severity range
  while the majority band stays confined to borderline severities.
* verdict drawn from ``punish_rate``; clean cases plant signal at strength
  equal to their severity, in the verdict's direction.
* with probability ``noise_schedule[agreement]`` the case is a *noise case*
  (the schedule decreases with agreement: high-agreement verdicts are
  cleaner).  A noise case is either a *flip* (probability
  ``noise_flip_weight``) carrying features of the opposite verdict, at full
  severity for most flips (the crowd inverted an egregious call) and at the
  case's own severity for the rest (an ordinary call inverted); or a *slab*:
  decision-neutral features, i.e. a coin-flip verdict on an ambiguous case.
* planted channels: report counts and comment rates rise with guilt (ally
  reports most strongly), offenders who get punished die more (sharply so in
  intentional-feeding matches), talk more, win less, and their chat valence
  is lower.  Offender chat is drawn from a two-pool word mixture whose
  lexicon-scored valence hits the case's target mean exactly in expectation.

Valence calibration: the four configured target means (punished/pardoned,
overall and overwhelming-majority) are measured quantities; the generator
solves per-(agreement, decision) planted targets so that measured group means
converge to the targets as the corpus grows.  All other distributions are
invented defaults with no external source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .domain import (
    COMMUNICATION_CATEGORIES,
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
from .errors import GeneratorConfigError
from .valence import ValenceLexicon, score_text

_AGREEMENTS = tuple(AgreementLevel)

# Word-pool cutoffs on the 1-9 valence scale: the generator mixes a low pool
# and a high pool to hit a target mean exactly in expectation.
LOW_POOL_MAX = 4.5
HIGH_POOL_MIN = 6.5

# Non-lexicon filler tokens sprinkled into chat; they never move v_text.
_FILLERS = ("ss", "b", "re", "omw", "gl", "hf", "wp", "xd", "mia", "brb")

_COMMENTS = (
    "please ban this player",
    "so toxic all game",
    "ruined the match for everyone",
    "inting from minute one",
    "flaming the whole team",
    "muted and reported",
    "deserves a long ban",
    "never seen anything like this",
)


@dataclass(frozen=True)
class ValenceTargets:
    """Measured offender-valence means the corpus calibrates to.

    The overwhelming-majority means sit outside the overall means (punished
    lower, pardoned higher) so the high-agreement verdict gap is the widest;
    the OM gap must stay below overall_gap / om_mix_share or the residual
    strata cannot absorb the mixture (solve_valence_targets raises).
    """

    punished_mean: float = 5.725
    pardoned_mean: float = 5.779
    om_punished_mean: float = 5.709
    om_pardoned_mean: float = 5.780

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.punished_mean,
            self.pardoned_mean,
            self.om_punished_mean,
            self.om_pardoned_mean,
        )


@dataclass(frozen=True)
class GeneratorConfig:
    n_cases: int = 1000
    region: Region = Region.NA
    punish_rate: float = 0.5
    agreement_mix: tuple[float, float, float] = (0.09, 0.18, 0.73)
    valence_targets: ValenceTargets = field(default_factory=ValenceTargets)
    # Probability that a case is label noise, per agreement level (majority,
    # strong majority, overwhelming majority).
    noise_schedule: tuple[float, float, float] = (0.25, 0.12, 0.03)
    # Fraction of noise cases that are label inversions (full-severity
    # features of the opposite verdict); the rest carry decision-neutral
    # features.
    noise_flip_weight: float = 0.5
    # Severity is 1 - 0.98 * U^skew on (0, 1]; higher skew piles mass near 1.
    severity_skew: float = 3.5
    # Scale of the one-sided (exponential, upward) noise added to severity
    # before banding into agreement levels: how often juries agree more
    # strongly than the behavior warrants.
    severity_agreement_noise: float = 0.34
    # Per-channel link strengths (0 disables the channel's label signal).
    report_link: float = 1.0
    performance_link: float = 1.0
    chat_link: float = 1.0
    valence_link: float = 1.0
    # Region-shift knob: scales overall report intensity for both verdicts.
    report_intensity_scale: float = 1.0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.n_cases < 0:
            raise GeneratorConfigError("n_cases must be >= 0")
        if not 0.0 < self.punish_rate < 1.0:
            raise GeneratorConfigError("punish_rate must be in (0, 1)")
        if len(self.agreement_mix) != 3 or any(p <= 0 for p in self.agreement_mix):
            raise GeneratorConfigError("agreement_mix needs 3 positive probabilities")
        if abs(sum(self.agreement_mix) - 1.0) > 1e-9:
            raise GeneratorConfigError("agreement_mix must sum to 1")
        if len(self.noise_schedule) != 3 or any(not 0.0 <= q < 0.5 for q in self.noise_schedule):
            raise GeneratorConfigError("noise_schedule entries must be in [0, 0.5)")
        if not (
            self.noise_schedule[0] >= self.noise_schedule[1] >= self.noise_schedule[2]
        ):
            raise GeneratorConfigError("noise_schedule must decrease with agreement")
        if not 0.0 <= self.noise_flip_weight < 1.0:
            raise GeneratorConfigError("noise_flip_weight must be in [0, 1)")
        if self.severity_skew <= 0:
            raise GeneratorConfigError("severity_skew must be > 0")
        if not 0.0 < self.severity_agreement_noise <= 1.0:
            raise GeneratorConfigError("severity_agreement_noise must be in (0, 1]")
        t = self.valence_targets
        for name, value in zip(
            ("punished_mean", "pardoned_mean", "om_punished_mean", "om_pardoned_mean"),
            t.as_tuple(),
        ):
            if not 1.0 <= value <= 9.0:
                raise GeneratorConfigError(f"valence target {name}={value} outside [1, 9]")
        if not t.punished_mean < t.pardoned_mean:
            raise GeneratorConfigError("punished valence target must lie below pardoned")
        if not t.om_punished_mean < t.om_pardoned_mean:
            raise GeneratorConfigError("om punished valence target must lie below om pardoned")
        for link in ("report_link", "performance_link", "chat_link", "valence_link"):
            if getattr(self, link) < 0:
                raise GeneratorConfigError(f"{link} must be >= 0")
        if self.report_intensity_scale <= 0:
            raise GeneratorConfigError("report_intensity_scale must be > 0")

    def to_dict(self) -> dict:
        return {
            "n_cases": self.n_cases,
            "region": self.region.value,
            "punish_rate": self.punish_rate,
            "agreement_mix": list(self.agreement_mix),
            "valence_targets": {
                "punished_mean": self.valence_targets.punished_mean,
                "pardoned_mean": self.valence_targets.pardoned_mean,
                "om_punished_mean": self.valence_targets.om_punished_mean,
                "om_pardoned_mean": self.valence_targets.om_pardoned_mean,
            },
            "noise_schedule": list(self.noise_schedule),
            "noise_flip_weight": self.noise_flip_weight,
            "severity_skew": self.severity_skew,
            "severity_agreement_noise": self.severity_agreement_noise,
            "report_link": self.report_link,
            "performance_link": self.performance_link,
            "chat_link": self.chat_link,
            "valence_link": self.valence_link,
            "report_intensity_scale": self.report_intensity_scale,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorConfig":
        kwargs = dict(obj)
        if "region" in kwargs:
            kwargs["region"] = Region(kwargs["region"])
        if "valence_targets" in kwargs:
            kwargs["valence_targets"] = ValenceTargets(**kwargs["valence_targets"])
        for key in ("agreement_mix", "noise_schedule"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class WordPools:
    low_words: tuple[str, ...]
    low_scores: tuple[float, ...]
    high_words: tuple[str, ...]
    high_scores: tuple[float, ...]

    @property
    def low_mean(self) -> float:
        return sum(self.low_scores) / len(self.low_scores)

    @property
    def high_mean(self) -> float:
        return sum(self.high_scores) / len(self.high_scores)


def build_word_pools(lexicon: ValenceLexicon) -> WordPools:
    low = sorted((w, s) for w, s in lexicon.entries.items() if s <= LOW_POOL_MAX)
    high = sorted((w, s) for w, s in lexicon.entries.items() if s >= HIGH_POOL_MIN)
    if not low or not high:
        raise GeneratorConfigError(
            f"lexicon must contain words with valence <= {LOW_POOL_MAX} and >= {HIGH_POOL_MIN}"
        )
    return WordPools(
        low_words=tuple(w for w, _ in low),
        low_scores=tuple(s for _, s in low),
        high_words=tuple(w for w, _ in high),
        high_scores=tuple(s for _, s in high),
    )


@dataclass(frozen=True)
class SolvedValenceTargets:
    """Planted per-(agreement, decision) valence means implied by the config."""

    planted_punished: tuple[float, float, float]
    planted_pardoned: tuple[float, float, float]
    neutral: tuple[float, float, float]  # noise-case target per agreement
    measured_punished: tuple[float, float, float]
    measured_pardoned: tuple[float, float, float]


def solve_valence_targets(config: GeneratorConfig) -> SolvedValenceTargets:
    """Derive planted group means so measured means converge to the targets.

    A flip noise case scores the opposite verdict's planted mean and a slab
    case the stratum midpoint, so a measured group mean mixes the planted one
    with contamination weight ``a = q * (1 + h) / 2``; the planted gap is the
    measured gap inflated by ``1 - q (1 + h)``.  The residual (non-OM) strata
    absorb whatever the mixture needs so the overall means land on target.
    """
    t = config.valence_targets
    h = config.noise_flip_weight
    m1, m2, m3 = config.agreement_mix
    residual_weight = m1 + m2
    mu_pu = [0.0, 0.0, t.om_punished_mean]
    mu_pa = [0.0, 0.0, t.om_pardoned_mean]
    mu_pu[0] = mu_pu[1] = (t.punished_mean - m3 * t.om_punished_mean) / residual_weight
    mu_pa[0] = mu_pa[1] = (t.pardoned_mean - m3 * t.om_pardoned_mean) / residual_weight
    planted_pu = []
    planted_pa = []
    neutral = []
    for s in range(3):
        if mu_pa[s] <= mu_pu[s]:
            raise GeneratorConfigError(
                "om valence gap is too wide for this agreement_mix: the implied "
                f"{_AGREEMENTS[s].value} pardoned mean {mu_pa[s]:.4f} does not exceed "
                f"the punished mean {mu_pu[s]:.4f}"
            )
        shrink = 1.0 - config.noise_schedule[s] * (1.0 + h)
        if shrink <= 0.0:
            raise GeneratorConfigError(
                "noise_schedule and noise_flip_weight leave no signal: "
                f"q * (1 + h) >= 1 for {_AGREEMENTS[s].value}"
            )
        mid = (mu_pu[s] + mu_pa[s]) / 2.0
        gap = (mu_pa[s] - mu_pu[s]) * config.valence_link / shrink
        planted_pu.append(mid - gap / 2.0)
        planted_pa.append(mid + gap / 2.0)
        neutral.append(mid)
    return SolvedValenceTargets(
        planted_punished=tuple(planted_pu),
        planted_pardoned=tuple(planted_pa),
        neutral=tuple(neutral),
        measured_punished=tuple(mu_pu),
        measured_pardoned=tuple(mu_pa),
    )


# Category themes: verbal abuse dominates, mirroring how communication
# offenses dominate real report streams.
_THEME_CATEGORIES = (
    ReportCategory.VERBAL_ABUSE,
    ReportCategory.OFFENSIVE_LANGUAGE,
    ReportCategory.INTENTIONAL_FEEDING,
    ReportCategory.NEGATIVE_ATTITUDE,
    ReportCategory.ASSISTING_ENEMY_TEAM,
    ReportCategory.SPAMMING,
    ReportCategory.INAPPROPRIATE_NAME,
)
_THEME_WEIGHTS = (0.48, 0.16, 0.12, 0.08, 0.07, 0.05, 0.04)
_THEME_CONCENTRATION = 0.82  # probability a report repeats the match theme


@dataclass(frozen=True)
class GroundTruth:
    per_case: tuple[dict, ...]
    summary: dict


@dataclass(frozen=True)
class SyntheticCorpus:
    cases: tuple[Case, ...]
    ground_truth: GroundTruth

    def __len__(self) -> int:
        return len(self.cases)


def _clip(value: float, lo: float, hi: float | None = None) -> float:
    if hi is not None and value > hi:
        return hi
    return lo if value < lo else value


def _draw_words(
    gen: np.random.Generator, pools: WordPools, lam_high: float, count: int
) -> tuple[list[str], int]:
    """Lexicon words mixed from the two pools plus occasional fillers.

    The high-pool share uses randomized rounding of ``lam_high * n``, so the
    expected mean valence of the lexicon words hits the target exactly while
    the per-case variance stays small.  Returns the word list and the number
    of lexicon words in it.
    """
    words: list[str] = []
    if count <= 0:
        return words, 0
    filler_mask = gen.random(count) < 0.12
    n_lex = count - int(filler_mask.sum())
    exact = lam_high * n_lex
    n_high = int(exact) + (1 if gen.random() < exact - int(exact) else 0)
    pool_flags = np.zeros(n_lex, dtype=bool)
    pool_flags[:n_high] = True
    pool_flags = pool_flags[gen.permutation(n_lex)] if n_lex else pool_flags
    low_idx = gen.integers(0, len(pools.low_words), size=count)
    high_idx = gen.integers(0, len(pools.high_words), size=count)
    filler_idx = gen.integers(0, len(_FILLERS), size=count)
    lex_pos = 0
    for i in range(count):
        if filler_mask[i]:
            words.append(_FILLERS[filler_idx[i]])
        elif pool_flags[lex_pos]:
            words.append(pools.high_words[high_idx[i]])
            lex_pos += 1
        else:
            words.append(pools.low_words[low_idx[i]])
            lex_pos += 1
    return words, n_lex


def _messages_from_words(
    gen: np.random.Generator, role: Role, n_msgs: int, words: list[str]
) -> list[ChatMessage]:
    """Partition a word list into n_msgs messages (each gets at least one word)."""
    if n_msgs <= 0:
        return []
    takes = 1 + gen.poisson(1.1, size=n_msgs)
    filler_idx = gen.integers(0, len(_FILLERS), size=n_msgs)
    msgs = []
    pos = 0
    for i in range(n_msgs):
        if i == n_msgs - 1:
            chunk = words[pos:]
        else:
            chunk = words[pos : pos + int(takes[i])]
            pos += int(takes[i])
        if not chunk:
            chunk = [_FILLERS[filler_idx[i]]]
        msgs.append(ChatMessage(speaker_role=role, text=" ".join(chunk)))
    return msgs


_THEME_CDF = np.cumsum(_THEME_WEIGHTS)


@dataclass(frozen=True)
class _CaseParams:
    """Per-case draw parameters shared by every match (fixed signal strength u)."""

    count_lams: np.ndarray  # reports, deaths, kills, assists, off/ally/enemy msgs
    deaths_feeding_lam: float
    ally_prob_comm: float
    ally_prob_other: float
    comment_prob: float
    team_lams: np.ndarray  # (9, 3) kills/deaths/assists for 4 allies + 5 enemies
    normal_locs: np.ndarray  # offender + 9 players' damage dealt/received, gpm
    normal_scales: np.ndarray
    leaver_prob: float
    win_prob: float


def _case_params(u: float, config: GeneratorConfig) -> _CaseParams:
    """Draw parameters for one signal strength u in [-1, 1].

    Count channels use log-links (rate = base * exp(coef * u)): rates stay
    positive for any strength without clip pileups, which keeps every stratum
    distinguishable near the decision boundary.
    """
    rl, pl, cl = config.report_link, config.performance_link, config.chat_link
    e = np.exp
    count_lams = np.array(
        [
            config.report_intensity_scale * 2.0 * e(1.05 * u * rl),  # reports
            5.2 * e(0.50 * u * pl),  # offender deaths (non-feeding theme)
            4.6 * e(-0.35 * u * pl),  # offender kills
            6.2 * e(-0.24 * u * pl),  # offender assists
            3.2 * e(0.62 * u * cl),  # offender msgs
            5.4 * e(0.19 * u * cl),  # ally msgs
            6.75 * e(0.11 * u * cl),  # enemy msgs
        ]
    )
    ally_lams = (4.4 * e(-0.15 * u * pl), 5.0 * e(0.11 * u * pl), 6.4 * e(-0.11 * u * pl))
    enemy_lams = (4.4 * e(0.17 * u * pl), 5.0 * e(-0.15 * u * pl), 6.4 * e(0.13 * u * pl))
    team_lams = np.array([list(ally_lams)] * 4 + [list(enemy_lams)] * 5)
    normal_locs = np.array(
        [13500 - u * 3700 * pl, 15500 + u * 4000 * pl, 300 - u * 52 * pl]
        + [12800 - u * 800 * pl, 14600 + u * 600 * pl, 296 - u * 9 * pl] * 4
        + [12800 + u * 1000 * pl, 14600 - u * 700 * pl, 296 + u * 12 * pl] * 5
    )
    normal_scales = np.array([3200.0, 3500.0, 48.0] + [3000.0, 3200.0, 46.0] * 9)
    return _CaseParams(
        count_lams=count_lams,
        deaths_feeding_lam=5.2 * e((0.50 + 0.70) * u * pl),
        ally_prob_comm=_clip(0.58 + u * 0.22 * rl, 0.02, 0.98),
        ally_prob_other=_clip(0.82 + u * 0.06 * rl, 0.02, 0.98),
        comment_prob=_clip(0.40 + u * 0.23 * rl, 0.02, 0.98),
        team_lams=team_lams,
        normal_locs=normal_locs,
        normal_scales=normal_scales,
        leaver_prob=_clip(0.06 + 0.14 * u * pl, 0.005, 0.9),
        win_prob=_clip(0.5 - 0.29 * u * pl, 0.02, 0.98),
    )


def _generate_match(
    gen: np.random.Generator,
    params: _CaseParams,
    lam_high_offender: float,
    lam_high_other: float,
    pools: WordPools,
) -> tuple[Match, ReportCategory, int]:
    unif = gen.random(4)  # theme, leaver, leave fraction, win
    theme = _THEME_CATEGORIES[int(np.searchsorted(_THEME_CDF, unif[0], side="right"))]
    duration = int(gen.integers(1300, 2601))

    if theme in COMMUNICATION_CATEGORIES:
        ally_prob = params.ally_prob_comm
    else:
        ally_prob = params.ally_prob_other
    comment_prob = params.comment_prob

    if theme is ReportCategory.INTENTIONAL_FEEDING:
        count_lams = params.count_lams.copy()
        count_lams[1] = params.deaths_feeding_lam
    else:
        count_lams = params.count_lams
    counts = gen.poisson(count_lams)
    n_reports = 1 + int(counts[0])
    off_deaths, off_kills, off_assists = int(counts[1]), int(counts[2]), int(counts[3])
    # The offender always says something; more words per message keeps the
    # per-case valence estimate tight.
    n_off_msgs, n_ally_msgs, n_enemy_msgs = 1 + int(counts[4]), int(counts[5]), int(counts[6])

    report_unif = gen.random((3, n_reports))
    comment_idx = gen.integers(0, len(_COMMENTS), size=n_reports)
    other_categories = [c for c in _THEME_CATEGORIES if c is not theme]
    other_idx = gen.integers(0, len(other_categories), size=n_reports)
    reports = []
    for i in range(n_reports):
        off_theme = report_unif[1, i] >= _THEME_CONCENTRATION
        reports.append(
            Report(
                source=ReportSource.ALLY if report_unif[0, i] < ally_prob else ReportSource.ENEMY,
                category=other_categories[other_idx[i]] if off_theme else theme,
                comment=_COMMENTS[comment_idx[i]] if report_unif[2, i] < comment_prob else None,
            )
        )

    # Scoreboard rows: one poisson batch for 9 team players' counts, one normal
    # batch for everyone's damage/gold-rate figures.
    team_counts = gen.poisson(params.team_lams)  # (9, 3): kills, deaths, assists
    gauss = gen.normal(params.normal_locs, params.normal_scales)

    leaver = unif[1] < params.leaver_prob
    off_time = int(duration * (0.3 + 0.5 * unif[2])) if leaver else duration
    off_gpm = _clip(gauss[2], 40)
    offender = PlayerStats(
        role=Role.OFFENDER,
        kills=off_kills,
        deaths=off_deaths,
        assists=off_assists,
        damage_dealt=int(_clip(gauss[0], 0)),
        damage_received=int(_clip(gauss[1], 0)),
        gold_earned=int(off_gpm * off_time / 60.0),
        time_played=off_time,
    )
    team = []
    for p in range(9):
        role = Role.ALLY if p < 4 else Role.ENEMY
        base = 3 + p * 3
        gpm = _clip(gauss[base + 2], 40)
        team.append(
            PlayerStats(
                role=role,
                kills=int(team_counts[p, 0]),
                deaths=int(team_counts[p, 1]),
                assists=int(team_counts[p, 2]),
                damage_dealt=int(_clip(gauss[base], 0)),
                damage_received=int(_clip(gauss[base + 1], 0)),
                gold_earned=int(gpm * duration / 60.0),
                time_played=duration,
            )
        )

    # Chat.
    off_words, off_hits = _draw_words(gen, pools, lam_high_offender, n_off_msgs * 3)
    other_words, _ = _draw_words(gen, pools, lam_high_other, (n_ally_msgs + n_enemy_msgs) * 2)
    chat = (
        _messages_from_words(gen, Role.OFFENDER, n_off_msgs, off_words)
        + _messages_from_words(gen, Role.ALLY, n_ally_msgs, other_words[: n_ally_msgs * 2])
        + _messages_from_words(gen, Role.ENEMY, n_enemy_msgs, other_words[n_ally_msgs * 2 :])
    )
    chat = [chat[i] for i in gen.permutation(len(chat))] if chat else []

    offender_won = bool(unif[3] < params.win_prob)
    match = Match(
        duration=duration,
        offender_won=offender_won,
        players=tuple([offender] + team),
        reports=tuple(reports),
        chat=tuple(chat),
    )
    return match, theme, off_hits


def _lam_for_target(target: float, pools: WordPools) -> float:
    lo, hi = pools.low_mean, pools.high_mean
    if not lo < target < hi:
        raise GeneratorConfigError(
            f"valence target {target:.4f} is infeasible for this lexicon: the word "
            f"pools span ({lo:.4f}, {hi:.4f})"
        )
    return (target - lo) / (hi - lo)


_NEUTRAL_OTHER_VALENCE = 5.74  # bystander/victim chatter target, mildly label-linked

_SEVERITY_FLOOR = 0.02
_EXTREME_FLIP_SHARE = 0.4  # fraction of flips at full severity


def _draw_severity(gen: np.random.Generator, skew: float) -> float:
    return 1.0 - (1.0 - _SEVERITY_FLOOR) * float(gen.random()) ** skew


def solve_agreement_cutoffs(config: GeneratorConfig) -> tuple[float, float]:
    """Thresholds on the noisy agreement score that realize the configured mix.

    The score is a = S + Exponential(scale); cutoffs are the mix quantiles of
    its distribution, found by bisection on the exact CDF (integrated over
    the severity law by midpoint rule).
    """
    from math import exp

    skew = config.severity_skew
    scale = config.severity_agreement_noise
    grid = (np.arange(4000) + 0.5) / 4000.0
    severities = (1.0 - (1.0 - _SEVERITY_FLOOR) * grid**skew).tolist()

    def cdf(c: float) -> float:
        total = 0.0
        for s in severities:
            if c > s:
                total += 1.0 - exp(-(c - s) / scale)
        return total / len(severities)

    def invert(target: float) -> float:
        lo, hi = 0.0, 6.0
        for _ in range(60):
            mid = (lo + hi) / 2.0
            if cdf(mid) < target:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2.0

    m1, m2, _ = config.agreement_mix
    return invert(m1), invert(m1 + m2)


def generate_dataset(config: GeneratorConfig, lexicon: ValenceLexicon) -> SyntheticCorpus:
    """Deterministically generate a corpus plus its ground-truth log."""
    config.validate()
    pools = build_word_pools(lexicon)
    solved = solve_valence_targets(config)
    for value in solved.planted_punished + solved.planted_pardoned + solved.neutral:
        _lam_for_target(value, pools)

    cutoff_low, cutoff_high = solve_agreement_cutoffs(config)
    root = np.random.SeedSequence(config.rng_seed)
    substreams = root.spawn(config.n_cases)

    cases: list[Case] = []
    per_case: list[dict] = []
    n_matches_total = 0
    n_reports_total = 0
    for index, stream in enumerate(substreams):
        gen = np.random.Generator(np.random.PCG64(stream))
        severity = _draw_severity(gen, config.severity_skew)
        agreement_score = severity + float(gen.exponential(config.severity_agreement_noise))
        if agreement_score < cutoff_low:
            agreement_rank = 0
        elif agreement_score < cutoff_high:
            agreement_rank = 1
        else:
            agreement_rank = 2
        punished = bool(gen.random() < config.punish_rate)
        is_noise = bool(gen.random() < config.noise_schedule[agreement_rank])
        is_flip = is_noise and bool(gen.random() < config.noise_flip_weight)
        if is_flip:
            # Features of the opposite verdict: usually an inverted egregious
            # call, sometimes an inverted ordinary one.
            flip_severity = 1.0 if gen.random() < _EXTREME_FLIP_SHARE else severity
            u = -flip_severity if punished else flip_severity
            valence_target = (
                solved.planted_pardoned[agreement_rank]
                if punished
                else solved.planted_punished[agreement_rank]
            )
        elif is_noise:
            u = 0.0
            valence_target = solved.neutral[agreement_rank]
        else:
            u = severity if punished else -severity
            valence_target = (
                solved.planted_punished[agreement_rank]
                if punished
                else solved.planted_pardoned[agreement_rank]
            )
        lam_offender = _lam_for_target(valence_target, pools)
        lam_other = _lam_for_target(
            _clip(_NEUTRAL_OTHER_VALENCE - u * 0.05, pools.low_mean + 0.05, pools.high_mean - 0.05),
            pools,
        )

        params = _case_params(u, config)
        n_matches = int(gen.integers(1, 6))
        matches: list[Match] = []
        themes: list[str] = []
        offender_hits = 0
        for _ in range(n_matches):
            match, theme, hits = _generate_match(gen, params, lam_offender, lam_other, pools)
            matches.append(match)
            themes.append(theme.value)
            offender_hits += hits
        if offender_hits == 0:
            # Guarantee a scoreable offender valence for every case.
            word = (
                pools.high_words[int(gen.integers(0, len(pools.high_words)))]
                if gen.random() < lam_offender
                else pools.low_words[int(gen.integers(0, len(pools.low_words)))]
            )
            first = matches[0]
            matches[0] = Match(
                duration=first.duration,
                offender_won=first.offender_won,
                players=first.players,
                reports=first.reports,
                chat=first.chat + (ChatMessage(speaker_role=Role.OFFENDER, text=word),),
            )

        case = Case(
            case_id=f"{config.region.value}-{config.rng_seed}-{index:07d}",
            region=config.region,
            decision=Decision.PUNISH if punished else Decision.PARDON,
            agreement=_AGREEMENTS[agreement_rank],
            matches=tuple(matches),
        )
        cases.append(case)
        n_matches_total += len(matches)
        n_reports_total += sum(len(m.reports) for m in matches)
        per_case.append(
            {
                "case_id": case.case_id,
                "decision": case.decision.value,
                "agreement": case.agreement.value,
                "noise": is_noise,
                "noise_kind": "flip" if is_flip else ("slab" if is_noise else "none"),
                "severity": u,
                "valence_target": valence_target,
                "themes": themes,
            }
        )

    summary = {
        "config": config.to_dict(),
        "counts": {
            "region": config.region.value,
            "cases": len(cases),
            "matches": n_matches_total,
            "reports": n_reports_total,
        },
        "solved_valence_targets": {
            "planted_punished": list(solved.planted_punished),
            "planted_pardoned": list(solved.planted_pardoned),
            "neutral": list(solved.neutral),
            "measured_punished": list(solved.measured_punished),
            "measured_pardoned": list(solved.measured_pardoned),
        },
        "dominant_feature": dominant_feature_name(config),
        "word_pools": {"low_mean": pools.low_mean, "high_mean": pools.high_mean},
    }
    return SyntheticCorpus(cases=tuple(cases), ground_truth=GroundTruth(tuple(per_case), summary))


def dominant_feature_name(config: GeneratorConfig) -> str:
    """Schema name of the single strongest planted feature-label link."""
    links = {
        "report": config.report_link,
        "chat": config.chat_link,
        "performance": config.performance_link,
    }
    strongest = max(links, key=links.get)
    theme = _THEME_CATEGORIES[0].value.replace("_", ".")
    if strongest == "report":
        return f"{theme}.allied.report.count"
    if strongest == "chat":
        return "case.offender.msg.count"
    return f"{theme}.offender.deaths.mean"


# --------------------------------------------------------------------------
# Calibration measurement


@dataclass(frozen=True)
class CalibrationReport:
    n_cases: int
    n_scored: int  # cases with offender valence >= 1 (at least one lexicon word)
    mean_valence_by_decision: dict[str, float]
    mean_valence_by_decision_agreement: dict[str, float]  # "decision/agreement" keys
    valence_deciles_by_decision: dict[str, tuple[float, ...]]
    mean_reports_per_match_by_decision: dict[str, float]
    report_count_punish_correlation: float

    @property
    def punished_below_pardoned(self) -> bool:
        return (
            self.mean_valence_by_decision[Decision.PUNISH.value]
            < self.mean_valence_by_decision[Decision.PARDON.value]
        )

    def to_dict(self) -> dict:
        return {
            "n_cases": self.n_cases,
            "n_scored": self.n_scored,
            "mean_valence_by_decision": self.mean_valence_by_decision,
            "mean_valence_by_decision_agreement": self.mean_valence_by_decision_agreement,
            "valence_deciles_by_decision": {
                k: list(v) for k, v in self.valence_deciles_by_decision.items()
            },
            "mean_reports_per_match_by_decision": self.mean_reports_per_match_by_decision,
            "report_count_punish_correlation": self.report_count_punish_correlation,
            "punished_below_pardoned": self.punished_below_pardoned,
        }


def case_offender_valence(case: Case, lexicon: ValenceLexicon) -> float:
    """Valence of all offender messages in the case, pooled."""
    text = " ".join(
        msg.text for match in case.matches for msg in match.chat if msg.speaker_role is Role.OFFENDER
    )
    return score_text(lexicon, text)


def corpus_report(cases: Sequence[Case], lexicon: ValenceLexicon) -> CalibrationReport:
    """Measured calibration statistics, mirroring how the targets are defined.

    Valence means consider only cases whose offender text contains at least
    one lexicon word (valence >= 1); zero-convention cases would otherwise
    drag means toward 0.
    """
    if not cases:
        raise GeneratorConfigError("corpus_report requires a non-empty corpus")
    valences: dict[str, list[float]] = {d.value: [] for d in Decision}
    by_cell: dict[str, list[float]] = {
        f"{d.value}/{a.value}": [] for d in Decision for a in AgreementLevel
    }
    reports_per_match: dict[str, list[float]] = {d.value: [] for d in Decision}
    labels: list[int] = []
    counts: list[float] = []
    n_scored = 0
    for case in cases:
        v = case_offender_valence(case, lexicon)
        if v >= 1.0:
            n_scored += 1
            valences[case.decision.value].append(v)
            by_cell[f"{case.decision.value}/{case.agreement.value}"].append(v)
        rpm = sum(len(m.reports) for m in case.matches) / len(case.matches)
        reports_per_match[case.decision.value].append(rpm)
        labels.append(1 if case.decision is Decision.PUNISH else 0)
        counts.append(rpm)

    def _mean(values: list[float]) -> float:
        return sum(values) / len(values) if values else 0.0

    labels_arr = np.asarray(labels, dtype=np.float64)
    counts_arr = np.asarray(counts, dtype=np.float64)
    if labels_arr.std() > 0 and counts_arr.std() > 0:
        correlation = float(np.corrcoef(labels_arr, counts_arr)[0, 1])
    else:
        correlation = 0.0

    deciles = {}
    for d in Decision:
        values = valences[d.value]
        if values:
            qs = np.quantile(np.asarray(values), np.arange(1, 10) / 10.0)
            deciles[d.value] = tuple(float(q) for q in qs)
        else:
            deciles[d.value] = ()

    return CalibrationReport(
        n_cases=len(cases),
        n_scored=n_scored,
        mean_valence_by_decision={d.value: _mean(valences[d.value]) for d in Decision},
        mean_valence_by_decision_agreement={k: _mean(v) for k, v in by_cell.items()},
        valence_deciles_by_decision=deciles,
        mean_reports_per_match_by_decision={
            d.value: _mean(reports_per_match[d.value]) for d in Decision
        },
        report_count_punish_correlation=correlation,
    )
