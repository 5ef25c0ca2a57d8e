"""Deterministic mapping from a case to a named 452-dimension feature vector.

Matches inside a case are grouped by each match's most common report category
(ties broken by the fixed category declaration order).  Three families are
extracted per category group:

* performance (364): offender / allies / enemies scoreboard statistics as
  (mean, population std) across the group, plus group match count and loss
  rate; 52 values per category.
* report (28): mean allied/enemy report and commented-report counts per match;
  4 values per category.
* chat (60): valence and message-count statistics per category group (8 each)
  plus 4 case-level aggregates.

An empty category group encodes as zeros.  Group statistics are computed on
sorted per-match values, which makes extraction bit-stable under permutation
of the matches in a case.  Population (n-divisor) std is used so single-match
groups yield 0 rather than an undefined value.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .domain import (
    COMMUNICATION_CATEGORIES,
    AgreementLevel,
    Case,
    Decision,
    Match,
    Region,
    ReportCategory,
    ReportSource,
    Role,
)
from .errors import DataError, SchemaMismatchError
from .valence import ValenceLexicon, tokenize

SCHEMA_VERSION = "cv-452/1"

N_PERFORMANCE = 364
N_REPORT = 28
N_CHAT = 60
N_FEATURES = N_PERFORMANCE + N_REPORT + N_CHAT


class ModelFamily(enum.Enum):
    """Feature subsets the classifier can be trained on."""

    PERFORMANCE = "performance"
    REPORT = "report"
    CHAT = "chat"
    FULL = "full"


class VictimScope(enum.Enum):
    """Who a communication offense targeted, judged from report sources."""

    ALLIES = "allies"
    ENEMIES = "enemies"
    ALL_PLAYERS = "all_players"


def _category_token(category: ReportCategory) -> str:
    return category.value.replace("_", ".")


_OFFENDER_STATS = (
    "kills",
    "deaths",
    "assists",
    "kda",
    "damage.dealt",
    "damage.received",
    "gold",
    "gpm",
    "time.played",
)
_TEAM_STATS = (
    "kills.per.player",
    "deaths.per.player",
    "assists.per.player",
    "kda.team",
    "kda.per.player",
    "damage.dealt.per.player",
    "damage.received.per.player",
    "gpm.per.player",
)
_CHAT_GROUP_STATS = (
    "offender.valence.mean",
    "offender.valence.std",
    "victim.valence",
    "bystander.valence",
    "offender.chat.msgs.mean",
    "offender.chat.msgs.std",
    "total.chat.msgs.mean",
    "total.chat.msgs.std",
)
_CASE_CHAT_STATS = (
    "case.offender.valence",
    "case.all.valence",
    "case.offender.msg.count",
    "case.total.msg.count",
)


def _build_schema() -> tuple[tuple[str, ...], tuple[str, ...]]:
    names: list[str] = []
    families: list[str] = []
    for category in ReportCategory:
        c = _category_token(category)
        for stat in _OFFENDER_STATS:
            names += [f"{c}.offender.{stat}.mean", f"{c}.offender.{stat}.std"]
        for side in ("allies", "enemies"):
            for stat in _TEAM_STATS:
                names += [f"{c}.{side}.{stat}.mean", f"{c}.{side}.{stat}.std"]
        names += [f"{c}.match.count", f"{c}.loss.rate"]
        families += ["performance"] * 52
    for category in ReportCategory:
        c = _category_token(category)
        names += [
            f"{c}.allied.report.count",
            f"{c}.enemy.report.count",
            f"{c}.allied.report.comment.count",
            f"{c}.enemy.report.comment.count",
        ]
        families += ["report"] * 4
    for category in ReportCategory:
        c = _category_token(category)
        names += [f"{c}.{stat}" for stat in _CHAT_GROUP_STATS]
        families += ["chat"] * 8
    names += list(_CASE_CHAT_STATS)
    families += ["chat"] * 4
    return tuple(names), tuple(families)


@dataclass(frozen=True)
class FeatureSchema:
    version: str
    names: tuple[str, ...]
    families: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(set(self.names)):
            raise AssertionError("feature names must be unique")

    def __len__(self) -> int:
        return len(self.names)

    def family_indices(self, family: str) -> tuple[int, ...]:
        return tuple(i for i, fam in enumerate(self.families) if fam == family)

    def model_indices(self, model: ModelFamily) -> tuple[int, ...]:
        if model is ModelFamily.FULL:
            return tuple(range(len(self.names)))
        return self.family_indices(model.value)

    def model_names(self, model: ModelFamily) -> tuple[str, ...]:
        return tuple(self.names[i] for i in self.model_indices(model))

    def to_manifest(self) -> dict:
        return {
            "schema_version": self.version,
            "features": [
                {"name": name, "family": family}
                for name, family in zip(self.names, self.families)
            ],
        }


_NAMES, _FAMILIES = _build_schema()
SCHEMA = FeatureSchema(version=SCHEMA_VERSION, names=_NAMES, families=_FAMILIES)

assert len(SCHEMA) == N_FEATURES
assert len(SCHEMA.family_indices("performance")) == N_PERFORMANCE
assert len(SCHEMA.family_indices("report")) == N_REPORT
assert len(SCHEMA.family_indices("chat")) == N_CHAT


# Shorthand aliases accepted wherever a feature name is expected: averaged
# features may omit the ".mean" suffix, and a few legacy dotted spellings
# ("intentionally.feeding", "...kda.avg.per.player", "...chat.msgs") resolve
# to their canonical schema names.
def _resolve_candidates(alias: str) -> list[str]:
    base = alias.replace("intentionally.feeding", "intentional.feeding")
    candidates = [base, base + ".mean"]
    if ".kda.avg.per.player" in base:
        candidates.append(base.replace(".kda.avg.per.player", ".kda.per.player") + ".mean")
    if base.endswith(".kda") and (".allies." in base or ".enemies." in base):
        candidates.append(base + ".team.mean")
    if base.endswith(".gpm") and (".allies." in base or ".enemies." in base):
        candidates.append(base + ".per.player.mean")
    return candidates


def resolve_feature_name(alias: str) -> str:
    """Map a feature name or accepted shorthand to its canonical schema name."""
    known = set(SCHEMA.names)
    for candidate in _resolve_candidates(alias):
        if candidate in known:
            return candidate
    raise DataError(f"unknown feature name {alias!r}")


# --------------------------------------------------------------------------
# Grouping


def most_common_report_type(match: Match) -> ReportCategory:
    """Plurality report category; ties go to the earlier category in declaration order."""
    if not match.reports:
        raise DataError("match has no reports")
    counts = {category: 0 for category in ReportCategory}
    for report in match.reports:
        counts[report.category] += 1
    return max(ReportCategory, key=lambda c: (counts[c], -list(ReportCategory).index(c)))


def victim_scope(match: Match) -> VictimScope:
    """Victim side for a communication offense, judged on report sources in the match."""
    category = most_common_report_type(match)
    if category not in COMMUNICATION_CATEGORIES:
        raise DataError(
            f"victim scope is defined only for communication categories, not {category.value}"
        )
    sources = {r.source for r in match.reports}
    if sources == {ReportSource.ALLY}:
        return VictimScope.ALLIES
    if sources == {ReportSource.ENEMY}:
        return VictimScope.ENEMIES
    return VictimScope.ALL_PLAYERS


def group_matches(case: Case) -> dict[ReportCategory, list[Match]]:
    groups: dict[ReportCategory, list[Match]] = {c: [] for c in ReportCategory}
    for match in case.matches:
        groups[most_common_report_type(match)].append(match)
    return groups


# --------------------------------------------------------------------------
# Per-match scalar statistics


def _kda(kills: int, assists: int, deaths: int) -> float:
    return (kills + assists) / (deaths + 1)


def _gpm(gold: int, duration: int) -> float:
    return gold * 60.0 / duration


def _offender_scalars(match: Match) -> tuple[float, ...]:
    p = match.offender
    return (
        float(p.kills),
        float(p.deaths),
        float(p.assists),
        _kda(p.kills, p.assists, p.deaths),
        float(p.damage_dealt),
        float(p.damage_received),
        float(p.gold_earned),
        _gpm(p.gold_earned, match.duration),
        float(p.time_played),
    )


def _team_scalars(match: Match, role: Role) -> tuple[float, ...]:
    players = match.players_with_role(role)
    n = len(players)
    kills = sum(p.kills for p in players)
    deaths = sum(p.deaths for p in players)
    assists = sum(p.assists for p in players)
    return (
        kills / n,
        deaths / n,
        assists / n,
        (kills + assists) / (deaths + 1),
        sum(_kda(p.kills, p.assists, p.deaths) for p in players) / n,
        sum(p.damage_dealt for p in players) / n,
        sum(p.damage_received for p in players) / n,
        sum(_gpm(p.gold_earned, match.duration) for p in players) / n,
    )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population std over sorted values (bit-stable under permutation)."""
    ordered = sorted(values)
    mu = sum(ordered) / len(ordered)
    var = sum((x - mu) ** 2 for x in ordered) / len(ordered)
    return mu, math.sqrt(var) if var > 0.0 else 0.0


# --------------------------------------------------------------------------
# Family extractors


def extract_performance_features(case: Case) -> list[float]:
    """364 values: per-category scoreboard statistics over the category's match group."""
    out: list[float] = []
    groups = group_matches(case)
    for category in ReportCategory:
        group = groups[category]
        if not group:
            out.extend([0.0] * 52)
            continue
        offender_rows = [_offender_scalars(m) for m in group]
        ally_rows = [_team_scalars(m, Role.ALLY) for m in group]
        enemy_rows = [_team_scalars(m, Role.ENEMY) for m in group]
        for i in range(len(_OFFENDER_STATS)):
            out.extend(_mean_std([row[i] for row in offender_rows]))
        for rows in (ally_rows, enemy_rows):
            for i in range(len(_TEAM_STATS)):
                out.extend(_mean_std([row[i] for row in rows]))
        out.append(float(len(group)))
        out.append(sum(1.0 for m in group if not m.offender_won) / len(group))
    return out


def extract_report_features(case: Case) -> list[float]:
    """28 values: mean allied/enemy report and commented-report counts per category group."""
    out: list[float] = []
    groups = group_matches(case)
    for category in ReportCategory:
        group = groups[category]
        if not group:
            out.extend([0.0] * 4)
            continue
        stats = []
        for m in group:
            ally = sum(1 for r in m.reports if r.source is ReportSource.ALLY)
            enemy = len(m.reports) - ally
            ally_commented = sum(
                1 for r in m.reports if r.source is ReportSource.ALLY and r.comment is not None
            )
            enemy_commented = sum(
                1 for r in m.reports if r.source is ReportSource.ENEMY and r.comment is not None
            )
            stats.append((float(ally), float(enemy), float(ally_commented), float(enemy_commented)))
        for i in range(4):
            out.append(_mean(sorted(row[i] for row in stats)))
    return out


def _match_chat_accumulators(match: Match, lexicon: ValenceLexicon):
    """Per-role (valence sum, lexicon hits, message count) for one match."""
    sums = {Role.OFFENDER: 0.0, Role.ALLY: 0.0, Role.ENEMY: 0.0}
    hits = {Role.OFFENDER: 0, Role.ALLY: 0, Role.ENEMY: 0}
    msgs = {Role.OFFENDER: 0, Role.ALLY: 0, Role.ENEMY: 0}
    entries = lexicon.entries
    for message in match.chat:
        msgs[message.speaker_role] += 1
        for token in tokenize(message.text).tokens:
            score = entries.get(token)
            if score is not None:
                sums[message.speaker_role] += score
                hits[message.speaker_role] += 1
    return sums, hits, msgs


def _ratio(total: float, count: int) -> float:
    return total / count if count else 0.0


def extract_chat_features(case: Case, lexicon: ValenceLexicon) -> list[float]:
    """60 values: valence/message statistics per category group plus case-level aggregates."""
    out: list[float] = []
    groups = group_matches(case)
    per_match = {id(m): _match_chat_accumulators(m, lexicon) for m in case.matches}
    for category in ReportCategory:
        group = groups[category]
        if not group:
            out.extend([0.0] * 8)
            continue
        off_valences: list[float] = []
        victim_valences: list[float] = []
        bystander_valences: list[float] = []
        off_counts: list[float] = []
        total_counts: list[float] = []
        for m in group:
            sums, hits, msgs = per_match[id(m)]
            off_valences.append(_ratio(sums[Role.OFFENDER], hits[Role.OFFENDER]))
            if category in COMMUNICATION_CATEGORIES:
                scope = victim_scope(m)
            else:
                scope = VictimScope.ALLIES
            if scope is VictimScope.ALLIES:
                victim_roles, bystander_roles = (Role.ALLY,), (Role.ENEMY,)
            elif scope is VictimScope.ENEMIES:
                victim_roles, bystander_roles = (Role.ENEMY,), (Role.ALLY,)
            else:
                victim_roles, bystander_roles = (Role.ALLY, Role.ENEMY), ()
            victim_valences.append(
                _ratio(sum(sums[r] for r in victim_roles), sum(hits[r] for r in victim_roles))
            )
            bystander_valences.append(
                _ratio(sum(sums[r] for r in bystander_roles), sum(hits[r] for r in bystander_roles))
            )
            off_counts.append(float(msgs[Role.OFFENDER]))
            total_counts.append(float(sum(msgs.values())))
        mu, sd = _mean_std(off_valences)
        out.extend([mu, sd])
        out.append(_mean(sorted(victim_valences)))
        out.append(_mean(sorted(bystander_valences)))
        mu, sd = _mean_std(off_counts)
        out.extend([mu, sd])
        mu, sd = _mean_std(total_counts)
        out.extend([mu, sd])
    # Case-level aggregates pool every match regardless of category; per-match
    # sums are combined in sorted order so the result is bit-stable under
    # match permutation.
    off_sums: list[float] = []
    all_sums: list[float] = []
    off_hits = all_hits = 0
    off_msgs = total_msgs = 0
    for m in case.matches:
        sums, hits, msgs = per_match[id(m)]
        off_sums.append(sums[Role.OFFENDER])
        off_hits += hits[Role.OFFENDER]
        all_sums.append(sum(sums.values()))
        all_hits += sum(hits.values())
        off_msgs += msgs[Role.OFFENDER]
        total_msgs += sum(msgs.values())
    out.append(_ratio(sum(sorted(off_sums)), off_hits))
    out.append(_ratio(sum(sorted(all_sums)), all_hits))
    out.append(float(off_msgs))
    out.append(float(total_msgs))
    return out


# --------------------------------------------------------------------------
# Vector and matrix assembly


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    label: Decision
    agreement: AgreementLevel
    region: Region
    model: ModelFamily
    schema_version: str = SCHEMA_VERSION

    def __len__(self) -> int:
        return len(self.values)


def extract_feature_vector(
    case: Case, lexicon: ValenceLexicon, model: ModelFamily = ModelFamily.FULL
) -> FeatureVector:
    if model is ModelFamily.PERFORMANCE:
        values = extract_performance_features(case)
    elif model is ModelFamily.REPORT:
        values = extract_report_features(case)
    elif model is ModelFamily.CHAT:
        values = extract_chat_features(case, lexicon)
    else:
        values = (
            extract_performance_features(case)
            + extract_report_features(case)
            + extract_chat_features(case, lexicon)
        )
    return FeatureVector(
        values=np.asarray(values, dtype=np.float64),
        label=case.decision,
        agreement=case.agreement,
        region=case.region,
        model=model,
    )


_AGREEMENTS = tuple(AgreementLevel)
_REGIONS = tuple(Region)


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-case feature matrix with aligned label/agreement/region columns."""

    x: np.ndarray  # (n_cases, n_features) float64
    y: np.ndarray  # (n_cases,) uint8, 1 = punish
    agreement: np.ndarray  # (n_cases,) uint8, AgreementLevel rank
    region: np.ndarray  # (n_cases,) uint8, Region index
    names: tuple[str, ...]
    model: ModelFamily
    schema_version: str = SCHEMA_VERSION

    @property
    def n_cases(self) -> int:
        return self.x.shape[0]

    @property
    def n_features(self) -> int:
        return self.x.shape[1]

    def select_model(self, model: ModelFamily) -> "FeatureMatrix":
        """Slice a family sub-matrix out of a FULL matrix."""
        if self.model is not ModelFamily.FULL and model is not self.model:
            raise DataError(f"cannot slice {model.value} columns out of a {self.model.value} matrix")
        if model is self.model:
            return self
        idx = list(SCHEMA.model_indices(model))
        return FeatureMatrix(
            x=np.ascontiguousarray(self.x[:, idx]),
            y=self.y,
            agreement=self.agreement,
            region=self.region,
            names=tuple(self.names[i] for i in idx),
            model=model,
            schema_version=self.schema_version,
        )

    def zero_chat(self) -> "FeatureMatrix":
        """Copy with all chat-family columns set to 0 (lexicon-less region mode)."""
        chat_names = set(SCHEMA.model_names(ModelFamily.CHAT))
        x = self.x.copy()
        for i, name in enumerate(self.names):
            if name in chat_names:
                x[:, i] = 0.0
        return FeatureMatrix(
            x=x,
            y=self.y,
            agreement=self.agreement,
            region=self.region,
            names=self.names,
            model=self.model,
            schema_version=self.schema_version,
        )


def extract_matrix(
    cases: Sequence[Case], lexicon: ValenceLexicon, model: ModelFamily = ModelFamily.FULL
) -> FeatureMatrix:
    n = len(cases)
    names = SCHEMA.model_names(model)
    x = np.empty((n, len(names)), dtype=np.float64)
    y = np.empty(n, dtype=np.uint8)
    agreement = np.empty(n, dtype=np.uint8)
    region = np.empty(n, dtype=np.uint8)
    for i, case in enumerate(cases):
        vec = extract_feature_vector(case, lexicon, model)
        x[i, :] = vec.values
        y[i] = 1 if case.decision is Decision.PUNISH else 0
        agreement[i] = case.agreement.rank
        region[i] = _REGIONS.index(case.region)
    return FeatureMatrix(
        x=x, y=y, agreement=agreement, region=region, names=names, model=model
    )


# --------------------------------------------------------------------------
# On-disk formats


def write_manifest(path, schema: FeatureSchema = SCHEMA) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_matrix_csv(matrix: FeatureMatrix, path) -> None:
    """CSV with schema names + label/agreement/region columns; floats at 9 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(matrix.names) + ["label", "agreement", "region"])
        for i in range(matrix.n_cases):
            row = [f"{v:.9g}" for v in matrix.x[i]]
            row.append(Decision.PUNISH.value if matrix.y[i] else Decision.PARDON.value)
            row.append(_AGREEMENTS[matrix.agreement[i]].value)
            row.append(_REGIONS[matrix.region[i]].value)
            writer.writerow(row)


def read_matrix_csv(path) -> FeatureMatrix:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-3:] != ["label", "agreement", "region"]:
            raise DataError("feature CSV must end with label, agreement, region columns")
        names = tuple(header[:-3])
        model = _infer_model(names)
        x_rows: list[list[float]] = []
        y_rows: list[int] = []
        agr_rows: list[int] = []
        reg_rows: list[int] = []
        for row in reader:
            if len(row) != len(header):
                raise DataError(f"feature CSV row has {len(row)} fields, expected {len(header)}")
            x_rows.append([float(v) for v in row[:-3]])
            y_rows.append(1 if row[-3] == Decision.PUNISH.value else 0)
            agr_rows.append(AgreementLevel(row[-2]).rank)
            reg_rows.append(_REGIONS.index(Region(row[-1])))
    return FeatureMatrix(
        x=np.asarray(x_rows, dtype=np.float64),
        y=np.asarray(y_rows, dtype=np.uint8),
        agreement=np.asarray(agr_rows, dtype=np.uint8),
        region=np.asarray(reg_rows, dtype=np.uint8),
        names=names,
        model=model,
    )


def _infer_model(names: tuple[str, ...]) -> ModelFamily:
    for model in ModelFamily:
        if names == SCHEMA.model_names(model):
            return model
    raise SchemaMismatchError(
        f"feature columns do not match schema {SCHEMA_VERSION} for any model family"
    )
