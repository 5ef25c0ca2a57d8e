"""Canonical data model for moderation cases and the JSON-Lines corpus format.

A *case* bundles 1-5 reported matches for one accused player together with the
crowd's verdict (punish/pardon) and the level of reviewer agreement.  All types
are immutable after construction; invariants are checked by ``validate_case``
rather than in constructors so that malformed records can be represented,
inspected, and reported.

Corpus format: one case per line, UTF-8 JSON with snake_case field names.
Enumerations are serialized as lowercase snake_case strings.  The canonical
form uses sorted keys and compact separators, so ``serialize(parse(line))``
round-trips byte-identically for canonical input.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DatasetError


class Region(enum.Enum):
    NA = "na"
    EUW = "euw"
    KR = "kr"


class Decision(enum.Enum):
    PUNISH = "punish"
    PARDON = "pardon"


class AgreementLevel(enum.Enum):
    """Reviewer consensus, ordered weakest to strongest."""

    MAJORITY = "majority"
    STRONG_MAJORITY = "strong_majority"
    OVERWHELMING_MAJORITY = "overwhelming_majority"

    @property
    def rank(self) -> int:
        return _AGREEMENT_ORDER[self]

    def __lt__(self, other: "AgreementLevel") -> bool:
        if not isinstance(other, AgreementLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: "AgreementLevel") -> bool:
        if not isinstance(other, AgreementLevel):
            return NotImplemented
        return self.rank <= other.rank


_AGREEMENT_ORDER = {
    AgreementLevel.MAJORITY: 0,
    AgreementLevel.STRONG_MAJORITY: 1,
    AgreementLevel.OVERWHELMING_MAJORITY: 2,
}


class ReportCategory(enum.Enum):
    """The 7 report categories present in stored corpora.

    Declaration order is the documented tie-break order for plurality
    decisions, so do not reorder members.
    """

    ASSISTING_ENEMY_TEAM = "assisting_enemy_team"
    INTENTIONAL_FEEDING = "intentional_feeding"
    OFFENSIVE_LANGUAGE = "offensive_language"
    VERBAL_ABUSE = "verbal_abuse"
    NEGATIVE_ATTITUDE = "negative_attitude"
    INAPPROPRIATE_NAME = "inappropriate_name"
    SPAMMING = "spamming"


#: Categories expressed through communication; these get victim-scope handling.
COMMUNICATION_CATEGORIES = frozenset(
    {
        ReportCategory.VERBAL_ABUSE,
        ReportCategory.OFFENSIVE_LANGUAGE,
        ReportCategory.NEGATIVE_ATTITUDE,
    }
)


class Role(enum.Enum):
    OFFENDER = "offender"
    ALLY = "ally"
    ENEMY = "enemy"


class ReportSource(enum.Enum):
    ALLY = "ally"
    ENEMY = "enemy"


MAX_MATCHES_PER_CASE = 5
MAX_COMMENT_LENGTH = 500


@dataclass(frozen=True, slots=True)
class PlayerStats:
    role: Role
    kills: int
    deaths: int
    assists: int
    damage_dealt: int
    damage_received: int
    gold_earned: int
    time_played: int


@dataclass(frozen=True, slots=True)
class Report:
    source: ReportSource
    category: ReportCategory
    comment: str | None = None


@dataclass(frozen=True, slots=True)
class ChatMessage:
    speaker_role: Role
    text: str


@dataclass(frozen=True, slots=True)
class Match:
    duration: int
    offender_won: bool
    players: tuple[PlayerStats, ...]
    reports: tuple[Report, ...]
    chat: tuple[ChatMessage, ...]

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "reports", tuple(self.reports))
        object.__setattr__(self, "chat", tuple(self.chat))

    def players_with_role(self, role: Role) -> tuple[PlayerStats, ...]:
        return tuple(p for p in self.players if p.role is role)

    @property
    def offender(self) -> PlayerStats:
        return self.players_with_role(Role.OFFENDER)[0]


@dataclass(frozen=True, slots=True)
class Case:
    case_id: str
    region: Region
    decision: Decision
    agreement: AgreementLevel
    matches: tuple[Match, ...]

    def __post_init__(self):
        object.__setattr__(self, "matches", tuple(self.matches))


# --------------------------------------------------------------------------
# Parsing and serialization


def _parse_enum(enum_cls, value, field_name: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise DatasetError(f"{field_name}: unknown value {value!r} (expected one of: {allowed})")


def _require(obj: dict, key: str, ctx: str):
    if key not in obj:
        raise DatasetError(f"{ctx}{key}: missing field")
    return obj[key]


def _parse_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DatasetError(f"{field_name}: expected an integer, got {value!r}")
    return value


def _player_from_dict(obj: dict, ctx: str) -> PlayerStats:
    return PlayerStats(
        role=_parse_enum(Role, _require(obj, "role", ctx), ctx + "role"),
        kills=_parse_int(_require(obj, "kills", ctx), ctx + "kills"),
        deaths=_parse_int(_require(obj, "deaths", ctx), ctx + "deaths"),
        assists=_parse_int(_require(obj, "assists", ctx), ctx + "assists"),
        damage_dealt=_parse_int(_require(obj, "damage_dealt", ctx), ctx + "damage_dealt"),
        damage_received=_parse_int(_require(obj, "damage_received", ctx), ctx + "damage_received"),
        gold_earned=_parse_int(_require(obj, "gold_earned", ctx), ctx + "gold_earned"),
        time_played=_parse_int(_require(obj, "time_played", ctx), ctx + "time_played"),
    )


def _report_from_dict(obj: dict, ctx: str) -> Report:
    comment = obj.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise DatasetError(f"{ctx}comment: expected a string or omitted field")
    return Report(
        source=_parse_enum(ReportSource, _require(obj, "source", ctx), ctx + "source"),
        category=_parse_enum(ReportCategory, _require(obj, "category", ctx), ctx + "category"),
        comment=comment,
    )


def _message_from_dict(obj: dict, ctx: str) -> ChatMessage:
    text = _require(obj, "text", ctx)
    if not isinstance(text, str):
        raise DatasetError(f"{ctx}text: expected a string")
    return ChatMessage(
        speaker_role=_parse_enum(Role, _require(obj, "speaker_role", ctx), ctx + "speaker_role"),
        text=text,
    )


def _match_from_dict(obj: dict, ctx: str) -> Match:
    return Match(
        duration=_parse_int(_require(obj, "duration", ctx), ctx + "duration"),
        offender_won=bool(_require(obj, "offender_won", ctx)),
        players=tuple(
            _player_from_dict(p, f"{ctx}players[{i}].")
            for i, p in enumerate(_require(obj, "players", ctx))
        ),
        reports=tuple(
            _report_from_dict(r, f"{ctx}reports[{i}].")
            for i, r in enumerate(_require(obj, "reports", ctx))
        ),
        chat=tuple(
            _message_from_dict(m, f"{ctx}chat[{i}].")
            for i, m in enumerate(_require(obj, "chat", ctx))
        ),
    )


def case_from_dict(obj: dict) -> Case:
    """Build a Case from a parsed JSON object; raises DatasetError on schema problems."""
    if not isinstance(obj, dict):
        raise DatasetError("case: expected a JSON object")
    case_id = _require(obj, "case_id", "")
    if not isinstance(case_id, str) or not case_id:
        raise DatasetError("case_id: expected a non-empty string")
    return Case(
        case_id=case_id,
        region=_parse_enum(Region, _require(obj, "region", ""), "region"),
        decision=_parse_enum(Decision, _require(obj, "decision", ""), "decision"),
        agreement=_parse_enum(AgreementLevel, _require(obj, "agreement", ""), "agreement"),
        matches=tuple(
            _match_from_dict(m, f"matches[{i}].") for i, m in enumerate(_require(obj, "matches", ""))
        ),
    )


def case_to_dict(case: Case) -> dict:
    matches = []
    for m in case.matches:
        matches.append(
            {
                "duration": m.duration,
                "offender_won": m.offender_won,
                "players": [
                    {
                        "role": p.role.value,
                        "kills": p.kills,
                        "deaths": p.deaths,
                        "assists": p.assists,
                        "damage_dealt": p.damage_dealt,
                        "damage_received": p.damage_received,
                        "gold_earned": p.gold_earned,
                        "time_played": p.time_played,
                    }
                    for p in m.players
                ],
                "reports": [
                    (
                        {"source": r.source.value, "category": r.category.value}
                        if r.comment is None
                        else {
                            "source": r.source.value,
                            "category": r.category.value,
                            "comment": r.comment,
                        }
                    )
                    for r in m.reports
                ],
                "chat": [{"speaker_role": c.speaker_role.value, "text": c.text} for c in m.chat],
            }
        )
    return {
        "case_id": case.case_id,
        "region": case.region.value,
        "decision": case.decision.value,
        "agreement": case.agreement.value,
        "matches": matches,
    }


def serialize_case(case: Case) -> str:
    """Canonical single-line JSON: sorted keys, compact separators, raw UTF-8."""
    return json.dumps(case_to_dict(case), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# --------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_case(case: Case) -> ValidationResult:
    """Check every structural invariant; violations are data, not exceptions."""
    v: list[str] = []
    n = len(case.matches)
    if n < 1:
        v.append("Case.matches: count 0 < 1")
    elif n > MAX_MATCHES_PER_CASE:
        v.append(f"Case.matches: count {n} > {MAX_MATCHES_PER_CASE}")
    for i, m in enumerate(case.matches):
        tag = f"matches[{i}]"
        if m.duration <= 0:
            v.append(f"{tag}.duration: {m.duration} not > 0")
        if len(m.players) != 10:
            v.append(f"{tag}.players: count {len(m.players)} != 10")
        role_counts = {Role.OFFENDER: 0, Role.ALLY: 0, Role.ENEMY: 0}
        for p in m.players:
            role_counts[p.role] += 1
        expected = {Role.OFFENDER: 1, Role.ALLY: 4, Role.ENEMY: 5}
        for role, want in expected.items():
            if role_counts[role] != want:
                v.append(
                    f"{tag}.players: expected {want} {role.value} row(s), found {role_counts[role]}"
                )
        for j, p in enumerate(m.players):
            for name in (
                "kills",
                "deaths",
                "assists",
                "damage_dealt",
                "damage_received",
                "gold_earned",
                "time_played",
            ):
                if getattr(p, name) < 0:
                    v.append(f"{tag}.players[{j}].{name}: negative value {getattr(p, name)}")
            if p.time_played > m.duration:
                v.append(
                    f"{tag}.players[{j}].time_played: {p.time_played} exceeds duration {m.duration}"
                )
        if len(m.reports) < 1:
            v.append(f"{tag}.reports: count 0 < 1")
        for j, r in enumerate(m.reports):
            if r.comment is not None:
                if len(r.comment) == 0:
                    v.append(f"{tag}.reports[{j}].comment: empty string (omit instead)")
                elif len(r.comment) > MAX_COMMENT_LENGTH:
                    v.append(
                        f"{tag}.reports[{j}].comment: length {len(r.comment)} > {MAX_COMMENT_LENGTH}"
                    )
    return ValidationResult(tuple(v))


# --------------------------------------------------------------------------
# Corpus I/O


def parse_case_line(line: str, line_number: int | None = None) -> Case:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"malformed JSON ({exc.msg})", line=line_number) from exc
    try:
        case = case_from_dict(obj)
    except DatasetError as exc:
        if line_number is None:
            raise
        raise DatasetError(str(exc), line=line_number) from exc
    return case


def load_dataset(path) -> Iterator[Case]:
    """Yield validated cases from a JSON-Lines corpus, in file order."""
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            case = parse_case_line(line, line_number)
            result = validate_case(case)
            if not result.ok:
                raise DatasetError("; ".join(result.violations), line=line_number)
            yield case


def save_dataset(cases: Iterable[Case], path) -> int:
    """Write cases in canonical form, one per line. Returns the case count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            fh.write(serialize_case(case))
            fh.write("\n")
            n += 1
    return n


# --------------------------------------------------------------------------
# Dataset summary


@dataclass(frozen=True)
class RegionCounts:
    cases: int = 0
    matches: int = 0
    reports: int = 0

    def __add__(self, other: "RegionCounts") -> "RegionCounts":
        return RegionCounts(
            self.cases + other.cases,
            self.matches + other.matches,
            self.reports + other.reports,
        )


@dataclass(frozen=True)
class DatasetSummary:
    per_region: dict[Region, RegionCounts]

    @property
    def total(self) -> RegionCounts:
        total = RegionCounts()
        for counts in self.per_region.values():
            total = total + counts
        return total

    def to_dict(self) -> dict:
        out = {
            region.value: {
                "cases": counts.cases,
                "matches": counts.matches,
                "reports": counts.reports,
            }
            for region, counts in self.per_region.items()
        }
        t = self.total
        out["total"] = {"cases": t.cases, "matches": t.matches, "reports": t.reports}
        return out


def summarize_dataset(cases: Iterable[Case]) -> DatasetSummary:
    tallies = {region: [0, 0, 0] for region in Region}
    for case in cases:
        row = tallies[case.region]
        row[0] += 1
        row[1] += len(case.matches)
        row[2] += sum(len(m.reports) for m in case.matches)
    return DatasetSummary(
        per_region={region: RegionCounts(*row) for region, row in tallies.items()}
    )


def format_summary_table(summary: DatasetSummary) -> str:
    """Fixed-column table; rows are Cases, Matches, Reports."""
    regions = list(Region)
    headers = [""] + [r.name for r in regions] + ["Total"]
    rows = []
    for label, attr in (("Cases", "cases"), ("Matches", "matches"), ("Reports", "reports")):
        values = [getattr(summary.per_region[r], attr) for r in regions]
        rows.append([label] + [f"{v:,}" for v in values] + [f"{sum(values):,}"])
    widths = [max(len(str(row[i])) for row in [headers] + rows) for i in range(len(headers))]
    lines = ["  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)) for row in [headers] + rows]
    return "\n".join(lines)
