"""Closed-form cost, throughput, and victim-impact calculators.

All inputs are published operational figures with overridable defaults.  The
``paper_mode`` flag on the first-year cost reproduces the headline arithmetic
that rounds the per-vote price to $0.02 before multiplying; exact mode
propagates full precision instead.

Note: the 83 minutes/day default is treated as an exogenous constant.  It is
not consistent with deriving minutes from 1B monthly hours over 12M daily
players (which would give roughly 166.7 min/day); the calculators do not try
to reconcile the two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError

PAPER_VOTE_COST_USD = 0.02
DAYS_PER_YEAR = 365


@dataclass(frozen=True)
class EconomyParams:
    ip_per_vote: float = 5.0
    champion_ip: float = 450.0
    champion_rp: float = 260.0
    usd_per_bundle: float = 10.0
    rp_per_bundle: float = 1380.0

    def __post_init__(self):
        for name in ("ip_per_vote", "champion_ip", "champion_rp", "usd_per_bundle", "rp_per_bundle"):
            if getattr(self, name) < 0 or (name != "ip_per_vote" and getattr(self, name) == 0):
                raise DataError(f"EconomyParams.{name} must be positive")


@dataclass(frozen=True)
class ThroughputParams:
    total_votes: float = 105_000_000.0
    toxic_players: float = 560_000.0
    votes_first_year: float = 47_000_000.0
    votes_per_second: float = 1.49
    majority_vote_fraction: float = 0.5

    def __post_init__(self):
        for name in ("total_votes", "toxic_players", "votes_first_year", "votes_per_second"):
            if getattr(self, name) <= 0:
                raise DataError(f"ThroughputParams.{name} must be positive")
        if not 0.0 < self.majority_vote_fraction <= 1.0:
            raise DataError("ThroughputParams.majority_vote_fraction must be in (0, 1]")


@dataclass(frozen=True)
class PopulationParams:
    daily_players: float = 12_000_000.0
    minutes_per_day: float = 83.0
    match_minutes: float = 37.5
    matches_per_day: float = 2.21
    innocents_per_match: float = 9.0

    def __post_init__(self):
        for name in ("daily_players", "match_minutes", "innocents_per_match"):
            if getattr(self, name) <= 0:
                raise DataError(f"PopulationParams.{name} must be positive")
        # minutes_per_day / matches_per_day may be zeroed together (no-play scenario).
        for name in ("minutes_per_day", "matches_per_day"):
            if getattr(self, name) < 0:
                raise DataError(f"PopulationParams.{name} must be non-negative")
        if abs(self.matches_per_day - self.minutes_per_day / self.match_minutes) > 0.01:
            raise DataError(
                "PopulationParams.matches_per_day must equal minutes_per_day / "
                "match_minutes within rounding"
            )


def vote_cost_usd(economy: EconomyParams = EconomyParams()) -> float:
    """Dollar value of the in-game currency once awarded per vote."""
    return (
        economy.ip_per_vote
        * (economy.champion_rp / economy.champion_ip)
        * (economy.usd_per_bundle / economy.rp_per_bundle)
    )


def votes_per_case(throughput: ThroughputParams = ThroughputParams()) -> float:
    """Average votes needed to reach a verdict on one case."""
    return throughput.total_votes / throughput.toxic_players


def seconds_per_case(throughput: ThroughputParams = ThroughputParams()) -> float:
    """Average wall-clock seconds of voting per verdict."""
    return votes_per_case(throughput) / throughput.votes_per_second


def first_year_cost_usd(
    throughput: ThroughputParams = ThroughputParams(),
    economy: EconomyParams = EconomyParams(),
    paper_mode: bool = False,
) -> float:
    """First-year crowd cost: majority votes times the per-vote price.

    ``paper_mode`` uses the rounded $0.02 per-vote price so the headline
    figure reproduces exactly; otherwise the exact price is used.
    """
    per_vote = PAPER_VOTE_COST_USD if paper_mode else vote_cost_usd(economy)
    return throughput.votes_first_year * throughput.majority_vote_fraction * per_vote


@dataclass(frozen=True)
class VictimReport:
    toxic_per_day: float
    toxic_matches_per_day: float
    innocents_exposed_per_day: float

    def to_dict(self) -> dict:
        return {
            "toxic_per_day": self.toxic_per_day,
            "toxic_matches_per_day": self.toxic_matches_per_day,
            "innocents_exposed_per_day": self.innocents_exposed_per_day,
        }


def victims_protected(
    throughput: ThroughputParams = ThroughputParams(),
    population: PopulationParams = PopulationParams(),
) -> VictimReport:
    """Daily toxic verdict throughput and the innocents exposed meanwhile."""
    toxic_per_day = (throughput.votes_first_year / votes_per_case(throughput)) / DAYS_PER_YEAR
    toxic_matches = toxic_per_day * population.matches_per_day
    return VictimReport(
        toxic_per_day=toxic_per_day,
        toxic_matches_per_day=toxic_matches,
        innocents_exposed_per_day=toxic_matches * population.innocents_per_match,
    )


def impact_summary(
    throughput: ThroughputParams = ThroughputParams(),
    economy: EconomyParams = EconomyParams(),
    population: PopulationParams = PopulationParams(),
    paper_mode: bool = False,
) -> dict:
    victims = victims_protected(throughput, population)
    return {
        "paper_mode": paper_mode,
        "vote_cost_usd": vote_cost_usd(economy),
        "votes_per_case": votes_per_case(throughput),
        "seconds_per_case": seconds_per_case(throughput),
        "first_year_cost_usd": first_year_cost_usd(throughput, economy, paper_mode),
        **victims.to_dict(),
    }


def format_impact_table(summary: dict) -> str:
    rows = [
        ("Per-vote cost (USD)", f"{summary['vote_cost_usd']:.4f}"),
        ("Votes per case", f"{summary['votes_per_case']:.2f}"),
        ("Seconds per case", f"{summary['seconds_per_case']:.2f}"),
        ("First-year crowd cost (USD)", f"{summary['first_year_cost_usd']:.2f}"),
        ("Toxic players warned per day", f"{summary['toxic_per_day']:.2f}"),
        ("Toxic matches per day", f"{summary['toxic_matches_per_day']:.2f}"),
        ("Innocents exposed per day", f"{summary['innocents_exposed_per_day']:.2f}"),
    ]
    width = max(len(label) for label, _ in rows)
    mode = "paper-mode (rounded per-vote price)" if summary["paper_mode"] else "exact"
    lines = [f"Impact estimates [{mode}]"]
    lines += [f"  {label.ljust(width)}  {value}" for label, value in rows]
    return "\n".join(lines)
