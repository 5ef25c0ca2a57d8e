"""Lexicon-based valence scoring of chat text.

A valence lexicon maps words to "goodness" scores on a 1-9 scale.  The score
of a piece of text is the frequency-weighted mean valence of the words that
appear in the lexicon; text containing no lexicon word scores exactly 0.

No stemming or typo correction is applied: word-frequency scoring is robust
to internet-style text, and over-normalization mostly inflates non-matches.
The package ships a small invented lexicon for tests and demos
(``data/test_lexicon.csv``); production use drops in a real lexicon file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .domain import Match, Role
from .errors import LexiconError

MIN_VALENCE = 1.0
MAX_VALENCE = 9.0

# A token is a maximal run of letters/digits, possibly joined by internal
# apostrophes ("don't" stays whole, quoting apostrophes are stripped).
_TOKEN_RE = re.compile(r"[^\W_]+(?:'+[^\W_]+)*", re.UNICODE)


@dataclass(frozen=True)
class TokenizedText:
    tokens: tuple[str, ...]


def tokenize(text: str) -> TokenizedText:
    """Lowercase and split on anything that is not alphanumeric or an intra-word apostrophe."""
    return TokenizedText(tuple(_TOKEN_RE.findall(text.lower())))


@dataclass(frozen=True)
class ValenceLexicon:
    """Immutable word -> valence map; lookups are lowercase-normalized."""

    entries: dict[str, float]

    def __post_init__(self):
        for word, score in self.entries.items():
            if word != word.lower():
                raise LexiconError(f"lexicon word {word!r} is not lowercase-normalized")
            if not MIN_VALENCE <= score <= MAX_VALENCE:
                raise LexiconError(
                    f"valence {score} for {word!r} outside [{MIN_VALENCE}, {MAX_VALENCE}]"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def score_of(self, word: str) -> float | None:
        return self.entries.get(word.lower())


def load_lexicon(path) -> ValenceLexicon:
    """Read a two-column (word, valence) file.

    Tab- or comma-delimited; an optional ``word,valence`` header and ``#``
    comment lines are ignored.
    """
    entries: dict[str, float] = {}
    seen_data = False
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split(",")
            if len(fields) != 2:
                raise LexiconError(f"line {line_number}: expected 2 fields, got {len(fields)}")
            word, raw_score = fields[0].strip(), fields[1].strip()
            if not seen_data and (word.lower(), raw_score.lower()) == ("word", "valence"):
                continue
            seen_data = True
            if not word:
                raise LexiconError(f"line {line_number}: empty word")
            try:
                score = float(raw_score)
            except ValueError:
                raise LexiconError(f"line {line_number}: valence {raw_score!r} is not a number")
            if not MIN_VALENCE <= score <= MAX_VALENCE:
                raise LexiconError(
                    f"line {line_number}: valence {score} outside [{MIN_VALENCE}, {MAX_VALENCE}]"
                )
            key = word.lower()
            if key in entries:
                raise LexiconError(f"line {line_number}: duplicate word {word!r}")
            entries[key] = score
    return ValenceLexicon(entries)


def bundled_lexicon_path():
    """Path to the small lexicon shipped for tests and demos."""
    return resources.files("crowdverdict.data") / "test_lexicon.csv"


def load_bundled_lexicon() -> ValenceLexicon:
    return load_lexicon(bundled_lexicon_path())


def score_text(lexicon: ValenceLexicon, text: str) -> float:
    """Frequency-weighted mean valence of the lexicon words in ``text``; 0 if none occur."""
    total = 0.0
    hits = 0
    entries = lexicon.entries
    for token in _TOKEN_RE.findall(text.lower()):
        score = entries.get(token)
        if score is not None:
            total += score
            hits += 1
    return total / hits if hits else 0.0


def _score_accumulated(total: float, hits: int) -> float:
    return total / hits if hits else 0.0


def role_valences(lexicon: ValenceLexicon, match: Match) -> dict[str, float]:
    """Valence per speaker role over concatenated messages.

    Returns ``{"offender", "allies", "enemies", "all"}``; a role with no
    messages (or no lexicon words) scores 0, same as empty text.
    """
    sums = {Role.OFFENDER: 0.0, Role.ALLY: 0.0, Role.ENEMY: 0.0}
    hits = {Role.OFFENDER: 0, Role.ALLY: 0, Role.ENEMY: 0}
    entries = lexicon.entries
    for message in match.chat:
        for token in _TOKEN_RE.findall(message.text.lower()):
            score = entries.get(token)
            if score is not None:
                sums[message.speaker_role] += score
                hits[message.speaker_role] += 1
    return {
        "offender": _score_accumulated(sums[Role.OFFENDER], hits[Role.OFFENDER]),
        "allies": _score_accumulated(sums[Role.ALLY], hits[Role.ALLY]),
        "enemies": _score_accumulated(sums[Role.ENEMY], hits[Role.ENEMY]),
        "all": _score_accumulated(sum(sums.values()), sum(hits.values())),
    }
