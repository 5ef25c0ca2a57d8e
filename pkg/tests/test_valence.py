"""Valence scoring tests against an independent token-counting oracle."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdverdict.domain import ChatMessage, Role
from crowdverdict.errors import LexiconError
from crowdverdict.valence import (
    ValenceLexicon,
    load_lexicon,
    role_valences,
    score_text,
    tokenize,
)

from conftest import make_match


def oracle_score(entries: dict[str, float], text: str) -> float:
    """Independent v_text: explicit per-word frequency counting.

    Tokenizes by the documented rule (lowercase; alphanumeric runs joined by
    internal apostrophes) using a character scan rather than the regex the
    implementation uses.
    """
    tokens = []
    word = []
    for ch in text.lower() + " ":
        if ch.isalnum() and ch != "_" or ch == "'":
            word.append(ch)
        else:
            if word:
                tokens.append("".join(word).strip("'"))
                word = []
    freq: dict[str, int] = {}
    for token in tokens:
        if token:
            freq[token] = freq.get(token, 0) + 1
    num = sum(entries[w] * f for w, f in freq.items() if w in entries)
    den = sum(f for w, f in freq.items() if w in entries)
    return num / den if den else 0.0


@pytest.fixture
def tiny_lexicon():
    return ValenceLexicon({"good": 7.0, "bad": 3.0})


class TestTokenize:
    def test_shouting_with_punctuation(self):
        assert tokenize("STFU NOOB!").tokens == ("stfu", "noob")

    def test_empty_string(self):
        assert tokenize("").tokens == ()

    def test_separators_collapse(self):
        assert tokenize("gg,noob...noob").tokens == ("gg", "noob", "noob")

    def test_intra_word_apostrophe_kept(self):
        assert tokenize("Don't FEED").tokens == ("don't", "feed")

    def test_quoting_apostrophes_stripped(self):
        assert tokenize("'noob'").tokens == ("noob",)

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=60))
    def test_deterministic_and_whitespace_free(self, text):
        first = tokenize(text)
        assert first == tokenize(text)
        assert all(tok and not any(c.isspace() for c in tok) for tok in first.tokens)


class TestLoadLexicon:
    def test_two_row_file(self, tmp_path):
        path = tmp_path / "lex.csv"
        path.write_text("word,valence\ngood,7.47\nbad,2.63\n")
        lexicon = load_lexicon(path)
        assert len(lexicon) == 2
        assert lexicon.score_of("GOOD") == 7.47

    def test_tab_delimited_and_comments(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# a comment\ngood\t7.0\nbad\t3.0\n")
        assert len(load_lexicon(path)) == 2

    def test_out_of_range_score_rejected(self, tmp_path):
        path = tmp_path / "lex.csv"
        path.write_text("good,9.5\n")
        with pytest.raises(LexiconError, match="outside"):
            load_lexicon(path)

    def test_duplicate_word_rejected(self, tmp_path):
        path = tmp_path / "lex.csv"
        path.write_text("good,7.0\nGood,6.5\n")
        with pytest.raises(LexiconError, match="duplicate"):
            load_lexicon(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "lex.csv"
        path.write_text("good,7.0,extra\n")
        with pytest.raises(LexiconError, match="2 fields"):
            load_lexicon(path)

    def test_bundled_lexicon_all_scores_in_range(self, lexicon):
        assert len(lexicon) >= 40
        assert all(1.0 <= s <= 9.0 for s in lexicon.entries.values())


class TestScoreText:
    def test_no_lexicon_words_scores_zero(self, tiny_lexicon):
        assert score_text(tiny_lexicon, "xyz qwerty 123") == 0.0

    def test_single_word(self, tiny_lexicon):
        assert score_text(tiny_lexicon, "GOOD!") == 7.0

    def test_frequency_weighting(self, tiny_lexicon):
        value = score_text(tiny_lexicon, "good good bad")
        assert abs(value - (7.0 * 2 + 3.0) / 3) < 1e-9

    def test_matches_oracle_on_bundled_lexicon(self, lexicon):
        texts = [
            "noob noob stfu report",
            "gg wp nice game",
            "don't feed mid, push top! GG",
            "",
            "xyz abc",
        ]
        for text in texts:
            assert abs(score_text(lexicon, text) - oracle_score(lexicon.entries, text)) < 1e-9


def _random_text(rng, words, n):
    return " ".join(rng.choice(words) for _ in range(n))


def test_score_matches_oracle_on_randomized_texts(lexicon):
    import random

    rng = random.Random(20240202)
    vocabulary = list(lexicon.entries) + ["zzz", "qqq", "142", "don't", "x'y", "!!!"]
    for _ in range(1000):
        text = _random_text(rng, vocabulary, rng.randint(0, 30))
        got = score_text(lexicon, text)
        want = oracle_score(lexicon.entries, text)
        assert abs(got - want) < 1e-9
        if want == 0.0:
            assert got == 0.0


class TestScoreProperties:
    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.sampled_from(["good", "bad", "zzz", "noob"]), max_size=25))
    def test_bounds(self, words):
        lexicon = ValenceLexicon({"good": 7.0, "bad": 3.0, "noob": 1.0})
        value = score_text(lexicon, " ".join(words))
        assert 0.0 <= value <= 9.0
        if any(w in lexicon.entries for w in words):
            assert 1.0 <= value <= 9.0
        else:
            assert value == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.permutations(["good", "bad", "bad", "zzz", "noob"]))
    def test_permutation_invariance(self, words):
        lexicon = ValenceLexicon({"good": 7.0, "bad": 3.0, "noob": 1.0})
        assert score_text(lexicon, " ".join(words)) == score_text(
            lexicon, " ".join(["good", "bad", "bad", "zzz", "noob"])
        )

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.sampled_from(["good", "bad", "zzz"]), min_size=1, max_size=10),
        st.integers(min_value=1, max_value=5),
    )
    def test_replication_invariance(self, words, k):
        lexicon = ValenceLexicon({"good": 7.0, "bad": 3.0})
        once = score_text(lexicon, " ".join(words))
        replicated = score_text(lexicon, " ".join(words * k))
        assert math.isclose(once, replicated, rel_tol=0, abs_tol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.sampled_from(["good", "bad", "noob"]), min_size=1, max_size=12),
        st.lists(st.sampled_from(["good", "bad", "noob"]), min_size=1, max_size=12),
    )
    def test_monotone_mixing(self, a, b):
        lexicon = ValenceLexicon({"good": 7.0, "bad": 3.0, "noob": 1.0})
        va = score_text(lexicon, " ".join(a))
        vb = score_text(lexicon, " ".join(b))
        vab = score_text(lexicon, " ".join(a + b))
        low, high = min(va, vb), max(va, vb)
        assert low - 1e-12 <= vab <= high + 1e-12


class TestRoleValences:
    def test_only_offender_talks(self, tiny_lexicon):
        match = make_match(
            chat=[ChatMessage(speaker_role=Role.OFFENDER, text="good bad")]
        )
        scores = role_valences(tiny_lexicon, match)
        assert scores["allies"] == 0.0
        assert scores["enemies"] == 0.0
        assert scores["offender"] == scores["all"] == 5.0

    def test_offender_and_ally(self, tiny_lexicon):
        match = make_match(
            chat=[
                ChatMessage(speaker_role=Role.OFFENDER, text="good"),
                ChatMessage(speaker_role=Role.ALLY, text="bad"),
            ]
        )
        scores = role_valences(tiny_lexicon, match)
        assert scores["offender"] == 7.0
        assert scores["allies"] == 3.0
        assert scores["all"] == 5.0

    def test_no_chat_all_zero(self, tiny_lexicon):
        scores = role_valences(tiny_lexicon, make_match(chat=[]))
        assert scores == {"offender": 0.0, "allies": 0.0, "enemies": 0.0, "all": 0.0}

    def test_concatenation_order_irrelevant(self, tiny_lexicon):
        messages = [
            ChatMessage(speaker_role=Role.OFFENDER, text="good bad"),
            ChatMessage(speaker_role=Role.OFFENDER, text="bad"),
        ]
        forward = role_valences(tiny_lexicon, make_match(chat=messages))
        backward = role_valences(tiny_lexicon, make_match(chat=list(reversed(messages))))
        assert forward == backward
