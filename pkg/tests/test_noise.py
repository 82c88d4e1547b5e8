from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dstkit.errors import ConfigError, DataError
from dstkit.noise import (
    DEFAULT_CONFUSIONS,
    NoiseConfig,
    corrupt_corpus,
    corrupt_utterance,
    load_noise_config,
)
from dstkit.textnorm import SPECIAL_CHARS

ZERO = NoiseConfig(confusion_table={})
STRIP = NoiseConfig(strip_special_chars=1.0, confusion_table={})
TIMES = NoiseConfig(spell_out_times=1.0, confusion_table={})
FULL = NoiseConfig(strip_special_chars=1.0, spell_out_times=1.0, confusion_table={})


def test_strip_rule():
    assert corrupt_utterance("i'd like a room", STRIP, "k") == "id like a room"
    assert corrupt_utterance("a 4-star hotel.", STRIP, "k") == "a 4 star hotel"


def test_spell_out_rule():
    assert corrupt_utterance("arrive by 08:15", TIMES, "k") == "arrive by eight fifteen"
    assert corrupt_utterance("leave at 12:00", FULL, "k") == "leave at twelve oclock"
    assert corrupt_utterance("leave at 12:00", TIMES, "k") == "leave at twelve o'clock"


def test_all_zero_identity_example():
    text = "how, are: you? i'm fine at 08:15"
    assert corrupt_utterance(text, ZERO, "k") == text


@given(st.text(max_size=80), st.text(min_size=1, max_size=10))
def test_all_zero_identity_arbitrary(text, key):
    assert corrupt_utterance(text, ZERO, key) == text


@given(st.text(max_size=80), st.text(min_size=1, max_size=10))
def test_monotone_damage(text, key):
    out = corrupt_utterance(text, FULL, key)
    assert not any(ch in out for ch in SPECIAL_CHARS)


def test_determinism():
    config = NoiseConfig(0.5, 0.5, 0.5, {"hello": ("hullo",)}, seed=42)
    text = "hello there, it's 09:30 already"
    first = corrupt_utterance(text, config, "stream")
    assert corrupt_utterance(text, config, "stream") == first
    # other streams may differ but are stable too
    assert corrupt_utterance(text, config, "other") == corrupt_utterance(
        text, config, "other"
    )


def test_confusion_rule():
    config = NoiseConfig(word_confusion=1.0, confusion_table={"centre": ("center",)})
    assert corrupt_utterance("in the centre", config, "k") == "in the center"


def test_probability_validation():
    with pytest.raises(ConfigError):
        NoiseConfig(strip_special_chars=1.5)
    with pytest.raises(ConfigError):
        NoiseConfig(confusion_table={"a": ()})


def test_default_confusions_shape():
    assert len(DEFAULT_CONFUSIONS) >= 40
    assert all(alts for alts in DEFAULT_CONFUSIONS.values())
    # default table never introduces special characters
    for alts in DEFAULT_CONFUSIONS.values():
        for alt in alts:
            assert not any(ch in alt for ch in SPECIAL_CHARS)


# -- corpus level --


def test_corrupt_corpus_zero_equals_transcript(five_corpus):
    out = corrupt_corpus(five_corpus, ZERO, "asr")
    for dialogue in out:
        for turn in dialogue.turns:
            assert turn.texts["asr"] == turn.texts["transcript"]
            assert set(turn.texts) == {"transcript", "asr"}


def test_corrupt_corpus_deterministic(five_corpus):
    config = NoiseConfig(0.4, 0.9, 0.3, seed=11)
    a = corrupt_corpus(five_corpus, config, "asr")
    b = corrupt_corpus(five_corpus, config, "asr")
    assert a == b


def test_corrupt_corpus_parallel_stable(five_corpus):
    config = NoiseConfig(0.4, 0.9, 0.3, seed=11)
    sequential = corrupt_corpus(five_corpus, config, "asr", workers=1)
    parallel = corrupt_corpus(five_corpus, config, "asr", workers=3)
    assert sequential == parallel
    # order of dialogues does not change per-dialogue results
    reversed_in = corrupt_corpus(list(reversed(five_corpus)), config, "asr")
    assert list(reversed(reversed_in)) == sequential


def test_corrupt_corpus_refuses_overwrite(five_corpus):
    once = corrupt_corpus(five_corpus, ZERO, "asr")
    with pytest.raises(DataError, match="refusing to overwrite"):
        corrupt_corpus(once, ZERO, "asr")


def test_corrupt_corpus_requires_transcript(five_corpus):
    from dstkit.corpus import Dialogue, Turn

    broken = [Dialogue("d1", [Turn("USER", {"asr": "hello"}, {})])]
    with pytest.raises(DataError, match="transcript"):
        corrupt_corpus(broken, ZERO, "noised")


def test_corrupt_corpus_states_untouched(five_corpus):
    out = corrupt_corpus(five_corpus, FULL, "asr")
    for before, after in zip(five_corpus, out):
        for tb, ta in zip(before.turns, after.turns):
            assert tb.state == ta.state


def test_load_noise_config(fixtures_dir):
    config = load_noise_config(fixtures_dir / "noise.cfg")
    assert config.strip_special_chars == 1.0
    assert config.spell_out_times == 1.0
    assert config.word_confusion == 0.0
    assert config.seed == 20260808


def test_load_noise_config_rejects_unknown_key(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("strip_special_chars = 0.5\nbogus = 1\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_noise_config(bad)
