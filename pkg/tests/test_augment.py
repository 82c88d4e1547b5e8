from __future__ import annotations

import pytest

from dstkit.augment import augment_corpus, augment_dialogue, check_augmented
from dstkit.corpus import render_corpus
from dstkit.postproc import NounDatabase, load_noun_db


@pytest.fixture(scope="module")
def pool(fixtures_dir, schema):
    return load_noun_db(fixtures_dir / "nouns.tsv", schema)


def test_factor_one_is_identity(table1, schema, pool):
    out = augment_dialogue(table1[0], schema, pool, factor=1, seed=4)
    assert out == [table1[0]]


def test_factor_zero_rejected(table1, schema, pool):
    with pytest.raises(ValueError):
        augment_dialogue(table1[0], schema, pool, factor=0, seed=4)


def test_substitution_rewrites_text_and_states(table1, schema, pool):
    variants = augment_dialogue(table1[0], schema, pool, factor=4, seed=4)
    changed = 0
    for variant in variants[1:]:
        final = variant.user_turns()[-1].state
        new_name = final["restaurant-name"]
        if new_name == "bangkok city":
            continue
        changed += 1
        assert new_name in pool.entries["restaurant-name"]
        # every text mention moved with the state
        user3 = variant.turns[6].texts["transcript"]
        assert new_name in user3
        assert "bangkok city" not in user3
        # state at the turn where the name first appeared also updated
        assert variant.user_turns()[3].state["restaurant-name"] == new_name
    assert changed >= 1


def test_structure_preserved_and_consistent(five_corpus, schema, pool):
    for dialogue in five_corpus:
        variants = augment_dialogue(dialogue, schema, pool, factor=10, seed=12)
        assert len(variants) == 10
        for variant in variants:
            assert check_augmented(dialogue, variant) == []


def test_categorical_values_never_touched(table1, schema, pool):
    variants = augment_dialogue(table1[0], schema, pool, factor=6, seed=1)
    for variant in variants:
        for turn in variant.user_turns():
            assert turn.state["hotel-type"] == "guesthouse"


def test_missing_pool_slot_left_unchanged(table1, schema):
    tiny = NounDatabase({"restaurant-area": frozenset(["north", "centre"])})
    variants = augment_dialogue(table1[0], schema, tiny, factor=3, seed=2)
    for variant in variants:
        assert variant.user_turns()[-1].state["restaurant-name"] == "bangkok city"


def test_deterministic_under_seed(five_corpus, schema, pool):
    a = augment_corpus(five_corpus, schema, pool, factor=3, seed=9)
    b = augment_corpus(five_corpus, schema, pool, factor=3, seed=9)
    assert render_corpus(a) == render_corpus(b)


def test_corpus_count_and_unique_ids(five_corpus, schema, pool):
    out = augment_corpus(five_corpus, schema, pool, factor=3, seed=9)
    assert len(out) == 15
    assert len({d.id for d in out}) == 15


def test_parallel_matches_sequential(five_corpus, schema, pool):
    seq = augment_corpus(five_corpus, schema, pool, factor=3, seed=9, workers=1)
    par = augment_corpus(five_corpus, schema, pool, factor=3, seed=9, workers=3)
    assert seq == par
