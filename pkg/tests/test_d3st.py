from __future__ import annotations

import random
import re

import pytest

from dstkit.corpus import Schema, SlotDef
from dstkit.d3st import (
    build_examples,
    build_prompt,
    build_target,
    parse_state_string,
    prompt_from_record,
)

from gen import random_schema, random_state

CATEGORICAL_FRAGMENT = re.compile(r"^\d+:\d+[a-z]$")


@pytest.fixture(scope="module")
def two_slot_schema():
    return Schema((
        SlotDef("hotel-stars", "star rating of the hotel"),
        SlotDef("hotel-type", "type of the hotel", ("guesthouse", "hotel")),
    ))


def test_build_prompt_grammar(two_slot_schema):
    prompt = build_prompt(two_slot_schema, [("USER", "i need a 4-star guesthouse")])
    assert prompt.input_text == (
        "0:star rating of the hotel 1:type of the hotel 1a) guesthouse "
        "1b) hotel [user] i need a 4-star guesthouse"
    )
    assert prompt.slot_index_map == {0: "hotel-stars", 1: "hotel-type"}
    assert prompt.categorical_letter_map == {
        (1, "a"): "guesthouse", (1, "b"): "hotel",
    }


def test_build_prompt_two_turns(two_slot_schema):
    prompt = build_prompt(
        two_slot_schema,
        [("USER", "hello there"), ("SYSTEM", "how can i help?")],
    )
    assert prompt.input_text.endswith("[user] hello there [system] how can i help?")


def test_build_prompt_single_slot():
    schema = Schema((SlotDef("taxi-destination", "where the taxi goes"),))
    prompt = build_prompt(schema, [("USER", "to the station")])
    assert prompt.slot_index_map == {0: "taxi-destination"}


def test_build_prompt_empty_history_rejected(two_slot_schema):
    with pytest.raises(ValueError):
        build_prompt(two_slot_schema, [])


def test_build_prompt_shuffle_same_fragments(two_slot_schema):
    plain = build_prompt(two_slot_schema, [("USER", "hi")])
    shuffled = build_prompt(two_slot_schema, [("USER", "hi")], variant_rng=3)
    assert set(plain.slot_index_map.values()) == set(shuffled.slot_index_map.values())
    by_name_plain = {
        name: sorted(
            v for (i, _), v in plain.categorical_letter_map.items()
            if plain.slot_index_map[i] == name
        )
        for name in plain.slot_index_map.values()
    }
    by_name_shuffled = {
        name: sorted(
            v for (i, _), v in shuffled.categorical_letter_map.items()
            if shuffled.slot_index_map[i] == name
        )
        for name in shuffled.slot_index_map.values()
    }
    assert by_name_plain == by_name_shuffled


def test_build_target_table1_encoding(schema):
    prompt = build_prompt(schema, [("USER", "anything")])
    state = {
        "hotel-stars": "4",
        "hotel-type": "guesthouse",
        "hotel-internet": "yes",
        "restaurant-name": "bangkok city",
        "restaurant-area": "centre",
    }
    assert build_target(state, prompt) == (
        "[states] 0:4 1:1a 2:2a 3:bangkok city 4:centre"
    )


def test_build_target_empty_state(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    assert build_target({}, prompt) == "[states]"


def test_build_target_order_seed_permutes(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state = {"hotel-stars": "4", "hotel-type": "hotel", "restaurant-area": "centre"}
    targets = {build_target(state, prompt, order_seed=s) for s in range(10)}
    # same fragment multiset, possibly different order
    for t in targets:
        parsed, issues = parse_state_string(t, prompt, schema)
        assert parsed == state and not issues
    assert len(targets) >= 2  # at least one permutation differs


def test_build_target_unknown_slot_rejected(two_slot_schema):
    prompt = build_prompt(two_slot_schema, [("USER", "x")])
    with pytest.raises(ValueError, match="restaurant-name"):
        build_target({"restaurant-name": "cocum"}, prompt)


def test_build_target_out_of_list_categorical_rejected(two_slot_schema):
    prompt = build_prompt(two_slot_schema, [("USER", "x")])
    with pytest.raises(ValueError, match="hotel-type"):
        build_target({"hotel-type": "castle"}, prompt)


def test_parse_round_trip_example(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state, issues = parse_state_string(
        "[states] 0:4 1:1a 3:bangkok city", prompt, schema
    )
    assert state == {
        "hotel-stars": "4",
        "hotel-type": "guesthouse",
        "restaurant-name": "bangkok city",
    }
    assert issues == []


def test_parse_unknown_index(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state, issues = parse_state_string("[states] 9:foo", prompt, schema)
    assert state == {}
    assert [i.kind for i in issues] == ["unknown-index"]


def test_parse_unknown_letter(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state, issues = parse_state_string("[states] 1:1z", prompt, schema)
    assert "hotel-type" not in state
    assert [i.kind for i in issues] == ["unknown-letter"]


def test_parse_duplicate_index_last_wins(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state, issues = parse_state_string("[states] 0:4 0:5", prompt, schema)
    assert state == {"hotel-stars": "5"}
    assert [i.kind for i in issues] == ["duplicate-index"]


def test_parse_junk_and_whitespace(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state, issues = parse_state_string("[states]   0:4   1:1a ", prompt, schema)
    assert state == {"hotel-stars": "4", "hotel-type": "guesthouse"}
    assert issues == []
    state, issues = parse_state_string("[states] mumble 0:4", prompt, schema)
    assert state == {"hotel-stars": "4"}
    assert [i.kind for i in issues] == ["junk"]


def test_parse_never_raises_on_garbage(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    for garbage in ["", "[states]", "::::", "0:", "1:1", "a:b c:d", "[states] 1:"]:
        state, issues = parse_state_string(garbage, prompt, schema)
        assert isinstance(state, dict)


def test_multiword_values_survive(schema):
    prompt = build_prompt(schema, [("USER", "x")])
    state = {"restaurant-name": "bangkok city", "restaurant-area": "centre"}
    target = build_target(state, prompt)
    parsed, issues = parse_state_string(target, prompt, schema)
    assert parsed == state and not issues


def test_categorical_fragments_match_regex():
    rng = random.Random(7)
    for _ in range(200):
        schema = random_schema(rng)
        prompt = build_prompt(schema, [("USER", "hello")])
        # single-word open values so whitespace splitting recovers fragments
        state = {}
        for slot in schema.slots:
            if rng.random() < 0.7:
                state[slot.name] = (
                    rng.choice(slot.values) if slot.categorical else "word"
                )
        target = build_target(state, prompt, order_seed=rng.randint(0, 9999))
        categorical_indices = {i for i, _ in prompt.categorical_letter_map}
        for fragment in target[len("[states]"):].split():
            index = fragment.split(":", 1)[0]
            if ":" in fragment and int(index) in categorical_indices:
                assert CATEGORICAL_FRAGMENT.match(fragment), fragment
                letter_key = (int(index), fragment[-1])
                slot_name = prompt.slot_index_map[int(index)]
                value = prompt.categorical_letter_map[letter_key]
                assert value in schema.by_name(slot_name).values


def test_round_trip_random(schema):
    rng = random.Random(21)
    for _ in range(300):
        gen_schema = random_schema(rng)
        prompt = build_prompt(gen_schema, [("USER", "hello there")])
        state = random_state(rng, gen_schema)
        target = build_target(state, prompt, order_seed=rng.randint(0, 10**6))
        parsed, issues = parse_state_string(target, prompt, gen_schema)
        assert parsed == state
        assert issues == []


def test_round_trip_with_shuffled_prompt():
    rng = random.Random(22)
    for _ in range(100):
        gen_schema = random_schema(rng)
        prompt = build_prompt(
            gen_schema, [("USER", "hello")], variant_rng=rng.randint(0, 10**6)
        )
        state = random_state(rng, gen_schema)
        parsed, issues = parse_state_string(
            build_target(state, prompt), prompt, gen_schema
        )
        assert parsed == state and not issues


# -- export records --


def test_build_examples_round_trip(five_corpus, schema):
    records = build_examples(five_corpus, schema, variant="transcript")
    assert len(records) == sum(len(d.user_turns()) for d in five_corpus)
    for record, (dialogue, index, gold) in zip(
        records,
        [
            (d, i, t.state)
            for d in five_corpus
            for i, t in enumerate(d.user_turns())
        ],
    ):
        assert record["dialogue_id"] == dialogue.id
        assert record["turn_index"] == index
        prompt = prompt_from_record(record)
        parsed, issues = parse_state_string(record["target_text"], prompt, schema)
        assert parsed == gold and not issues


def test_build_examples_deterministic(five_corpus, schema):
    a = build_examples(five_corpus, schema, target_order_seed=5, shuffle_slots_seed=9)
    b = build_examples(five_corpus, schema, target_order_seed=5, shuffle_slots_seed=9)
    assert a == b
