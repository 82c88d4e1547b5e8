from __future__ import annotations

import random

import pytest

from dstkit.metrics import (
    CauseCounts,
    error_cause_breakdown,
    evaluate,
    joint_goal_accuracy,
    per_slot_error_rates,
    render_report_text,
    report_to_dict,
    slot_metrics,
)

from gen import random_aligned_lists
from oracles import ref_causes, ref_jga, ref_per_slot, ref_slot_metrics


def test_jga_half():
    preds = [{"a-x": "1"}, {"a-x": "1", "b-y": "2"}]
    golds = [{"a-x": "1"}, {"a-x": "1", "b-y": "3"}]
    assert joint_goal_accuracy(preds, golds) == 0.5


def test_jga_perfect_and_empty_match():
    golds = [{"a-x": "1"}, {}]
    assert joint_goal_accuracy([dict(g) for g in golds], golds) == 1.0
    assert joint_goal_accuracy([{}], [{}]) == 1.0


def test_jga_length_mismatch():
    with pytest.raises(ValueError):
        joint_goal_accuracy([{}], [{}, {}])
    with pytest.raises(ValueError):
        joint_goal_accuracy([], [])


def test_slot_metrics_worked_example():
    gold = {"a-a": "1", "b-b": "2", "c-c": "3", "d-d": "4"}
    pred = {"a-a": "1", "b-b": "9", "c-c": "3", "e-e": "5"}
    precision, recall, f1, ser = slot_metrics([pred], [gold])
    assert (precision, recall, f1) == (0.5, 0.5, 0.5)
    assert ser == 0.75  # S=1 (b), D=1 (d), I=1 (e), over 4 gold slots


def test_slot_metrics_perfect():
    golds = [{"a-a": "1", "b-b": "2"}]
    assert slot_metrics([dict(golds[0])], golds) == (1.0, 1.0, 1.0, 0.0)


def test_ser_can_exceed_one():
    gold = {"a-a": "1"}
    pred = {"a-a": "2", "b-b": "3", "c-c": "4"}
    *_, ser = slot_metrics([pred], [gold])
    assert ser == 3.0


def test_ser_undefined_without_gold_slots():
    with pytest.raises(ValueError):
        slot_metrics([{"a-a": "1"}], [{}])


def test_empty_predictions_bounds():
    golds = [{"a-a": "1", "b-b": "2"}, {"a-a": "1"}, {}]
    preds = [{}, {}, {}]
    precision, recall, f1, ser = slot_metrics(preds, golds)
    assert recall == 0.0 and f1 == 0.0
    assert ser == 1.0  # every gold slot is a deletion
    assert joint_goal_accuracy(preds, golds) == pytest.approx(1 / 3)


def test_per_slot_rates():
    golds = [{"a-a": "1"}, {"a-a": "1"}, {"a-a": "1"}, {"a-a": "1"}]
    preds = [{"a-a": "1"}, {"a-a": "1"}, {"a-a": "1"}, {"a-a": "2"}]
    rates = per_slot_error_rates(preds, golds)
    assert rates["a-a"].error_rate == 0.25
    assert rates["a-a"].support == 4


def test_per_slot_spurious_only():
    rates = per_slot_error_rates([{"a-a": "1"}], [{}])
    assert rates["a-a"].error_rate == 1.0
    assert rates["a-a"].support == 1


def test_per_slot_absent_slot_omitted():
    rates = per_slot_error_rates([{"a-a": "1"}], [{"a-a": "1"}])
    assert set(rates) == {"a-a"}


def test_cause_breakdown():
    golds = [{"hotel-type": "guesthouse"}, {}, {"hotel-type": "guesthouse"}]
    preds = [{}, {"hotel-type": "hotel"}, {"hotel-type": "hotel"}]
    causes = error_cause_breakdown(preds, golds, "hotel-type")
    assert causes == CauseCounts(value_error=1, overestimation=1, underestimation=1)


def test_causes_partition_per_slot_errors():
    rng = random.Random(3)
    for _ in range(50):
        preds, golds = random_aligned_lists(rng)
        rates = per_slot_error_rates(preds, golds)
        for slot, score in rates.items():
            causes = error_cause_breakdown(preds, golds, slot)
            errors = round(score.error_rate * score.support)
            assert causes.value_error + causes.overestimation + causes.underestimation == errors


def test_matches_brute_force_reference():
    rng = random.Random(17)
    for _ in range(100):
        preds, golds = random_aligned_lists(rng)
        assert joint_goal_accuracy(preds, golds) == ref_jga(preds, golds)
        assert slot_metrics(preds, golds) == ref_slot_metrics(preds, golds)
        ours = per_slot_error_rates(preds, golds)
        theirs = ref_per_slot(preds, golds)
        assert {s: (v.error_rate, v.support) for s, v in ours.items()} == theirs
        for slot in ours:
            assert error_cause_breakdown(preds, golds, slot) == CauseCounts(
                *ref_causes(preds, golds, slot)
            )


def test_perfect_prediction_property():
    rng = random.Random(8)
    for _ in range(30):
        _, golds = random_aligned_lists(rng)
        preds = [dict(g) for g in golds]
        report = evaluate(preds, golds)
        assert report.jga == 1.0
        assert report.ser == 0.0
        assert report.slot_f1 == 1.0
        assert all(s.error_rate == 0.0 for s in report.per_slot.values())


def test_parallel_reduction_equals_sequential():
    rng = random.Random(9)
    preds, golds = random_aligned_lists(rng, turns=12)
    whole = slot_metrics(preds, golds)
    # metrics recomputed over any concatenation order of the same turns
    reordered = list(zip(preds, golds))
    rng.shuffle(reordered)
    shuffled = slot_metrics([p for p, _ in reordered], [g for _, g in reordered])
    assert whole == shuffled


def test_report_rendering():
    preds = [{"a-a": "1", "b-b": "2"}]
    golds = [{"a-a": "1", "b-b": "3"}]
    report = evaluate(preds, golds)
    as_dict = report_to_dict(report)
    assert as_dict["ser_definition"].startswith("(substitutions")
    assert list(report.per_slot) == ["b-b", "a-a"]  # sorted by error rate desc
    text = render_report_text(report)
    assert "jga" in text and "b-b" in text
