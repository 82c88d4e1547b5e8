"""DST scoring over aligned prediction/gold state lists.

Joint goal accuracy is set equality of canonical (slot, value) pairs per
turn, insensitive to any serialization order. The slot error rate is
(substitutions + deletions + insertions) / gold slot count; that formula
is not universal across toolkits, so it is stamped into every report
header. Per-turn accumulation is associative, so any parallel reduction
must equal the sequential result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import DialogueState

REPORT_VERSION = "1"
SER_DEFINITION = "(substitutions + deletions + insertions) / gold_slot_count"


@dataclass(frozen=True)
class SlotScore:
    error_rate: float
    support: int


@dataclass(frozen=True)
class CauseCounts:
    value_error: int
    overestimation: int
    underestimation: int


@dataclass(frozen=True)
class EvalReport:
    jga: float
    slot_precision: float
    slot_recall: float
    slot_f1: float
    ser: float
    per_slot: dict[str, SlotScore]
    causes: dict[str, CauseCounts]
    turns: int


def _check_aligned(
    preds: Sequence[DialogueState], golds: Sequence[DialogueState]
) -> None:
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")
    if not golds:
        raise ValueError("no turns to score")


def joint_goal_accuracy(
    preds: Sequence[DialogueState], golds: Sequence[DialogueState]
) -> float:
    """Fraction of turns whose predicted state equals gold exactly."""
    _check_aligned(preds, golds)
    hits = sum(1 for p, g in zip(preds, golds) if p == g)
    return hits / len(golds)


def slot_metrics(
    preds: Sequence[DialogueState], golds: Sequence[DialogueState]
) -> tuple[float, float, float, float]:
    """(precision, recall, f1, slot error rate) over (slot, value) pairs."""
    _check_aligned(preds, golds)
    tp = fp = fn = 0
    substitutions = deletions = insertions = n_gold = 0
    for pred, gold in zip(preds, golds):
        for slot, value in pred.items():
            if gold.get(slot) == value:
                tp += 1
            else:
                fp += 1
            if slot not in gold:
                insertions += 1
        for slot, value in gold.items():
            n_gold += 1
            if slot not in pred:
                fn += 1
                deletions += 1
            elif pred[slot] != value:
                fn += 1
                substitutions += 1
    if n_gold == 0:
        raise ValueError("slot error rate undefined: no gold slots")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    ser = (substitutions + deletions + insertions) / n_gold
    return precision, recall, f1, ser


def per_slot_error_rates(
    preds: Sequence[DialogueState], golds: Sequence[DialogueState]
) -> dict[str, SlotScore]:
    """Per slot: support = turns where the slot occurs on either side,
    error rate = fraction of those turns with a missing or wrong value."""
    _check_aligned(preds, golds)
    support: dict[str, int] = {}
    errors: dict[str, int] = {}
    for pred, gold in zip(preds, golds):
        for slot in set(pred) | set(gold):
            support[slot] = support.get(slot, 0) + 1
            if pred.get(slot) != gold.get(slot):
                errors[slot] = errors.get(slot, 0) + 1
    return {
        slot: SlotScore(errors.get(slot, 0) / count, count)
        for slot, count in support.items()
    }


def error_cause_breakdown(
    preds: Sequence[DialogueState],
    golds: Sequence[DialogueState],
    slot: str,
) -> CauseCounts:
    """Partition a slot's errors: both sides disagree on the value, the
    slot was predicted but not gold (overestimation), or gold but not
    predicted (underestimation)."""
    _check_aligned(preds, golds)
    value_error = over = under = 0
    for pred, gold in zip(preds, golds):
        in_pred, in_gold = slot in pred, slot in gold
        if in_pred and in_gold:
            if pred[slot] != gold[slot]:
                value_error += 1
        elif in_pred:
            over += 1
        elif in_gold:
            under += 1
    return CauseCounts(value_error, over, under)


def evaluate(
    preds: Sequence[DialogueState], golds: Sequence[DialogueState]
) -> EvalReport:
    precision, recall, f1, ser = slot_metrics(preds, golds)
    per_slot = per_slot_error_rates(preds, golds)
    ordered = dict(
        sorted(per_slot.items(), key=lambda kv: (-kv[1].error_rate, kv[0]))
    )
    causes = {slot: error_cause_breakdown(preds, golds, slot) for slot in ordered}
    return EvalReport(
        jga=joint_goal_accuracy(preds, golds),
        slot_precision=precision,
        slot_recall=recall,
        slot_f1=f1,
        ser=ser,
        per_slot=ordered,
        causes=causes,
        turns=len(golds),
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "ser_definition": SER_DEFINITION,
        "turns": report.turns,
        "jga": report.jga,
        "slot_precision": report.slot_precision,
        "slot_recall": report.slot_recall,
        "slot_f1": report.slot_f1,
        "ser": report.ser,
        "per_slot": {
            slot: {"error_rate": score.error_rate, "support": score.support}
            for slot, score in report.per_slot.items()
        },
        "causes": {
            slot: {
                "value_error": c.value_error,
                "overestimation": c.overestimation,
                "underestimation": c.underestimation,
            }
            for slot, c in report.causes.items()
        },
    }


def render_report_text(report: EvalReport) -> str:
    """Aligned plain-text table; per-slot rows sorted by descending error
    rate."""
    lines = [
        f"turns: {report.turns}",
        f"ser definition: {SER_DEFINITION} (report v{REPORT_VERSION})",
        f"jga:            {report.jga:.4f}",
        f"slot precision: {report.slot_precision:.4f}",
        f"slot recall:    {report.slot_recall:.4f}",
        f"slot f1:        {report.slot_f1:.4f}",
        f"ser:            {report.ser:.4f}",
        "",
    ]
    if report.per_slot:
        width = max(len(s) for s in report.per_slot)
        header = f"{'slot':<{width}}  error%  support  value_err  over  under"
        lines.append(header)
        lines.append("-" * len(header))
        for slot, score in report.per_slot.items():
            cause = report.causes[slot]
            lines.append(
                f"{slot:<{width}}  {100 * score.error_rate:6.1f}  {score.support:7d}"
                f"  {cause.value_error:9d}  {cause.overestimation:4d}"
                f"  {cause.underestimation:5d}"
            )
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    json_path = out_dir / "report.json"
    text_path = out_dir / "report.txt"
    json_path.write_text(
        json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    text_path.write_text(render_report_text(report), encoding="utf-8")
    return json_path, text_path
