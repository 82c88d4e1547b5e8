"""Stage orchestration: ingest -> augment -> noise -> correct -> prompts ->
decode -> postprocess -> eval.

Every enabled stage writes its artifact into the output directory under a
fixed name, so two runs of the same config and seed are byte-identical.
The eval stage scores decoded predictions when the decode stage ran,
otherwise gold-as-pred (a smoke test that must yield JGA 1.0).
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from functools import partial
from pathlib import Path

from . import augment as augment_mod
from . import corpus as corpus_mod
from . import correction, d3st, metrics, postproc
from .adapter import AdapterClient, AdapterEndpoint
from .config import PipelineConfig, validate_config
from .corpus import Dialogue, DialogueState, Turn
from .errors import DataError
from .noise import corrupt_corpus, load_noise_config
from .parallel import pmap
from .textnorm import canonicalize

log = logging.getLogger(__name__)

ARTIFACTS = {
    "ingest": "01_ingested.corpus",
    "augment": "02_augmented.corpus",
    "noise": "03_noised.corpus",
    "correct": "04_corrected.corpus",
    "prompts": "05_prompts.jsonl",
    "decode": "06_predictions.jsonl",
    "postprocess": "07_postprocessed.jsonl",
    "recoveries": "07_recoveries.jsonl",
}


@dataclass(frozen=True)
class PipelineResult:
    report: metrics.EvalReport | None
    artifacts: tuple[Path, ...]
    cumulative_violations: tuple[str, ...]


def _write_jsonl(records: list[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def _correct_dialogue_rules(
    dialogue: Dialogue,
    lexicon: correction.Lexicon,
    source: str,
    target: str,
    min_ratio: float,
) -> Dialogue:
    turns = []
    for i, turn in enumerate(dialogue.turns):
        if source not in turn.texts:
            raise DataError(
                f"correct stage: dialogue {dialogue.id!r} turn {i} has no "
                f"variant {source!r}"
            )
        if target in turn.texts:
            raise DataError(
                f"correct stage: dialogue {dialogue.id!r} turn {i} already "
                f"has variant {target!r}"
            )
        texts = dict(turn.texts)
        texts[target] = correction.correct_text(turn.texts[source], lexicon, min_ratio)
        turns.append(Turn(turn.speaker, texts, turn.state))
    return Dialogue(dialogue.id, turns)


def _correct_with_adapter_lanes(
    texts: list[str], endpoint: AdapterEndpoint, lanes: int
) -> list[str]:
    """Partition texts across lanes, one adapter process per lane; failed
    items keep their input text. Results merge back by index."""
    lanes = max(1, min(lanes, len(texts)))
    outputs: list[str | None] = [None] * len(texts)
    chunk = (len(texts) + lanes - 1) // lanes
    lane_errors: list[BaseException] = []

    def run_lane(start: int) -> None:
        try:
            part = texts[start : start + chunk]
            with AdapterClient(endpoint) as client:
                got, failures = client.request(part, task="correct")
            for offset, value in enumerate(got):
                outputs[start + offset] = value
            for failure in failures:
                log.warning(
                    "adapter item %d failed (%s); keeping input text",
                    start + failure.index, failure.reason,
                )
        except BaseException as exc:
            lane_errors.append(exc)

    threads = [
        threading.Thread(target=run_lane, args=(start,))
        for start in range(0, len(texts), chunk)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if lane_errors:
        raise lane_errors[0]
    return [out if out is not None else text for out, text in zip(outputs, texts)]


def _apply_adapter_correction(
    dialogues: list[Dialogue],
    endpoint: AdapterEndpoint,
    source: str,
    target: str,
    lanes: int,
) -> list[Dialogue]:
    flat: list[str] = []
    for dialogue in dialogues:
        for i, turn in enumerate(dialogue.turns):
            if source not in turn.texts:
                raise DataError(
                    f"correct stage: dialogue {dialogue.id!r} turn {i} has no "
                    f"variant {source!r}"
                )
            if target in turn.texts:
                raise DataError(
                    f"correct stage: dialogue {dialogue.id!r} turn {i} already "
                    f"has variant {target!r}"
                )
            flat.append(turn.texts[source])
    corrected = _correct_with_adapter_lanes(flat, endpoint, lanes)
    out: list[Dialogue] = []
    cursor = 0
    for dialogue in dialogues:
        turns = []
        for turn in dialogue.turns:
            texts = dict(turn.texts)
            texts[target] = canonicalize(corrected[cursor])
            cursor += 1
            turns.append(Turn(turn.speaker, texts, turn.state))
        out.append(Dialogue(dialogue.id, turns))
    return out


def _gold_turns(dialogues: list[Dialogue]) -> list[tuple[str, int, DialogueState]]:
    out = []
    for dialogue in dialogues:
        for index, turn in enumerate(dialogue.user_turns()):
            out.append((dialogue.id, index, dict(turn.state or {})))
    return out


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    validate_config(config)
    schema = corpus_mod.load_schema(config.schema_path)
    dialogues = corpus_mod.load_corpus(config.corpus_path, schema)
    workers = config.workers if config.workers > 0 else (os.cpu_count() or 1)

    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[Path] = []

    def emit_corpus(stage: str) -> None:
        path = out_dir / ARTIFACTS[stage]
        corpus_mod.write_corpus(dialogues, path)
        artifacts.append(path)

    violations: list[str] = []
    for dialogue in dialogues:
        violations.extend(corpus_mod.cumulative_violations(dialogue))
    for violation in violations:
        log.warning("cumulative state check: %s", violation)
    emit_corpus("ingest")

    if "augment" in config.stages:
        pool = postproc.load_noun_db(config.noun_db_path, schema)
        dialogues = augment_mod.augment_corpus(
            dialogues, schema, pool, config.augment_factor, config.seed, workers
        )
        emit_corpus("augment")

    if "noise" in config.stages:
        noise_config = load_noise_config(config.noise_config_path)
        dialogues = corrupt_corpus(
            dialogues, noise_config, config.noise_target_variant, workers
        )
        emit_corpus("noise")

    if "correct" in config.stages:
        if config.use_adapter:
            endpoint = AdapterEndpoint(config.adapter_command, config.adapter_timeout)
            dialogues = _apply_adapter_correction(
                dialogues,
                endpoint,
                config.correct_source_variant,
                config.correct_target_variant,
                lanes=workers,
            )
        else:
            if config.lexicon_path is not None:
                lexicon = correction.load_lexicon(config.lexicon_path)
            else:
                lexicon = correction.lexicon_from_corpus(dialogues, schema)
            fn = partial(
                _correct_dialogue_rules,
                lexicon=lexicon,
                source=config.correct_source_variant,
                target=config.correct_target_variant,
                min_ratio=config.correct_min_ratio,
            )
            dialogues = pmap(fn, dialogues, workers)
        emit_corpus("correct")

    records: list[dict] = []
    if "prompts" in config.stages:
        records = d3st.build_examples(
            dialogues,
            schema,
            variant=config.score_variant,
            target_order_seed=config.seed if config.prompts_order_targets else None,
            shuffle_slots_seed=config.seed if config.prompts_shuffle_slots else None,
        )
        path = out_dir / ARTIFACTS["prompts"]
        _write_jsonl(records, path)
        artifacts.append(path)

    predictions: list[dict] = []
    if "decode" in config.stages:
        if config.decode_source == "gold":
            outputs = {
                (r["dialogue_id"], r["turn_index"]): r["target_text"] for r in records
            }
        else:
            outputs = {}
            for r in d3st.read_jsonl(config.decode_outputs_path):
                outputs[(r["dialogue_id"], r["turn_index"])] = r["output_text"]
        for record in records:
            key = (record["dialogue_id"], record["turn_index"])
            if key not in outputs:
                raise DataError(
                    f"decode stage: no model output for dialogue "
                    f"{key[0]!r} user turn {key[1]}"
                )
            prompt = d3st.prompt_from_record(record)
            state, issues = d3st.parse_state_string(outputs[key], prompt, schema)
            predictions.append(
                {
                    "dialogue_id": key[0],
                    "turn_index": key[1],
                    "state": state,
                    "issues": [
                        {"kind": issue.kind, "fragment": issue.fragment}
                        for issue in issues
                    ],
                }
            )
        path = out_dir / ARTIFACTS["decode"]
        _write_jsonl(predictions, path)
        artifacts.append(path)

    if "postprocess" in config.stages:
        db = postproc.load_noun_db(config.noun_db_path, schema)
        recoveries: list[dict] = []
        rewritten: list[dict] = []
        for record in predictions:
            state, recs = postproc.postprocess_state(
                record["state"], db, schema, config.postproc_min_ratio
            )
            rewritten.append({**record, "state": state})
            for r in recs:
                recoveries.append(
                    {
                        "dialogue_id": record["dialogue_id"],
                        "turn_index": record["turn_index"],
                        "slot": r.slot,
                        "before": r.before,
                        "after": r.after,
                        "ratio": r.ratio,
                    }
                )
        predictions = rewritten
        path = out_dir / ARTIFACTS["postprocess"]
        _write_jsonl(predictions, path)
        artifacts.append(path)
        path = out_dir / ARTIFACTS["recoveries"]
        _write_jsonl(recoveries, path)
        artifacts.append(path)

    report: metrics.EvalReport | None = None
    if "eval" in config.stages:
        golds = _gold_turns(dialogues)
        if "decode" in config.stages:
            by_key = {(p["dialogue_id"], p["turn_index"]): p["state"] for p in predictions}
            preds = []
            for did, index, _gold in golds:
                if (did, index) not in by_key:
                    raise DataError(
                        f"eval stage: no prediction for dialogue {did!r} "
                        f"user turn {index}"
                    )
                preds.append(by_key[(did, index)])
        else:
            preds = [dict(gold) for _, _, gold in golds]  # gold-as-pred smoke mode
        report = metrics.evaluate(preds, [gold for _, _, gold in golds])
        json_path, text_path = metrics.write_report(report, out_dir)
        artifacts.extend([json_path, text_path])

    return PipelineResult(
        report=report,
        artifacts=tuple(artifacts),
        cumulative_violations=tuple(violations),
    )
