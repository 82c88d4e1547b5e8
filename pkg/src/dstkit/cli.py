"""Command line: each pipeline stage runs standalone on files, plus a
config-driven `pipeline` command chaining them.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 adapter
error. DSTKIT_SEED, DSTKIT_WORKERS, DSTKIT_VARIANT, and DSTKIT_OUT
override the matching flags when the flag is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from . import augment as augment_mod
from . import corpus as corpus_mod
from . import correction, d3st, metrics, postproc
from .adapter import AdapterEndpoint
from .config import ENV_PREFIX, apply_overrides, load_pipeline_config
from .errors import AdapterError, ConfigError, DataError
from .noise import corrupt_corpus, load_noise_config
from .pipeline import _apply_adapter_correction, _correct_dialogue_rules, run_pipeline


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2; usage errors are 1
        raise ConfigError(message)


def _env_default(name: str, cast=str, fallback=None):
    value = os.environ.get(ENV_PREFIX + name)
    if value is None:
        return fallback
    try:
        return cast(value)
    except ValueError:
        raise ConfigError(f"bad {ENV_PREFIX}{name}: {value!r}") from None


def _load_inputs(args) -> tuple[corpus_mod.Schema, list[corpus_mod.Dialogue]]:
    schema = corpus_mod.load_schema(_existing(args.schema, "schema"))
    dialogues = corpus_mod.load_corpus(_existing(args.corpus, "corpus"), schema)
    return schema, dialogues


def _existing(path: str, label: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{label} file not found: {p}")
    return p


def _cmd_ingest(args) -> int:
    schema, dialogues = _load_inputs(args)
    violations = [
        v for d in dialogues for v in corpus_mod.cumulative_violations(d)
    ]
    for violation in violations:
        print(f"warning: {violation}", file=sys.stderr)
    turns = sum(len(d.turns) for d in dialogues)
    users = sum(len(d.user_turns()) for d in dialogues)
    print(f"dialogues={len(dialogues)} turns={turns} user_turns={users} "
          f"slots={len(schema)} cumulative_violations={len(violations)}")
    if args.out:
        corpus_mod.write_corpus(dialogues, args.out)
    if violations and args.strict_cumulative:
        raise DataError(f"{len(violations)} cumulative state violations")
    return 0


def _cmd_augment(args) -> int:
    schema, dialogues = _load_inputs(args)
    pool = postproc.load_noun_db(_existing(args.pool, "value pool"), schema)
    out = augment_mod.augment_corpus(
        dialogues, schema, pool, args.factor, args.seed, args.workers
    )
    corpus_mod.write_corpus(out, args.out)
    print(f"dialogues={len(out)} (factor {args.factor})")
    return 0


def _cmd_noise(args) -> int:
    schema, dialogues = _load_inputs(args)
    config = load_noise_config(_existing(args.noise_config, "noise config"))
    out = corrupt_corpus(dialogues, config, args.target_variant, args.workers)
    corpus_mod.write_corpus(out, args.out)
    print(f"dialogues={len(out)} variant={args.target_variant}")
    return 0


def _cmd_correct(args) -> int:
    schema, dialogues = _load_inputs(args)
    if args.adapter:
        endpoint = AdapterEndpoint(tuple(args.adapter.split()), args.adapter_timeout)
        out = _apply_adapter_correction(
            dialogues, endpoint, args.source_variant, args.target_variant,
            lanes=args.workers,
        )
    else:
        if args.lexicon:
            lexicon = correction.load_lexicon(_existing(args.lexicon, "lexicon"))
        else:
            lexicon = correction.lexicon_from_corpus(dialogues, schema)
        out = [
            _correct_dialogue_rules(
                d, lexicon, args.source_variant, args.target_variant, args.min_ratio
            )
            for d in dialogues
        ]
    corpus_mod.write_corpus(out, args.out)
    print(f"dialogues={len(out)} variant={args.target_variant}")
    return 0


def _cmd_prompts(args) -> int:
    schema, dialogues = _load_inputs(args)
    records = d3st.build_examples(
        dialogues,
        schema,
        variant=args.variant,
        target_order_seed=args.target_order_seed,
        shuffle_slots_seed=args.shuffle_slots_seed,
    )
    d3st.write_examples(records, args.out)
    print(f"examples={len(records)} variant={args.variant}")
    return 0


def _cmd_decode(args) -> int:
    schema = corpus_mod.load_schema(_existing(args.schema, "schema"))
    prompts = d3st.read_jsonl(_existing(args.prompts, "prompts"))
    outputs = {
        (r["dialogue_id"], r["turn_index"]): r["output_text"]
        for r in d3st.read_jsonl(_existing(args.outputs, "model outputs"))
    }
    predictions = []
    for record in prompts:
        key = (record["dialogue_id"], record["turn_index"])
        if key not in outputs:
            raise DataError(f"no model output for {key[0]!r} user turn {key[1]}")
        prompt = d3st.prompt_from_record(record)
        state, issues = d3st.parse_state_string(outputs[key], prompt, schema)
        predictions.append({
            "dialogue_id": key[0],
            "turn_index": key[1],
            "state": state,
            "issues": [{"kind": i.kind, "fragment": i.fragment} for i in issues],
        })
    d3st.write_examples(predictions, args.out)
    issue_count = sum(len(p["issues"]) for p in predictions)
    print(f"predictions={len(predictions)} parse_issues={issue_count}")
    return 0


def _cmd_postprocess(args) -> int:
    schema = corpus_mod.load_schema(_existing(args.schema, "schema"))
    db = postproc.load_noun_db(_existing(args.noun_db, "noun DB"), schema)
    predictions = d3st.read_jsonl(_existing(args.predictions, "predictions"))
    recovered = 0
    out = []
    for record in predictions:
        state, recs = postproc.postprocess_state(
            record["state"], db, schema, args.min_ratio
        )
        recovered += len(recs)
        out.append({**record, "state": state})
    d3st.write_examples(out, args.out)
    print(f"predictions={len(out)} recoveries={recovered}")
    return 0


def _cmd_eval(args) -> int:
    schema, dialogues = _load_inputs(args)
    golds = []
    keys = []
    for dialogue in dialogues:
        for index, turn in enumerate(dialogue.user_turns()):
            keys.append((dialogue.id, index))
            golds.append(dict(turn.state or {}))
    if args.gold_as_pred:
        preds = [dict(g) for g in golds]
    else:
        if not args.predictions:
            raise ConfigError("eval needs --predictions or --gold-as-pred")
        by_key = {
            (r["dialogue_id"], r["turn_index"]): r["state"]
            for r in d3st.read_jsonl(_existing(args.predictions, "predictions"))
        }
        missing = [k for k in keys if k not in by_key]
        if missing:
            raise DataError(f"no prediction for {missing[0][0]!r} turn {missing[0][1]}")
        preds = [by_key[k] for k in keys]
    report = metrics.evaluate(preds, golds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics.write_report(report, out_dir)
    print(metrics.render_report_text(report), end="")
    return 0


def _cmd_pipeline(args) -> int:
    config = load_pipeline_config(_existing(args.config, "config"))
    config = apply_overrides(
        config,
        seed=args.seed,
        workers=args.workers,
        variant=args.variant,
        out_dir=args.out,
    )
    result = run_pipeline(config)
    for violation in result.cumulative_violations:
        print(f"warning: {violation}", file=sys.stderr)
    for artifact in result.artifacts:
        print(f"wrote {artifact}")
    if result.report is not None:
        print(f"jga={result.report.jga:.4f} ser={result.report.ser:.4f} "
              f"f1={result.report.slot_f1:.4f} turns={result.report.turns}")
    return 0


def _add_common_io(p: _Parser, out_required: bool = True) -> None:
    p.add_argument("--schema", required=True, help="schema file")
    p.add_argument("--corpus", required=True, help="corpus file")
    if out_required:
        p.add_argument("--out", required=True, help="output file")


def build_parser() -> _Parser:
    parser = _Parser(prog="dstkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dstkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    workers_default = _env_default("WORKERS", int, os.cpu_count() or 1)
    seed_default = _env_default("SEED", int, 0)
    variant_default = _env_default("VARIANT", str, "transcript")

    p = sub.add_parser("ingest", help="validate a corpus and emit canonical form")
    _add_common_io(p, out_required=False)
    p.add_argument("--out", help="write canonical corpus here")
    p.add_argument("--strict-cumulative", action="store_true",
                   help="fail on cumulative state violations")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("augment", help="multiply a corpus by value substitution")
    _add_common_io(p)
    p.add_argument("--pool", required=True, help="value pool TSV (noun DB format)")
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--workers", type=int, default=workers_default)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("noise", help="add a corrupted variant to every turn")
    _add_common_io(p)
    p.add_argument("--noise-config", required=True)
    p.add_argument("--target-variant", default="asr")
    p.add_argument("--workers", type=int, default=workers_default)
    p.set_defaults(func=_cmd_noise)

    p = sub.add_parser("correct", help="add a corrected variant to every turn")
    _add_common_io(p)
    p.add_argument("--source-variant", default="asr")
    p.add_argument("--target-variant", default="corrected")
    p.add_argument("--lexicon", help="lexicon file (default: harvest from corpus)")
    p.add_argument("--min-ratio", type=float, default=0.8)
    p.add_argument("--adapter", help="external corrector command line")
    p.add_argument("--adapter-timeout", type=float, default=30.0)
    p.add_argument("--workers", type=int, default=workers_default)
    p.set_defaults(func=_cmd_correct)

    p = sub.add_parser("prompts", help="export one prompt/target record per user turn")
    _add_common_io(p)
    p.add_argument("--variant", default=variant_default)
    p.add_argument("--target-order-seed", type=int)
    p.add_argument("--shuffle-slots-seed", type=int)
    p.set_defaults(func=_cmd_prompts)

    p = sub.add_parser("decode", help="parse model output strings into states")
    p.add_argument("--schema", required=True)
    p.add_argument("--prompts", required=True, help="prompt records (JSONL)")
    p.add_argument("--outputs", required=True, help="model outputs (JSONL)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("postprocess", help="recover noun values in predictions")
    p.add_argument("--schema", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--noun-db", required=True)
    p.add_argument("--min-ratio", type=float, default=0.8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_postprocess)

    p = sub.add_parser("eval", help="score predictions against gold states")
    p.add_argument("--schema", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--predictions")
    p.add_argument("--gold-as-pred", action="store_true")
    p.add_argument("--out", default=_env_default("OUT", str, "out"))
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("pipeline", help="run configured stages end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--variant")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
