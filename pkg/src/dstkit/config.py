"""Pipeline configuration: one INI-style file, env and flag overrides.

Relative paths are resolved against the config file's directory. Override
precedence is CLI flag > DSTKIT_* environment variable > config file >
default. All referenced input files are checked up front so a bad config
fails before any output is written.
"""

from __future__ import annotations

import configparser
import os
import shlex
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError

CANONICAL_STAGES = (
    "ingest",
    "augment",
    "noise",
    "correct",
    "prompts",
    "decode",
    "postprocess",
    "eval",
)

ENV_PREFIX = "DSTKIT_"


@dataclass(frozen=True)
class PipelineConfig:
    schema_path: Path
    corpus_path: Path
    out_dir: Path
    stages: tuple[str, ...]
    seed: int = 0
    workers: int = 0  # 0 means one per CPU
    score_variant: str = "transcript"
    noun_db_path: Path | None = None
    lexicon_path: Path | None = None
    augment_factor: int = 1
    noise_config_path: Path | None = None
    noise_target_variant: str = "asr"
    correct_source_variant: str = "asr"
    correct_target_variant: str = "corrected"
    correct_min_ratio: float = 0.8
    use_adapter: bool = False
    adapter_command: tuple[str, ...] = ()
    adapter_timeout: float = 30.0
    prompts_order_targets: bool = False
    prompts_shuffle_slots: bool = False
    decode_source: str = "file"  # file | gold
    decode_outputs_path: Path | None = None
    postproc_min_ratio: float = 0.8


def _validate_stages(stages: tuple[str, ...]) -> None:
    unknown = [s for s in stages if s not in CANONICAL_STAGES]
    if unknown:
        raise ConfigError(f"unknown stage(s): {', '.join(unknown)}")
    if len(set(stages)) != len(stages):
        raise ConfigError("a stage is listed twice")
    order = [CANONICAL_STAGES.index(s) for s in stages]
    if order != sorted(order):
        raise ConfigError(
            "stages must follow the canonical order: " + " ".join(CANONICAL_STAGES)
        )
    if not stages or stages[0] != "ingest":
        raise ConfigError("the stage list must start with 'ingest'")
    if "decode" in stages and "prompts" not in stages:
        raise ConfigError("'decode' requires the 'prompts' stage")
    if "postprocess" in stages and "decode" not in stages:
        raise ConfigError("'postprocess' requires the 'decode' stage")


def validate_config(config: PipelineConfig) -> PipelineConfig:
    _validate_stages(config.stages)
    required: list[tuple[str, Path | None]] = [
        ("schema", config.schema_path),
        ("corpus", config.corpus_path),
    ]
    if "augment" in config.stages or "postprocess" in config.stages:
        required.append(("noun_db", config.noun_db_path))
    if "noise" in config.stages:
        required.append(("noise config", config.noise_config_path))
    if "correct" in config.stages and config.lexicon_path is not None:
        required.append(("lexicon", config.lexicon_path))
    if (
        "decode" in config.stages
        and config.decode_source == "file"
    ):
        required.append(("decode outputs", config.decode_outputs_path))
    for label, path in required:
        if path is None:
            raise ConfigError(f"config does not name a {label} file")
        if not path.is_file():
            raise ConfigError(f"{label} file not found: {path}")
    if config.decode_source not in ("file", "gold"):
        raise ConfigError(f"decode source must be file or gold, got {config.decode_source!r}")
    if "correct" in config.stages and config.use_adapter and not config.adapter_command:
        raise ConfigError("use_adapter is on but no adapter command is configured")
    return config


def _get(parser: configparser.ConfigParser, section: str, key: str) -> str | None:
    if parser.has_option(section, key):
        value = parser.get(section, key).strip()
        return value or None
    return None


def _as_int(value: str, label: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{label} must be an integer, got {value!r}") from None


def _as_float(value: str, label: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{label} must be a number, got {value!r}") from None


def _as_bool(value: str, label: str) -> bool:
    low = value.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{label} must be a boolean, got {value!r}")


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    base = path.parent

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    schema = resolve(_get(parser, "paths", "schema"))
    corpus = resolve(_get(parser, "paths", "corpus"))
    if schema is None or corpus is None:
        raise ConfigError(f"{path}: [paths] must name schema and corpus")
    out_dir = resolve(_get(parser, "paths", "out_dir")) or (base / "out")

    stages_raw = _get(parser, "pipeline", "stages") or " ".join(CANONICAL_STAGES)
    stages = tuple(stages_raw.replace(",", " ").split())

    config = PipelineConfig(
        schema_path=schema,
        corpus_path=corpus,
        out_dir=out_dir,
        stages=stages,
        noun_db_path=resolve(_get(parser, "paths", "noun_db")),
        lexicon_path=resolve(_get(parser, "paths", "lexicon")),
    )
    if (v := _get(parser, "pipeline", "seed")) is not None:
        config = replace(config, seed=_as_int(v, "seed"))
    if (v := _get(parser, "pipeline", "workers")) is not None:
        config = replace(config, workers=_as_int(v, "workers"))
    if (v := _get(parser, "pipeline", "variant")) is not None:
        config = replace(config, score_variant=v)
    if (v := _get(parser, "augment", "factor")) is not None:
        config = replace(config, augment_factor=_as_int(v, "augment factor"))
    if (v := _get(parser, "noise", "config")) is not None:
        config = replace(config, noise_config_path=resolve(v))
    if (v := _get(parser, "noise", "target_variant")) is not None:
        config = replace(config, noise_target_variant=v)
    if (v := _get(parser, "correct", "source")) is not None:
        config = replace(config, correct_source_variant=v)
    if (v := _get(parser, "correct", "target")) is not None:
        config = replace(config, correct_target_variant=v)
    if (v := _get(parser, "correct", "min_ratio")) is not None:
        config = replace(config, correct_min_ratio=_as_float(v, "correct min_ratio"))
    if (v := _get(parser, "correct", "use_adapter")) is not None:
        config = replace(config, use_adapter=_as_bool(v, "use_adapter"))
    if (v := _get(parser, "adapter", "command")) is not None:
        config = replace(config, adapter_command=tuple(shlex.split(v)))
    if (v := _get(parser, "adapter", "timeout")) is not None:
        config = replace(config, adapter_timeout=_as_float(v, "adapter timeout"))
    if (v := _get(parser, "prompts", "order_targets")) is not None:
        config = replace(config, prompts_order_targets=_as_bool(v, "order_targets"))
    if (v := _get(parser, "prompts", "shuffle_slots")) is not None:
        config = replace(config, prompts_shuffle_slots=_as_bool(v, "shuffle_slots"))
    if (v := _get(parser, "decode", "source")) is not None:
        config = replace(config, decode_source=v)
    if (v := _get(parser, "decode", "outputs")) is not None:
        config = replace(config, decode_outputs_path=resolve(v))
    if (v := _get(parser, "postproc", "min_ratio")) is not None:
        config = replace(config, postproc_min_ratio=_as_float(v, "postproc min_ratio"))
    return config


def apply_overrides(
    config: PipelineConfig,
    seed: int | None = None,
    workers: int | None = None,
    variant: str | None = None,
    out_dir: str | Path | None = None,
) -> PipelineConfig:
    """Apply flag-level overrides after folding in DSTKIT_* env vars."""
    env = os.environ
    if seed is None and (v := env.get(ENV_PREFIX + "SEED")):
        seed = _as_int(v, ENV_PREFIX + "SEED")
    if workers is None and (v := env.get(ENV_PREFIX + "WORKERS")):
        workers = _as_int(v, ENV_PREFIX + "WORKERS")
    if variant is None and (v := env.get(ENV_PREFIX + "VARIANT")):
        variant = v
    if out_dir is None and (v := env.get(ENV_PREFIX + "OUT")):
        out_dir = v
    if seed is not None:
        config = replace(config, seed=seed)
    if workers is not None:
        config = replace(config, workers=workers)
    if variant is not None:
        config = replace(config, score_variant=variant)
    if out_dir is not None:
        config = replace(config, out_dir=Path(out_dir))
    return config
