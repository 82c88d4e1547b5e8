"""Toolkit for dialogue state tracking over noisy spoken input.

Building blocks: a dialogue corpus model, a deterministic ASR-noise
channel, rule/lexicon error correction with an external-adapter hook,
indexed-description prompt serialization with index-picking for
categorical slots, Levenshtein-ratio proper-noun recovery, slot-value
substitution augmentation, and DST evaluation (joint goal accuracy, slot
precision/recall/F1, slot error rate, per-slot breakdowns).
"""

__version__ = "0.1.0"

from .adapter import AdapterClient, AdapterEndpoint, AdapterFailure
from .augment import augment_corpus, augment_dialogue, check_augmented
from .corpus import (
    AlignedWord,
    Dialogue,
    DialogueState,
    Schema,
    SlotDef,
    Turn,
    cumulative_violations,
    load_corpus,
    load_schema,
    parse_time_alignment,
    render_time_alignment,
    state_at_turn,
    write_corpus,
    write_schema,
)
from .correction import (
    CorrectionReport,
    Lexicon,
    build_lexicon,
    correct_text,
    correct_with_adapter,
    lexicon_correct,
    normalize_format,
    sentence_error_rate,
)
from .d3st import (
    ParseIssue,
    PromptExample,
    build_examples,
    build_prompt,
    build_target,
    parse_state_string,
)
from .errors import AdapterError, ConfigError, DataError, DstkitError
from .metrics import (
    EvalReport,
    error_cause_breakdown,
    evaluate,
    joint_goal_accuracy,
    per_slot_error_rates,
    slot_metrics,
)
from .noise import NoiseConfig, corrupt_corpus, corrupt_utterance
from .postproc import (
    NounDatabase,
    Recovery,
    levenshtein_distance,
    load_noun_db,
    postprocess_state,
    recover_value,
    similarity_ratio,
)
