"""Consequence-aware scoring of ATC language understanding (C++ core)."""

from ._atceval import (
    ConfigError,
    Error,
    IoError,
    ValidationError,
    compare,
    config_hash,
    default_config,
    evaluate,
    evaluate_text,
    format_report,
    generate_corpus,
    parse,
    parse_model_output,
    parse_transcript,
    perturb,
    score_utterance,
    sweep,
    validate,
)

__all__ = [
    "ConfigError",
    "Error",
    "IoError",
    "ValidationError",
    "compare",
    "config_hash",
    "default_config",
    "evaluate",
    "evaluate_text",
    "format_report",
    "generate_corpus",
    "parse",
    "parse_model_output",
    "parse_transcript",
    "perturb",
    "score_utterance",
    "sweep",
    "validate",
]
