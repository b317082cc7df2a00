# Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
"""Token-level graph attention for few-shot short-text classification."""

from ._tokengraph import (
    EmbeddingShard,
    FormatError,
    Manifest,
    ManifestEntry,
    NumericError,
    ShapeError,
    ValidationError,
    Vocab,
    accuracy,
    basic_tokenize,
    build_edges,
    check_consistency,
    edge_count,
    embed_dataset,
    fallback_embed,
    generate_synthetic,
    load_vocab,
    macro_f1,
    read_manifest,
    read_shard,
    run_experiment,
    tokenize,
    welch_t_test,
    wordpiece,
    write_manifest,
    write_shard,
)

__all__ = [name for name in dir() if not name.startswith("_")]
