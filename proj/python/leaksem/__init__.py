"""Hybrid taint analysis and URL classification over AML app models."""

from ._core import (
    analyze_file,
    analyze_source,
    classify_url,
    graph_dot,
    run_corpus,
    tokenize_url,
    train_and_eval,
)

__all__ = [
    "analyze_file",
    "analyze_source",
    "classify_url",
    "graph_dot",
    "run_corpus",
    "tokenize_url",
    "train_and_eval",
]
