"""Spatial corpus construction toolkit."""

from ._core import (
    Dataset,
    DatasetError,
    GeometryError,
    KbError,
    KnowledgeBase,
    QueryError,
    SamplerError,
    WktError,
    build_kb,
    distance,
    generate,
    inside,
    intersects,
    load_dataset,
    load_kb,
    overlap_ratio,
    parse_query,
    synthesize,
    validate_query,
)

__all__ = [
    "Dataset",
    "DatasetError",
    "GeometryError",
    "KbError",
    "KnowledgeBase",
    "QueryError",
    "SamplerError",
    "WktError",
    "build_kb",
    "distance",
    "generate",
    "inside",
    "intersects",
    "load_dataset",
    "load_kb",
    "overlap_ratio",
    "parse_query",
    "synthesize",
    "validate_query",
]
