"""Literature search, reading and review pipeline."""

from ._core import (
    LitpipeError,
    Service,
    build_table,
    chunk_text,
    export_table,
    extractive_answer,
    format_apa,
    format_apa_intext,
    hash_embed,
    normalize_doi,
    run_pipeline,
    segment_sections,
)

__all__ = [
    "LitpipeError",
    "Service",
    "build_table",
    "chunk_text",
    "export_table",
    "extractive_answer",
    "format_apa",
    "format_apa_intext",
    "hash_embed",
    "normalize_doi",
    "run_pipeline",
    "segment_sections",
]
