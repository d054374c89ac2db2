"""Reconstruct data-science pipelines from scripts and notebooks by mining
API calls, and lint them for common structural anti-patterns."""

from .taxonomy import Layer, Stage, is_feedback_edge, stage_from_code
from .frontend import CallEvent, SourceUnit, ast_metrics, extract_calls, extract_headings, load_source
from .dictionary import ApiDictionary, DictEntry, Match, load_dictionary, lookup, seed_dictionary
from .pipeline import Level, Pipeline, StageOccurrence, build_high_level, build_low_level, classify_heading
from .agreement import AgreementReport, cohens_kappa

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "ApiDictionary",
    "CallEvent",
    "DictEntry",
    "Layer",
    "Level",
    "Match",
    "Pipeline",
    "SourceUnit",
    "Stage",
    "StageOccurrence",
    "ast_metrics",
    "build_high_level",
    "build_low_level",
    "classify_heading",
    "cohens_kappa",
    "extract_calls",
    "extract_headings",
    "is_feedback_edge",
    "load_dictionary",
    "load_source",
    "lookup",
    "seed_dictionary",
    "stage_from_code",
]
