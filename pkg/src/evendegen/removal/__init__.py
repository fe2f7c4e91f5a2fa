"""Randomized removal procedures and the recursive certifier."""

from .certifier import CertifierParams, CertifierTrail, recursive_even_degenerate
from .double import DEFAULT_S_FACTOR, DoubleRemovalPlan, SideSets, double_removal, make_double_plan
from .layering import LayeringReport, analyze_transcript_layering
from .uw import (RemovalConfig, RemovalOutcome, RemovalTranscript, RoundRecord, make_uw_config,
                 uw_removal, verify_outcome)

__all__ = [
    "DEFAULT_S_FACTOR", "CertifierParams", "CertifierTrail", "DoubleRemovalPlan", "LayeringReport", "RemovalConfig",
    "RemovalOutcome", "RemovalTranscript", "RoundRecord", "SideSets", "analyze_transcript_layering",
    "double_removal", "make_double_plan", "make_uw_config", "recursive_even_degenerate",
    "uw_removal", "verify_outcome",
]
