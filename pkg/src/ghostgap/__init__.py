"""Finite-instance laboratory for one-sided ghost-gap bad events and VC symmetrization."""

from .concepts import (
    ParamClass,
    Target,
    bad_event_contains,
    empirical_error,
    ghost_gap,
    interval_class,
    sup_gap,
    table_class,
    threshold_class,
    witness_contains,
)
from .measure import DomainPoint, FiniteDomain, FiniteMeasure, Sample, SamplePair, enumerate_pairs, sample_iid

__version__ = "0.1.0"

__all__ = [
    "DomainPoint",
    "FiniteDomain",
    "FiniteMeasure",
    "ParamClass",
    "Sample",
    "SamplePair",
    "Target",
    "bad_event_contains",
    "empirical_error",
    "enumerate_pairs",
    "ghost_gap",
    "interval_class",
    "sample_iid",
    "sup_gap",
    "table_class",
    "threshold_class",
    "witness_contains",
]
