"""Minimum-error-rate tuning of N-best feature weights.

The pipeline: parse N-best lists and references into a
:class:`~rotamert.corpus.TuningCorpus`, reduce hypotheses to additive
BLEU statistics, minimize corpus error with coordinate descent whose
inner step is an exact line search over the piecewise-constant error
surface, and optionally search a grid of rotated first axes, keeping
the rotation with the best tuning-set score.
"""

from .bleu import (
    BleuStats,
    ErrorValue,
    aggregate,
    corpus_bleu,
    hypothesis_stats,
    selection_error,
    sentence_bleu_stats,
)
from .corpus import (
    Hypothesis,
    SentenceEntry,
    TuningCorpus,
    build_corpus,
    format_nbest,
    format_references,
    nbest_map,
    parse_nbest,
    parse_references,
    reference_map,
    remap_sparse_ids,
)
from .descent import (
    KcdConfig,
    KcdTrace,
    StepRecord,
    kcd_optimize,
    select_hypotheses,
    uniform_weights,
)
from .envelope import (
    IntervalSweep,
    LineSearchResult,
    ScoreLine,
    SentenceEnvelope,
    line_search,
    project_lines,
    sweep_intervals,
    upper_envelope,
)
from .rotation import (
    AlphaGrid,
    CoordinateSystem,
    Rotation,
    RssRecord,
    RssResult,
    apply_rotation,
    identity_system,
    report_tsv,
    rss_optimize,
)
from .synthetic import (
    SynthSpec,
    adversarial_certificate,
    adversarial_instance,
    generate,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "BleuStats",
    "CoordinateSystem",
    "ErrorValue",
    "Hypothesis",
    "IntervalSweep",
    "KcdConfig",
    "KcdTrace",
    "LineSearchResult",
    "Rotation",
    "RssRecord",
    "RssResult",
    "ScoreLine",
    "SentenceEntry",
    "SentenceEnvelope",
    "StepRecord",
    "SynthSpec",
    "TuningCorpus",
    "adversarial_certificate",
    "adversarial_instance",
    "aggregate",
    "apply_rotation",
    "build_corpus",
    "corpus_bleu",
    "format_nbest",
    "format_references",
    "generate",
    "hypothesis_stats",
    "identity_system",
    "kcd_optimize",
    "line_search",
    "nbest_map",
    "parse_nbest",
    "parse_references",
    "project_lines",
    "reference_map",
    "remap_sparse_ids",
    "report_tsv",
    "rss_optimize",
    "select_hypotheses",
    "selection_error",
    "sentence_bleu_stats",
    "sweep_intervals",
    "uniform_weights",
    "upper_envelope",
]
