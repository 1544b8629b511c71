"""Artificial languages over attribute-value meaning spaces.

Generate languages with controlled morphology, segment their messages
(branching-entropy and byte-pair encoding), and measure compositionality,
concatenativity, and fusion.
"""

from artlang.core import (
    AttrValConfig,
    ConfigError,
    Corpus,
    ENUMERATION_CAP,
    Meaning,
    Message,
    ParseError,
    PRESETS,
    SpaceSizeError,
    enumerate_meanings,
    preset,
    read_config,
    read_corpus,
    write_config,
    write_corpus,
)
from artlang.langgen import (
    CapacityError,
    KINDS,
    Language,
    LanguageSpec,
    build_language,
    generate_corpus,
    identity_corpus,
    parse_language_spec,
)
from artlang.metrics import (
    FusionScan,
    MetricReport,
    articulation_score,
    articulation_violations,
    bosdis,
    bosdis_ratio,
    bpelen,
    compare_means,
    f_topsim,
    full_report,
    hamming,
    haslen,
    levenshtein,
    mean_violation_rate,
    posdis,
    topsim,
    violation_rate,
)
from artlang.natural import (
    CoverageError,
    InflectionTable,
    Sublanguage,
    bundled_spanish_table,
    load_inflection_table,
    meaningfulness_rate,
    sample_sublanguages,
    write_alphabet,
)
from artlang.segment import (
    EntropyModel,
    MergeList,
    SegmentedCorpus,
    bpe_apply,
    bpe_segmenter,
    bpe_train,
    dump_merges,
    fit_entropy,
    has_segment,
    has_segmenter,
    load_merges,
    read_segmented,
    split_message,
    write_segmented,
)

__version__ = "0.1.0"

__all__ = [
    "AttrValConfig",
    "CapacityError",
    "ConfigError",
    "Corpus",
    "CoverageError",
    "ENUMERATION_CAP",
    "EntropyModel",
    "FusionScan",
    "InflectionTable",
    "KINDS",
    "Language",
    "LanguageSpec",
    "Meaning",
    "MergeList",
    "Message",
    "MetricReport",
    "ParseError",
    "PRESETS",
    "SegmentedCorpus",
    "SpaceSizeError",
    "Sublanguage",
    "articulation_score",
    "articulation_violations",
    "bosdis",
    "bosdis_ratio",
    "bpe_apply",
    "bpe_segmenter",
    "bpe_train",
    "bpelen",
    "build_language",
    "bundled_spanish_table",
    "compare_means",
    "dump_merges",
    "enumerate_meanings",
    "f_topsim",
    "fit_entropy",
    "full_report",
    "generate_corpus",
    "hamming",
    "has_segment",
    "has_segmenter",
    "haslen",
    "identity_corpus",
    "levenshtein",
    "load_inflection_table",
    "load_merges",
    "mean_violation_rate",
    "meaningfulness_rate",
    "parse_language_spec",
    "posdis",
    "preset",
    "read_config",
    "read_corpus",
    "read_segmented",
    "sample_sublanguages",
    "split_message",
    "topsim",
    "violation_rate",
    "write_alphabet",
    "write_config",
    "write_corpus",
    "write_segmented",
    "__version__",
]
