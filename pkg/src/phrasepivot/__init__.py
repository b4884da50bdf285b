"""Phrase-table triangulation, pruning, and lexicon augmentation for pivot-based SMT."""

from .analysis import (
    OovReport,
    SizeReport,
    oov_report,
    percentage_one_decimal,
    size_report,
    size_report_from_counts,
)
from .errors import ConfigError, ParseError, PhrasePivotError, ValidationError
from .lexicon_pivot import (
    E_MINUS_10,
    AugmentReport,
    LexStrategy,
    PivotLexicon,
    PivotLexiconPair,
    augment_table,
    lexicon_to_entries,
    parse_pivot_lexicon,
    pivot_lexicon,
    prune_lexicon_topn,
    write_pivot_lexicon,
)
from .pruning import (
    DEFAULT_FEATURE_FLOOR,
    PruneParams,
    PruneReport,
    prune_modified,
    prune_source_topn,
    prune_target_topm,
    score_entry,
)
from .table_model import (
    DEFAULT_WEIGHTS,
    EMPTY_ALIGNMENT,
    NULL_WORD,
    Alignment,
    Direction,
    FeatureVector,
    LexiconEntry,
    LexiconTable,
    Phrase,
    PhraseEntry,
    PhraseTable,
    WeightConfig,
    format_real,
    parse_lexicon_table,
    parse_phrase_table,
    parse_weight_config,
    write_lexicon_table,
    write_phrase_table,
)
from .triangulation import (
    InducedWordCounts,
    TriangulatedPair,
    TriangulationReport,
    accumulate_word_counts,
    compose_alignment,
    conditional_prob_fn,
    lexical_weight,
    parse_word_counts,
    triangulate,
    triangulate_probs,
    word_prob,
    write_word_counts,
)

__version__ = "0.1.0"
