"""Corpus preparation and evaluation toolkit for back-translated MT data.

Quality-score binning and tagging, translate-vs-transliterate labeling,
topk filtering and mixing, deterministic corpus assembly with manifests,
and the matching evaluation statistics. Translation models themselves
are external: they enter as files (embeddings, scores, round trips,
hypotheses) or as opaque commands in the round-based pipeline.
"""

__version__ = "0.1.0"

from .assemble import (
    AssemblyConfig,
    BinningConfig,
    ScoringConfig,
    TranslitConfig,
    assemble_training_set,
    mix_sample,
    topk_filter,
)
from .binning import Binning, apply_boundaries, equal_volume, equal_width, random_bins
from .corpus import Corpus, Origin, SentencePair, char_trigrams, read_pairs, tokenize_words, write_pairs
from .errors import BtprepError
from .evaluation import (
    BleuScore,
    F1Report,
    HumanScoreSummary,
    SignificanceReport,
    SxsReport,
    bootstrap_significance,
    corpus_bleu,
    mean_ci,
    pearson,
    spearman,
    sxs_delta,
    word_level_translit_f1,
)
from .pipeline import GridSearchSpec, PipelineConfig, run_grid_search, run_iterative
from .quality import (
    ScoredPair,
    bot_jaccard,
    cosine_similarity,
    score_corpus_embeddings,
    score_corpus_external,
    score_corpus_roundtrip,
)
from .tags import (
    apply_bt_tag,
    apply_quality_tag,
    apply_translit_tag,
    strip_leading_tag,
)
from .translit import (
    RuleRomanizer,
    TableGenerator,
    classify_pair,
    corpus_translit_stats,
    romanize,
)

__all__ = [
    "AssemblyConfig",
    "Binning",
    "BinningConfig",
    "BleuScore",
    "BtprepError",
    "Corpus",
    "F1Report",
    "GridSearchSpec",
    "HumanScoreSummary",
    "Origin",
    "PipelineConfig",
    "RuleRomanizer",
    "ScoredPair",
    "ScoringConfig",
    "SentencePair",
    "SignificanceReport",
    "SxsReport",
    "TableGenerator",
    "TranslitConfig",
    "apply_boundaries",
    "apply_bt_tag",
    "apply_quality_tag",
    "apply_translit_tag",
    "assemble_training_set",
    "bootstrap_significance",
    "bot_jaccard",
    "char_trigrams",
    "classify_pair",
    "corpus_bleu",
    "corpus_translit_stats",
    "cosine_similarity",
    "equal_volume",
    "equal_width",
    "mean_ci",
    "mix_sample",
    "pearson",
    "random_bins",
    "read_pairs",
    "romanize",
    "run_grid_search",
    "run_iterative",
    "score_corpus_embeddings",
    "score_corpus_external",
    "score_corpus_roundtrip",
    "spearman",
    "strip_leading_tag",
    "sxs_delta",
    "tokenize_words",
    "topk_filter",
    "word_level_translit_f1",
    "write_pairs",
]
