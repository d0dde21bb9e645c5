"""Divergence analytics for paired human/LLM recipe corpora."""

__version__ = "0.1.0"

from .config import Config
from .corpus import (Corpus, Country, CountryLexicon, Dish, KnowledgeSpace,
                     Recipe, Region, Source, Stage, TokenStream,
                     knowledge_space, load_corpus, preprocess,
                     serialize_corpus)
from .distrib import (Direction, PpmiMatrix, PpmiRowDistribution,
                      TokenDistribution, estimate_distribution, jsd,
                      jsd_contributions, ppmi_matrix, ppmi_row_distribution)
from .novelty import (MetricRecord, Thresholds, difference,
                      divergent_surprise, loo_thresholds, new_surprise,
                      newness, score_variation, uniqueness)

__all__ = [
    "Config", "Corpus", "Country", "CountryLexicon", "Dish", "KnowledgeSpace",
    "Recipe", "Region", "Source", "Stage", "TokenStream", "knowledge_space",
    "load_corpus", "preprocess", "serialize_corpus", "Direction", "PpmiMatrix",
    "PpmiRowDistribution", "TokenDistribution", "estimate_distribution", "jsd",
    "jsd_contributions", "ppmi_matrix", "ppmi_row_distribution", "MetricRecord",
    "Thresholds", "difference", "divergent_surprise", "loo_thresholds",
    "new_surprise", "newness", "score_variation", "uniqueness",
]
