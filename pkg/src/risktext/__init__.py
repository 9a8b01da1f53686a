"""Text-clustering workbench for operational-risk loss descriptions.

The library follows one flow: clean descriptions into tokens, count them,
optionally reweight by inverse document frequency, pull synonym weight
across columns with word embeddings, project documents by truncated SVD,
cluster, and validate clusters against analyst tags.  Each stage is usable
on its own; :mod:`risktext.pipeline` wires them together behind a config
file, and :mod:`risktext.service` serves the result for interactive
tagging.
"""

from .cluster import (
    TRIMMED,
    ClusterResult,
    Method,
    MultiStartPolicy,
    Selection,
    dirichlet_multinomial,
    gmm_spherical,
    kmeans,
    lda_gibbs,
    mixtures_of_unigrams,
    spherical_kmeans,
    trimmed_kmeans,
)
from .corpus import (
    BASEL_EVENT_TYPES,
    CleanDocument,
    CleaningConfig,
    LossEvent,
    clean,
    load_corpus,
    load_lemma_map,
    load_stopwords,
)
from .errors import RiskTextError
from .lsa import Projection2D, SvdFactors, project_2d, project_docs, truncated_svd
from .pipeline import (
    MethodSpec,
    PipelineConfig,
    RunArtifact,
    run_pipeline,
    sensitivity_sweep,
)
from .semantic import (
    EmbeddingTable,
    WordSimilarityMatrix,
    build_similarity,
    load_embeddings,
    semantic_adjust,
)
from .validate import TagSet, ValidationReport, accuracy, load_tags, silhouette
from .vectorize import (
    DocTermMatrix,
    Vocabulary,
    Weighting,
    apply_idf,
    build_tf,
    cosine_similarity,
    idf,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
