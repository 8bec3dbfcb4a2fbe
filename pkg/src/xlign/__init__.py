"""Cross-lingual representation alignment toolkit for EN/HI/code-mixed corpora.

Core pieces: XEB1 embedding I/O, dot-product retrieval with length-percentile
or similarity-weighted negative sampling, CKA/SVCCA representation similarity,
linear-Gaussian uncertainty reduction, Rank-Inverse saliency aggregation, the
CLAS and Consistency composite scores, the trilingual alignment loss with its
analytic gradient, synthetic fixture generation, and a reproducible report
runner exposed through the ``xlign`` command line.
"""

__version__ = "0.1.0"

from .embedio import (
    FileFormatError,
    Language,
    LayerEmbeddings,
    Pooling,
    RetrievalConfig,
    SamplerKind,
    TripleIndex,
    load_triple_index,
    read_embeddings,
    write_embeddings,
    write_triple_index,
)
from .retrieval import (
    Direction,
    RetrievalOutcome,
    directional_accuracy,
    layer_curve,
    sample_negatives_percentile,
    sample_negatives_simweighted,
)
from .repsim import PairedRepresentations, gram_cka, linear_cka, svcca
from .infotheory import (
    ConditioningSet,
    EntropyConfig,
    conditional_entropy,
    gaussian_entropy,
    pca_reduce,
    uncertainty_reduction,
)
from .saliency import (
    AttributionRecord,
    TokenTag,
    language_saliency,
    rank_inverse,
    read_attributions,
    write_attributions,
)
from .scores import ClasBreakdown, PairAccuracies, clas, consistency
from .alignloss import (
    LossWeight,
    OptimizationResult,
    TripleBatch,
    align_loss,
    align_loss_grad,
    optimize_embeddings,
)
from .synthgen import GeneratedFixture, PlantedModel, generate
from .report import (
    AlignmentReport,
    AnalysisError,
    RunConfig,
    emit_tsne_input,
    load_config,
    run,
    validate_report,
)

__all__ = [
    "__version__",
    "FileFormatError",
    "Language",
    "LayerEmbeddings",
    "Pooling",
    "RetrievalConfig",
    "SamplerKind",
    "TripleIndex",
    "load_triple_index",
    "read_embeddings",
    "write_embeddings",
    "write_triple_index",
    "Direction",
    "RetrievalOutcome",
    "directional_accuracy",
    "layer_curve",
    "sample_negatives_percentile",
    "sample_negatives_simweighted",
    "PairedRepresentations",
    "gram_cka",
    "linear_cka",
    "svcca",
    "ConditioningSet",
    "EntropyConfig",
    "conditional_entropy",
    "gaussian_entropy",
    "pca_reduce",
    "uncertainty_reduction",
    "AttributionRecord",
    "TokenTag",
    "language_saliency",
    "rank_inverse",
    "read_attributions",
    "write_attributions",
    "ClasBreakdown",
    "PairAccuracies",
    "clas",
    "consistency",
    "LossWeight",
    "OptimizationResult",
    "TripleBatch",
    "align_loss",
    "align_loss_grad",
    "optimize_embeddings",
    "GeneratedFixture",
    "PlantedModel",
    "generate",
    "AlignmentReport",
    "AnalysisError",
    "RunConfig",
    "emit_tsne_input",
    "load_config",
    "run",
    "validate_report",
]
