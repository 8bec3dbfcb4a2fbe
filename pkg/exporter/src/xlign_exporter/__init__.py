"""xlign-exporter: turn transformer encoders into xlign exchange files.

Feeds a parallel EN/HI/code-mixed corpus through an encoder and writes the
three file kinds the analysis toolkit reads: per-layer pooled XEB1
embedding matrices with JSON manifests, a triples.json alignment manifest,
and an integrated-gradients attribution TSV.
"""

__version__ = "0.1.0"

from .corpus import Corpus, SentenceTriple, load_corpus
from .export import (
    ExportIndex,
    ExportJob,
    embedding_filename,
    export_attributions,
    export_layer_embeddings,
)
from .ig import Attribution, CompletenessError, integrated_gradients, require_completeness
from .langtag import tag_word
from .model import ToyBackend, ToyEncoder, resolve_backend
from .toytok import Encoding, ToyTokenizer

__all__ = [
    "Attribution",
    "CompletenessError",
    "Corpus",
    "Encoding",
    "ExportIndex",
    "ExportJob",
    "SentenceTriple",
    "ToyBackend",
    "ToyEncoder",
    "ToyTokenizer",
    "embedding_filename",
    "export_attributions",
    "export_layer_embeddings",
    "integrated_gradients",
    "load_corpus",
    "require_completeness",
    "resolve_backend",
    "tag_word",
    "__version__",
]
