"""Document-term matrices: term frequency, TF-IDF and cosine similarity.

The vocabulary is the sorted union of corpus tokens, so column order is
reproducible from the corpus alone.  Matrices are dense float64 and frozen
after construction; reweighting returns a new matrix.
"""

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .corpus import CleanDocument
from .errors import (
    AlignmentError,
    DegenerateVocabularyError,
    DuplicateKeyError,
    EmptyCorpusError,
    ParameterError,
    ZeroVectorError,
)


class Weighting(str, Enum):
    TF = "TF"
    TFIDF = "TFIDF"
    ADJUSTED_TF = "ADJUSTED_TF"
    ADJUSTED_TFIDF = "ADJUSTED_TFIDF"


ADJUSTED_OF = {Weighting.TF: Weighting.ADJUSTED_TF,
               Weighting.TFIDF: Weighting.ADJUSTED_TFIDF}


@dataclass(frozen=True)
class Vocabulary:
    """Sorted, duplicate-free term list with its inverse index."""

    terms: tuple[str, ...]
    index: dict = field(default=None, repr=False, compare=False)

    @classmethod
    def from_tokens(cls, tokens) -> "Vocabulary":
        return cls(terms=tuple(sorted(set(tokens))))

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ParameterError("vocabulary terms must be sorted and unique")
        object.__setattr__(self, "index",
                           {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class DocTermMatrix:
    """Dense documents-by-terms weight matrix.

    ``weights[i, j]`` is the weight of term j in document i; the array is
    made read-only so a matrix can be shared safely between pipeline stages.
    """

    doc_ids: tuple[str, ...]
    vocab: Vocabulary
    weights: np.ndarray
    weighting: Weighting

    def __post_init__(self):
        # private copy so freezing it cannot affect a caller-held array
        w = np.array(self.weights, dtype=np.float64, order="C")
        if w.shape != (len(self.doc_ids), len(self.vocab)):
            raise AlignmentError(
                f"weights shape {w.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.vocab)} terms")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise DuplicateKeyError("doc_ids contain duplicates")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights contain non-finite values")
        if np.any(w < 0):
            raise ParameterError("weights must be non-negative")
        if self.weighting is Weighting.TF and not np.array_equal(
                w, np.rint(w)):
            raise ParameterError("TF weights must be whole counts")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def shape(self):
        return self.weights.shape

    def row(self, doc_id: str) -> np.ndarray:
        try:
            i = self.doc_ids.index(doc_id)
        except ValueError:
            raise AlignmentError(f"unknown doc_id: {doc_id}") from None
        return self.weights[i]

    def to_json(self) -> str:
        return json.dumps({
            "doc_ids": list(self.doc_ids),
            "terms": list(self.vocab.terms),
            "weighting": self.weighting.value,
            "rows": self.weights.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "DocTermMatrix":
        raw = json.loads(text)
        vocab = Vocabulary.from_tokens(raw["terms"])
        if list(vocab.terms) != list(raw["terms"]):
            raise ParameterError("serialized terms are not sorted and unique")
        return cls(doc_ids=tuple(raw["doc_ids"]), vocab=vocab,
                   weights=np.array(raw["rows"], dtype=np.float64),
                   weighting=Weighting(raw["weighting"]))


def build_tf(docs: list[CleanDocument]) -> DocTermMatrix:
    """Count term occurrences per document over the pooled vocabulary.

    Documents that cleaned down to nothing contribute zero rows.  Raises
    EmptyCorpusError when there are no documents or no tokens at all.
    """
    if not docs:
        raise EmptyCorpusError("no documents")
    vocab = Vocabulary.from_tokens(t for d in docs for t in d.tokens)
    if len(vocab) == 0:
        raise EmptyCorpusError("no document has any token")
    counts = np.zeros((len(docs), len(vocab)), dtype=np.float64)
    for i, doc in enumerate(docs):
        for tok in doc.tokens:
            counts[i, vocab.index[tok]] += 1.0
    return DocTermMatrix(doc_ids=tuple(d.event_id for d in docs), vocab=vocab,
                         weights=counts, weighting=Weighting.TF)


def idf(mat: DocTermMatrix) -> np.ndarray:
    """Inverse document frequency ln(n / n_j) per vocabulary column.

    Defined on a TF matrix only.  A term present in every document gets
    exactly 0; a term present in none is a degenerate vocabulary error.
    """
    if mat.weighting is not Weighting.TF:
        raise ParameterError(
            f"idf needs TF counts, got {mat.weighting.value}")
    n = mat.weights.shape[0]
    n_j = np.count_nonzero(mat.weights > 0, axis=0)
    if np.any(n_j == 0):
        missing = mat.vocab.terms[int(np.argmin(n_j))]
        raise DegenerateVocabularyError(
            f"term occurs in no document: {missing}")
    return np.log(n / n_j)


def apply_idf(mat: DocTermMatrix) -> DocTermMatrix:
    """Rescale TF counts to TF-IDF weights, returning a new matrix."""
    weights = mat.weights * idf(mat)[None, :]
    return DocTermMatrix(doc_ids=mat.doc_ids, vocab=mat.vocab,
                         weights=weights, weighting=Weighting.TFIDF)


def cosine_similarity(x, y) -> float:
    """Cosine of the angle between two non-negative weight vectors.

    Computed as dot(x, y) / sqrt(dot(x, x) * dot(y, y)); keeping the
    product under one square root preserves exact results for integer
    count vectors.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ParameterError(
            f"expected two equal-length vectors, got {x.shape} and {y.shape}")
    xx = float(np.dot(x, x))
    yy = float(np.dot(y, y))
    if xx == 0.0 or yy == 0.0:
        raise ZeroVectorError("cosine similarity with a zero vector")
    return float(np.dot(x, y)) / float(np.sqrt(xx * yy))
