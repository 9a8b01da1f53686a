"""Embedding-driven adjustment of a document-term matrix.

Synonyms split weight across columns: "lost" and "mislaid" look unrelated
to cosine similarity even though the documents agree.  The adjustment fills
a zero cell with the weight of the most similar word that *is* present in
the document, scaled by that similarity, provided the similarity clears a
threshold.  Filling always reads the original matrix, never already-filled
cells, so the operation does not cascade and is symmetric in document
order.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AlignmentError, EmbeddingFormatError, ParameterError
from .vectorize import ADJUSTED_OF, DocTermMatrix, Vocabulary


@dataclass(frozen=True)
class EmbeddingTable:
    """Word vectors for (a subset of) a vocabulary."""

    dim: int
    vectors: dict

    def __post_init__(self):
        for word, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise AlignmentError(
                    f"vector for {word!r} has shape {vec.shape}, "
                    f"expected ({self.dim},)")

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)


@dataclass(frozen=True)
class WordSimilarityMatrix:
    """Thresholded cosine similarities between vocabulary terms.

    Symmetric, unit diagonal, entries in [0, 1]; off-diagonal entries are
    either 0 or at least ``threshold``.
    """

    vocab: Vocabulary
    sim: np.ndarray
    threshold: float

    def __post_init__(self):
        s = np.array(self.sim, dtype=np.float64, order="C")
        m = len(self.vocab)
        if s.shape != (m, m):
            raise AlignmentError(
                f"similarity shape {s.shape} does not match {m} terms")
        if not np.array_equal(s, s.T):
            raise ParameterError("similarity matrix is not symmetric")
        if np.any(np.diag(s) != 1.0):
            raise ParameterError("similarity diagonal must be 1")
        if np.any(s < 0) or np.any(s > 1):
            raise ParameterError("similarities must lie in [0, 1]")
        off = s[~np.eye(m, dtype=bool)]
        if np.any((off > 0) & (off < self.threshold)):
            raise ParameterError(
                "off-diagonal similarities must be 0 or >= threshold")
        s.flags.writeable = False
        object.__setattr__(self, "sim", s)


def load_embeddings(path, vocab: Vocabulary) -> EmbeddingTable:
    """Read word2vec-style text embeddings, keeping only vocabulary words.

    The first line holds two integers (word count, dimension); each further
    line is a word followed by ``dimension`` floats.  Words outside the
    vocabulary are skipped, as are all-zero vectors, which carry no
    direction.  The first occurrence of a word wins.

    Raises:
        EmbeddingFormatError: malformed header or ragged/unparsable row;
            the error names the 1-based line number.
    """
    vectors: dict = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingFormatError(1, "header must be: word_count dim")
        try:
            declared, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingFormatError(
                1, f"non-integer header: {header.strip()!r}") from None
        if dim < 1 or declared < 0:
            raise EmbeddingFormatError(1, "header values out of range")

        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dim + 1:
                raise EmbeddingFormatError(
                    line_no,
                    f"expected {dim + 1} fields, found {len(fields)}")
            word = fields[0]
            if word not in vocab.index or word in vectors:
                continue
            try:
                vec = np.array([float(v) for v in fields[1:]])
            except ValueError:
                raise EmbeddingFormatError(
                    line_no, "non-numeric vector component") from None
            if not np.all(np.isfinite(vec)) or not np.any(vec):
                continue
            vectors[word] = vec
    return EmbeddingTable(dim=dim, vectors=vectors)


def build_similarity(emb: EmbeddingTable, vocab: Vocabulary,
                     threshold: float) -> WordSimilarityMatrix:
    """Pairwise thresholded cosine similarity over the vocabulary.

    Word pairs with an embedding on both sides get their cosine; negative
    cosines are clipped to 0, values below ``threshold`` are zeroed, and
    pairs involving a word with no embedding stay 0.  The diagonal is 1
    regardless of embedding coverage.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(
            f"threshold must be in (0, 1], got {threshold}")
    m = len(vocab)
    sim = np.zeros((m, m))
    present = [i for i, t in enumerate(vocab.terms) if t in emb.vectors]
    if present:
        rows = np.stack([emb.vectors[vocab.terms[i]] for i in present])
        rows = rows / np.sqrt((rows * rows).sum(axis=1, keepdims=True))
        cos = rows @ rows.T
        # matrix products are not exactly symmetric; mirror one triangle
        lower = np.tril(cos, -1)
        cos = np.clip(lower + lower.T, 0.0, 1.0)
        cos[cos < threshold] = 0.0
        sim[np.ix_(present, present)] = cos
    np.fill_diagonal(sim, 1.0)
    return WordSimilarityMatrix(vocab=vocab, sim=sim, threshold=threshold)


def semantic_adjust(mat: DocTermMatrix,
                    simm: WordSimilarityMatrix) -> DocTermMatrix:
    """Fill zero cells from each document's most similar present word.

    For document i and absent term j, let c be the present term maximizing
    sim(j, c); ties prefer the larger original weight, then the lower
    column index.  When that similarity is positive the cell becomes
    ``weights[i, c] * sim(j, c)``; nonzero cells are never touched.
    """
    if mat.vocab != simm.vocab:
        raise AlignmentError("matrix and similarity vocabularies differ")
    if mat.weighting not in ADJUSTED_OF:
        raise ParameterError(
            f"matrix is already adjusted: {mat.weighting.value}")
    adjusted = kernels.semantic_adjust_matrix(
        np.ascontiguousarray(mat.weights), np.ascontiguousarray(simm.sim))
    return DocTermMatrix(doc_ids=mat.doc_ids, vocab=mat.vocab,
                         weights=adjusted,
                         weighting=ADJUSTED_OF[mat.weighting])
