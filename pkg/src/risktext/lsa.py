"""Latent semantic analysis: truncated SVD and the 2-D document map.

Documents are projected to U * Sigma, so Euclidean geometry on the
projected points reproduces inner products of the original rows as far as
the kept rank allows.  Singular vectors get a deterministic sign: the
entry of largest magnitude in each left vector is made positive, which
keeps plots stable across runs and platforms.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ParameterError
from .vectorize import DocTermMatrix


@dataclass(frozen=True)
class SvdFactors:
    """Rank-r factors U (n x r), singular values (r,), V (m x r)."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray
    rank: int

    def __post_init__(self):
        u, s, v = self.u, self.singular_values, self.v
        r = self.rank
        if u.shape[1] != r or v.shape[1] != r or s.shape != (r,):
            raise AlignmentError("factor shapes disagree with rank")
        if np.any(s < 0) or np.any(s[1:] > s[:-1]):
            raise ParameterError(
                "singular values must be non-negative and non-increasing")
        for mat, name in ((u, "u"), (v, "v")):
            gram = mat.T @ mat
            if not np.allclose(gram, np.eye(r), atol=1e-8):
                raise ParameterError(f"{name} columns are not orthonormal")

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.v.T


@dataclass(frozen=True)
class Projection2D:
    """Per-document coordinates on the first two latent dimensions."""

    doc_ids: tuple[str, ...]
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64, order="C")
        if c.shape != (len(self.doc_ids), 2):
            raise AlignmentError(
                f"coords shape {c.shape}, expected ({len(self.doc_ids)}, 2)")
        if not np.all(np.isfinite(c)):
            raise ParameterError("coords contain non-finite values")
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    def to_json(self) -> str:
        return json.dumps([
            {"doc_id": d, "v1": float(x), "v2": float(y)}
            for d, (x, y) in zip(self.doc_ids, self.coords)
        ])


def truncated_svd(mat: DocTermMatrix, rank: int) -> SvdFactors:
    """Best rank-r factorization of the weight matrix.

    Raises ParameterError unless 1 <= rank <= min(n_docs, n_terms).
    """
    n, m = mat.shape
    if not 1 <= rank <= min(n, m):
        raise ParameterError(
            f"rank must be in [1, {min(n, m)}], got {rank}")
    u, s, vt = np.linalg.svd(mat.weights, full_matrices=False)
    u, s, v = u[:, :rank].copy(), s[:rank].copy(), vt[:rank].T.copy()
    for j in range(rank):
        lead = np.argmax(np.abs(u[:, j]))
        if u[lead, j] < 0:
            u[:, j] = -u[:, j]
            v[:, j] = -v[:, j]
    return SvdFactors(u=u, singular_values=s, v=v, rank=rank)


def project_docs(factors: SvdFactors, n_dims: int | None = None) -> np.ndarray:
    """Document coordinates U * Sigma on the first ``n_dims`` dimensions."""
    if n_dims is None:
        n_dims = factors.rank
    if not 1 <= n_dims <= factors.rank:
        raise ParameterError(
            f"n_dims must be in [1, {factors.rank}], got {n_dims}")
    return factors.u[:, :n_dims] * factors.singular_values[:n_dims]


def project_2d(factors: SvdFactors, doc_ids) -> Projection2D:
    """First two document coordinates, labeled with their doc ids."""
    if factors.rank < 2:
        raise ParameterError("projection needs rank >= 2")
    doc_ids = tuple(doc_ids)
    if len(doc_ids) != factors.u.shape[0]:
        raise AlignmentError(
            f"{len(doc_ids)} doc_ids for {factors.u.shape[0]} rows")
    return Projection2D(doc_ids=doc_ids, coords=project_docs(factors, 2))
