"""Truncated SVD factors and document projection."""

import json

import numpy as np
import pytest

from risktext.errors import AlignmentError, ParameterError
from risktext.lsa import (Projection2D, SvdFactors, project_2d, project_docs,
                          truncated_svd)
from risktext.vectorize import DocTermMatrix, Vocabulary, Weighting


def random_dtm(seed, n=None, m=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 41))
    m = m or int(rng.integers(2, 61))
    return DocTermMatrix(
        doc_ids=tuple(f"d{i:03d}" for i in range(n)),
        vocab=Vocabulary(terms=tuple(f"t{j:03d}" for j in range(m))),
        weights=rng.uniform(0.0, 3.0, size=(n, m)),
        weighting=Weighting.TFIDF,
    )


class TestTruncatedSvd:
    def test_full_rank_reconstructs(self):
        mat = random_dtm(1, 8, 5)
        f = truncated_svd(mat, rank=5)
        err = (np.linalg.norm(mat.weights - f.reconstruct())
               / np.linalg.norm(mat.weights))
        assert err <= 1e-10

    def test_columns_orthonormal(self):
        f = truncated_svd(random_dtm(2, 10, 7), rank=6)
        assert np.abs(f.u.T @ f.u - np.eye(6)).max() <= 1e-8
        assert np.abs(f.v.T @ f.v - np.eye(6)).max() <= 1e-8

    def test_singular_values_sorted_nonnegative(self):
        f = truncated_svd(random_dtm(3, 12, 9), rank=9)
        s = f.singular_values
        assert np.all(s >= 0)
        assert np.all(np.diff(s) <= 0)

    def test_error_nonincreasing_in_rank(self):
        mat = random_dtm(4, 9, 6)
        errors = [np.linalg.norm(mat.weights - truncated_svd(mat, r).reconstruct())
                  for r in range(1, 7)]
        assert all(a >= b - 1e-12 for a, b in zip(errors, errors[1:]))

    def test_rank_bounds(self):
        mat = random_dtm(5, 4, 3)
        for bad in (0, 4, -1):
            with pytest.raises(ParameterError):
                truncated_svd(mat, rank=bad)

    def test_sign_convention_fixed(self):
        # each left vector's largest-magnitude entry comes out positive,
        # so repeated runs produce the same basis rather than a +/- flip
        f = truncated_svd(random_dtm(6, 7, 5), rank=4)
        for col in f.u.T:
            assert col[np.abs(col).argmax()] > 0

    def test_projection_matches_u_times_sigma(self):
        f = truncated_svd(random_dtm(7, 6, 5), rank=3)
        coords = project_docs(f, 3)
        assert np.allclose(coords, f.u * f.singular_values, atol=1e-12)
        assert coords.shape == (6, 3)

    def test_projection_dims_capped_by_rank(self):
        f = truncated_svd(random_dtm(8, 6, 5), rank=2)
        with pytest.raises(ParameterError):
            project_docs(f, 3)

    def test_projection_defaults_to_full_rank(self):
        f = truncated_svd(random_dtm(15, 6, 5), rank=3)
        assert project_docs(f).shape == (6, 3)


class TestProjection2D:
    def test_project_2d_shape_and_ids(self):
        f = truncated_svd(random_dtm(9, 5, 4), rank=2)
        proj = project_2d(f, doc_ids=tuple("abcde"))
        assert isinstance(proj, Projection2D)
        assert proj.coords.shape == (5, 2)
        assert proj.doc_ids == tuple("abcde")

    def test_doc_id_count_must_match(self):
        f = truncated_svd(random_dtm(10, 5, 4), rank=2)
        with pytest.raises(AlignmentError):
            project_2d(f, doc_ids=("a", "b"))

    def test_rank_one_factors_rejected(self):
        f = truncated_svd(random_dtm(11, 5, 4), rank=1)
        with pytest.raises(ParameterError):
            project_2d(f, doc_ids=tuple("abcde"))

    def test_json_payload(self):
        f = truncated_svd(random_dtm(12, 3, 4), rank=2)
        proj = project_2d(f, doc_ids=("a", "b", "c"))
        rows = json.loads(proj.to_json())
        assert [r["doc_id"] for r in rows] == ["a", "b", "c"]
        assert set(rows[0]) == {"doc_id", "v1", "v2"}
        assert rows[1]["v1"] == pytest.approx(proj.coords[1, 0], abs=0)

    def test_coords_frozen(self):
        f = truncated_svd(random_dtm(16, 4, 3), rank=2)
        proj = project_2d(f, doc_ids=tuple("abcd"))
        with pytest.raises(ValueError):
            proj.coords[0, 0] = 9.9


class TestFactorValidation:
    def test_disordered_singular_values_rejected(self):
        f = truncated_svd(random_dtm(13, 5, 4), rank=2)
        with pytest.raises(ParameterError):
            SvdFactors(u=f.u, singular_values=f.singular_values[::-1].copy(),
                       v=f.v, rank=2)

    def test_non_orthonormal_u_rejected(self):
        f = truncated_svd(random_dtm(14, 5, 4), rank=2)
        with pytest.raises(ParameterError):
            SvdFactors(u=f.u * 2.0, singular_values=f.singular_values,
                       v=f.v, rank=2)

    def test_shape_mismatch_rejected(self):
        f = truncated_svd(random_dtm(17, 5, 4), rank=3)
        with pytest.raises(AlignmentError):
            SvdFactors(u=f.u[:, :2], singular_values=f.singular_values,
                       v=f.v, rank=3)
