"""Numba and numpy kernel variants must agree on every output."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from risktext import kernels
from risktext.accel import ENV_FLAG


def unit_rows(rng, n, d):
    x = rng.normal(size=(n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


class TestBackendsAgree:
    @pytest.mark.parametrize("seed", range(8))
    @pytest.mark.parametrize("n_trim", [0, 2])
    def test_concentration(self, seed, n_trim):
        rng = np.random.default_rng(seed)
        points = rng.normal(size=(30, 3))
        centers0 = points[rng.choice(30, size=3, replace=False)].copy()
        nb = kernels.concentration_single_nb(points, centers0, n_trim, 300)
        np_ = kernels.concentration_single_np(points, centers0, n_trim, 300)
        assert np.array_equal(nb[0], np_[0])
        assert np.array_equal(nb[1], np_[1])
        assert nb[2] == np_[2]
        assert nb[3] == np_[3] and nb[4] == np_[4]

    @pytest.mark.parametrize("seed", range(8))
    def test_spherical(self, seed):
        rng = np.random.default_rng(seed + 100)
        points = unit_rows(rng, 25, 4)
        centers0 = points[rng.choice(25, size=3, replace=False)].copy()
        nb = kernels.spherical_single_nb(points, centers0, 300)
        np_ = kernels.spherical_single_np(points, centers0, 300)
        assert np.array_equal(nb[0], np_[0])
        assert np.array_equal(nb[1], np_[1])
        assert nb[2] == np_[2]

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_lda_gibbs(self, seed):
        rng = np.random.default_rng(seed + 200)
        total = 60
        doc_of = rng.integers(0, 3, size=total).astype(np.int64)
        word_of = rng.integers(0, 7, size=total).astype(np.int64)
        args = (doc_of, word_of, 3, 7, 2, 0.1, 0.05, 40, 10, seed)
        t_nb, dk_nb, kw_nb = kernels.lda_gibbs_nb(*args)
        t_np, dk_np, kw_np = kernels.lda_gibbs_np(*args)
        assert np.array_equal(t_nb, t_np)
        assert np.array_equal(dk_nb, dk_np)
        assert np.array_equal(kw_nb, kw_np)

    @pytest.mark.parametrize("seed", range(8))
    def test_semantic_adjust(self, seed):
        rng = np.random.default_rng(seed + 300)
        weights = rng.integers(0, 3, size=(12, 9)).astype(np.float64)
        sim = rng.uniform(0.0, 1.0, size=(9, 9))
        sim = np.triu(sim) + np.triu(sim, 1).T
        np.fill_diagonal(sim, 1.0)
        out_nb = kernels.semantic_adjust_nb(weights, sim)
        out_np = kernels.semantic_adjust_np(weights, sim)
        assert np.array_equal(out_nb, out_np)

    @pytest.mark.parametrize("seed", range(8))
    def test_silhouette(self, seed):
        rng = np.random.default_rng(seed + 400)
        points = rng.normal(size=(40, 3))
        labels = rng.integers(0, 3, size=40).astype(np.int64)
        labels[:4] = -1
        s_nb = kernels.silhouette_nb(points, labels, 3)
        s_np = kernels.silhouette_np(points, labels, 3)
        # the numpy path sums distances with pairwise reduction, so the two
        # widths may differ in the last few ulps
        assert np.allclose(s_nb, s_np, rtol=1e-12, atol=1e-12)


class TestConcentrationSemantics:
    def test_plain_kmeans_splits_two_blobs(self):
        rng = np.random.default_rng(1)
        points = np.vstack([rng.normal(0.0, 0.1, size=(10, 2)),
                            rng.normal(5.0, 0.1, size=(10, 2))])
        centers0 = np.array([[0.0, 0.0], [5.0, 5.0]])
        labels, _, _, _, converged = kernels.concentration_single(
            points, centers0, 0, 300)
        assert converged
        assert len(set(labels[:10])) == 1
        assert len(set(labels[10:])) == 1
        assert labels[0] != labels[10]

    def test_trim_discards_farthest_points(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1],
                           [5.0, 0.0], [5.1, 0.0], [5.0, 0.1],
                           [50.0, 50.0]])
        centers0 = np.array([[0.0, 0.0], [5.0, 0.0]])
        labels, _, objective, _, _ = kernels.concentration_single(
            points, centers0, 1, 300)
        assert labels[6] == -1
        assert set(labels[:6]) <= {0, 1}
        no_trim = kernels.concentration_single(points, centers0, 0, 300)
        assert objective < no_trim[2]

    def test_trimmed_points_excluded_from_objective(self):
        points = np.array([[0.0], [1.0], [100.0]])
        centers0 = np.array([[0.0], [1.0]])
        labels, _, objective, _, _ = kernels.concentration_single(
            points, centers0, 1, 300)
        assert labels[2] == -1
        assert objective == 0.0

    def test_empty_cluster_repaired(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.2]])
        centers0 = np.array([[0.4, 0.0], [40.0, 40.0]])
        labels, _, _, _, _ = kernels.concentration_single(
            points, centers0, 0, 300)
        assert set(labels) == {0, 1}

    def test_assignment_tie_takes_lower_center_index(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]])
        centers0 = np.array([[0.0, 0.0], [1.0, 0.0]])
        labels, _, _, _, _ = kernels.concentration_single(
            points, centers0, 0, 1)
        assert labels.tolist() == [0, 1, 0]


class TestSilhouetteSemantics:
    def test_trimmed_and_singleton_width_zero(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [9.0, 9.0]])
        labels = np.array([0, 0, 1, -1], dtype=np.int64)
        sil = kernels.silhouette_samples(points, labels, 2)
        assert sil[2] == 0.0
        assert sil[3] == 0.0
        assert sil[0] > 0.9 and sil[1] > 0.9

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(9)
        points = rng.normal(size=(12, 2))
        labels = np.array([0] * 6 + [1] * 6, dtype=np.int64)
        sil = kernels.silhouette_samples(points, labels, 2)
        dist = np.linalg.norm(points[:, None] - points[None, :], axis=2)
        for i in range(12):
            own = [j for j in range(12) if labels[j] == labels[i] and j != i]
            other = [j for j in range(12) if labels[j] != labels[i]]
            a = dist[i, own].mean()
            b = dist[i, other].mean()
            assert sil[i] == pytest.approx((b - a) / max(a, b), abs=1e-12)


class TestBackendSelection:
    def test_flag_forces_numpy_backend(self):
        code = (
            "import json, risktext.accel as a, risktext.kernels as k\n"
            "print(json.dumps({'use_numba': a.USE_NUMBA,\n"
            "                  'np_selected': k.concentration_single\n"
            "                      is k.concentration_single_np}))\n"
        )
        env = dict(os.environ, **{ENV_FLAG: "1"})
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        got = json.loads(out.stdout)
        assert got == {"use_numba": False, "np_selected": True}

    def test_flagged_run_matches_inprocess_labels(self):
        rng = np.random.default_rng(77)
        points = rng.normal(size=(20, 2))
        centers0 = points[:2].copy()
        here = kernels.concentration_single(points, centers0, 2, 300)
        code = (
            "import sys, json\n"
            "import numpy as np\n"
            "from risktext import kernels\n"
            "rng = np.random.default_rng(77)\n"
            "points = rng.normal(size=(20, 2))\n"
            "labels, centers, obj, _, _ = kernels.concentration_single(\n"
            "    points, points[:2].copy(), 2, 300)\n"
            "print(json.dumps({'labels': labels.tolist(), 'obj': obj}))\n"
        )
        env = dict(os.environ, **{ENV_FLAG: "1"})
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        got = json.loads(out.stdout)
        assert got["labels"] == here[0].tolist()
        assert got["obj"] == pytest.approx(here[2], abs=0)
