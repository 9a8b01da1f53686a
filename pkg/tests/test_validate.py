"""Accuracy against analyst tags and silhouette widths."""

import csv
import itertools
import json

import numpy as np
import pytest

from risktext.cluster import ClusterResult, Method, MultiStartPolicy, kmeans
from risktext.errors import (AlignmentError, DuplicateKeyError,
                             ParameterError, SchemaError,
                             UndefinedSilhouetteError)
from risktext.validate import (UNTAGGED, TagSet, ValidationReport, accuracy,
                               load_tags, silhouette, write_silhouette_csv)


def exhaustive_best_match(table):
    """Try every injective cluster-to-tag map; keep the best agreement."""
    k, t = table.shape
    best = 0
    if k >= t:
        for perm in itertools.permutations(range(k), t):
            best = max(best, sum(table[perm[j], j] for j in range(t)))
    else:
        for perm in itertools.permutations(range(t), k):
            best = max(best, sum(table[i, perm[i]] for i in range(k)))
    return best


def hard_result(labels, k, method=Method.KMEANS):
    return ClusterResult(method=method, k=k,
                         assignment=np.asarray(labels, dtype=np.int64),
                         objective=0.0, seed=0)


class TestTagSet:
    def test_names_follow_first_appearance(self):
        tags = TagSet.from_labels(["b", None, "a", "b"])
        assert tags.tag_names == ("b", "a")
        assert tags.tagged_count == 3
        assert len(tags) == 4

    def test_rejects_non_string_tags(self):
        with pytest.raises(ParameterError):
            TagSet.from_labels(["a", 3])
        with pytest.raises(ParameterError):
            TagSet.from_labels([""])

    def test_names_must_cover_used_tags(self):
        with pytest.raises(ParameterError):
            TagSet(labels=("a", "b"), tag_names=("a",))


class TestAccuracy:
    @pytest.mark.parametrize("seed", range(30))
    def test_matches_exhaustive_permutation(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        names = ["w", "x", "y", "z"][:int(rng.integers(2, 5))]
        labels = rng.integers(1, k + 1, size=40)
        raw_tags = [names[i] if rng.random() > 0.2 else UNTAGGED
                    for i in rng.integers(0, len(names), size=40)]
        if all(t is UNTAGGED for t in raw_tags):
            raw_tags[0] = names[0]
        tags = TagSet.from_labels(raw_tags)
        report = accuracy(hard_result(labels, k), tags)

        table = np.zeros((k, len(tags.tag_names)), dtype=int)
        denom = 0
        for lab, tag in zip(labels, raw_tags):
            if tag is UNTAGGED:
                continue
            denom += 1
            table[lab - 1, tags.tag_names.index(tag)] += 1
        best = exhaustive_best_match(table)
        assert report.accuracy == pytest.approx(best / denom, abs=1e-12)
        assert report.misclassified == denom - best

    def test_perfect_clustering_up_to_renaming(self):
        labels = [2, 2, 1, 1, 3, 3]
        tags = TagSet.from_labels(["a", "a", "b", "b", "c", "c"])
        report = accuracy(hard_result(labels, 3), tags)
        assert report.accuracy == 1.0
        assert report.misclassified == 0
        assert report.alignment == {2: "a", 1: "b", 3: "c"}

    def test_trimmed_documents_count_against(self):
        labels = [1, 1, 2, 2, 0]
        tags = TagSet.from_labels(["a", "a", "b", "b", "b"])
        report = accuracy(hard_result(labels, 2, Method.TRIMMED_KMEANS), tags)
        assert report.accuracy == pytest.approx(4 / 5)
        assert report.misclassified == 1

    def test_untagged_documents_ignored(self):
        labels = [1, 1, 2, 2, 1]
        tags = TagSet.from_labels(["a", "a", "b", "b", None])
        report = accuracy(hard_result(labels, 2), tags)
        assert report.accuracy == 1.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(AlignmentError):
            accuracy(hard_result([1, 2], 2), TagSet.from_labels(["a"]))

    def test_no_tags_rejected(self):
        with pytest.raises(ParameterError):
            accuracy(hard_result([1, 2], 2),
                     TagSet.from_labels([None, None]))


class TestLoadTags:
    def test_alignment_and_untagged_default(self, tmp_path):
        p = tmp_path / "tags.csv"
        p.write_text("event_id,tag\nE2,fraud\nE1,damage\n")
        tags = load_tags(p, ["E1", "E2", "E3"])
        assert tags.labels == ("damage", "fraud", UNTAGGED)
        assert tags.tag_names == ("damage", "fraud")

    def test_unknown_event_rejected(self, tmp_path):
        p = tmp_path / "tags.csv"
        p.write_text("event_id,tag\nE9,fraud\n")
        with pytest.raises(AlignmentError, match="E9"):
            load_tags(p, ["E1"])

    def test_duplicate_event_rejected(self, tmp_path):
        p = tmp_path / "tags.csv"
        p.write_text("event_id,tag\nE1,fraud\nE1,damage\n")
        with pytest.raises(DuplicateKeyError, match="E1"):
            load_tags(p, ["E1"])

    def test_empty_tag_rejected(self, tmp_path):
        p = tmp_path / "tags.csv"
        p.write_text("event_id,tag\nE1,\n")
        with pytest.raises(ParameterError, match="E1"):
            load_tags(p, ["E1"])

    def test_missing_column_rejected(self, tmp_path):
        p = tmp_path / "tags.csv"
        p.write_text("event_id,label\nE1,fraud\n")
        with pytest.raises(SchemaError, match="tag"):
            load_tags(p, ["E1"])


class TestSilhouette:
    def test_bounded(self):
        rng = np.random.default_rng(2)
        points = rng.normal(size=(30, 2))
        res = kmeans(points, 3, MultiStartPolicy(restarts=5, seed=0))
        index, per_point = silhouette(points, res)
        assert -1.0 <= index <= 1.0
        assert np.all(per_point >= -1.0) and np.all(per_point <= 1.0)

    def test_two_separated_blobs_score_high(self):
        rng = np.random.default_rng(3)
        points = np.vstack([rng.normal((0, 0), 0.3, size=(20, 2)),
                            rng.normal((10, 0), 0.3, size=(20, 2))])
        res = kmeans(points, 2, MultiStartPolicy(restarts=10, seed=0))
        index, _ = silhouette(points, res)
        assert index >= 0.9

    def test_singleton_cluster_scores_zero(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0]])
        res = hard_result([1, 1, 2], 2)
        _, per_point = silhouette(points, res)
        assert per_point[2] == 0.0

    def test_trimmed_points_left_out(self):
        rng = np.random.default_rng(4)
        blobs = np.vstack([rng.normal((0, 0), 0.3, size=(10, 2)),
                           rng.normal((8, 0), 0.3, size=(10, 2))])
        points = np.vstack([blobs, [[100.0, 100.0]]])
        res = hard_result([1] * 10 + [2] * 10 + [0], 2,
                          Method.TRIMMED_KMEANS)
        index, per_point = silhouette(points, res)
        assert per_point[20] == 0.0
        assert index == pytest.approx(per_point[:20].mean(), abs=1e-15)
        plain = silhouette(blobs, hard_result([1] * 10 + [2] * 10, 2))
        assert index == pytest.approx(plain[0], abs=1e-12)

    def test_single_populated_cluster_undefined(self):
        points = np.random.default_rng(5).normal(size=(6, 2))
        with pytest.raises(UndefinedSilhouetteError):
            silhouette(points, hard_result([1] * 6, 2))

    def test_shape_mismatch_rejected(self):
        points = np.zeros((3, 2))
        with pytest.raises(AlignmentError):
            silhouette(points, hard_result([1, 2], 2))


class TestSilhouetteCsv:
    def test_grouped_and_sorted(self, tmp_path):
        points = np.vstack([
            np.random.default_rng(6).normal((0, 0), 0.5, size=(8, 2)),
            np.random.default_rng(7).normal((6, 0), 0.5, size=(8, 2)),
            [[50.0, 50.0]],
        ])
        res = hard_result([1] * 8 + [2] * 8 + [0], 2, Method.TRIMMED_KMEANS)
        _, per_point = silhouette(points, res)
        out = tmp_path / "sil.csv"
        doc_ids = [f"D{i}" for i in range(17)]
        write_silhouette_csv(out, doc_ids, res, per_point)

        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 16  # trimmed row dropped
        clusters = [int(r["cluster"]) for r in rows]
        assert clusters == sorted(clusters)
        for c in (1, 2):
            widths = [float(r["silhouette"]) for r in rows
                      if int(r["cluster"]) == c]
            assert widths == sorted(widths, reverse=True)
        assert {r["doc_id"] for r in rows} == set(doc_ids) - {"D16"}

    def test_widths_survive_round_trip(self, tmp_path):
        points = np.array([[0.0, 0.0], [0.3, 0.0], [5.0, 0.0], [5.3, 0.0]])
        res = hard_result([1, 1, 2, 2], 2)
        _, per_point = silhouette(points, res)
        out = tmp_path / "sil.csv"
        write_silhouette_csv(out, ["a", "b", "c", "d"], res, per_point)
        with open(out, newline="") as fh:
            got = {r["doc_id"]: float(r["silhouette"])
                   for r in csv.DictReader(fh)}
        for doc, i in zip("abcd", range(4)):
            assert got[doc] == per_point[i]


class TestValidationReport:
    def test_round_trip(self):
        report = ValidationReport(
            accuracy=0.9, misclassified=4, alignment={1: "a", 2: "b"},
            silhouette_index=0.5,
            per_point_silhouette=np.array([0.4, 0.6]))
        back = ValidationReport.from_dict(json.loads(report.to_json()))
        assert back.accuracy == 0.9
        assert back.misclassified == 4
        assert back.alignment == {1: "a", 2: "b"}
        assert back.silhouette_index == 0.5
        assert np.array_equal(back.per_point_silhouette, [0.4, 0.6])

    def test_partial_report_serializes_sparsely(self):
        report = ValidationReport(silhouette_index=0.2,
                                  per_point_silhouette=np.array([0.2]))
        raw = json.loads(report.to_json())
        assert set(raw) == {"silhouette_index", "per_point_silhouette"}
