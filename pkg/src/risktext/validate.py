"""Cluster validation: silhouette widths and tag-aligned accuracy.

Accuracy treats an analyst tag set as ground truth up to renaming: the
assignment problem between clusters and tags is solved for the matching
that explains the most documents.  Untagged documents never count;
trimmed documents count against accuracy (the method refused to explain
them) but are excluded from silhouette geometry.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .cluster import TRIMMED, ClusterResult
from .errors import (
    AlignmentError,
    DuplicateKeyError,
    ParameterError,
    SchemaError,
    UndefinedSilhouetteError,
)

UNTAGGED = None


@dataclass(frozen=True)
class TagSet:
    """Per-document tags aligned to a doc_id order; None means untagged."""

    labels: tuple
    tag_names: tuple[str, ...]

    @classmethod
    def from_labels(cls, labels) -> "TagSet":
        labels = tuple(labels)
        names: list[str] = []
        for tag in labels:
            if tag is UNTAGGED:
                continue
            if not isinstance(tag, str) or not tag:
                raise ParameterError(f"tags must be non-empty strings: {tag!r}")
            if tag not in names:
                names.append(tag)
        return cls(labels=labels, tag_names=tuple(names))

    def __post_init__(self):
        present = [t for t in self.labels if t is not UNTAGGED]
        if sorted(set(present)) != sorted(self.tag_names):
            raise ParameterError("tag_names must list exactly the used tags")

    def __len__(self):
        return len(self.labels)

    @property
    def tagged_count(self) -> int:
        return sum(1 for t in self.labels if t is not UNTAGGED)


@dataclass
class ValidationReport:
    """Holds whichever validation measures were computed."""

    accuracy: float | None = None
    misclassified: int | None = None
    alignment: dict | None = None
    silhouette_index: float | None = None
    per_point_silhouette: np.ndarray | None = None

    def to_dict(self) -> dict:
        out: dict = {}
        if self.accuracy is not None:
            out["accuracy"] = self.accuracy
            out["misclassified"] = self.misclassified
            out["alignment"] = {str(c): t for c, t in self.alignment.items()}
        if self.silhouette_index is not None:
            out["silhouette_index"] = self.silhouette_index
            out["per_point_silhouette"] = [
                float(v) for v in self.per_point_silhouette]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, raw: dict) -> "ValidationReport":
        per_point = raw.get("per_point_silhouette")
        return cls(
            accuracy=raw.get("accuracy"),
            misclassified=raw.get("misclassified"),
            alignment=None if raw.get("alignment") is None else {
                int(c): t for c, t in raw["alignment"].items()},
            silhouette_index=raw.get("silhouette_index"),
            per_point_silhouette=None if per_point is None
            else np.asarray(per_point, dtype=np.float64),
        )


def load_tags(path, doc_ids) -> TagSet:
    """Read an event_id,tag CSV into a TagSet aligned with ``doc_ids``.

    Documents absent from the file stay untagged.  Unknown event ids and
    duplicate rows are errors; silent misalignment would poison accuracy.
    """
    order = {d: i for i, d in enumerate(doc_ids)}
    labels: list = [UNTAGGED] * len(order)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("event_id", "tag"):
            if col not in header:
                raise SchemaError(f"missing column: {col}")
        for row in reader:
            event_id = (row.get("event_id") or "").strip()
            tag = (row.get("tag") or "").strip()
            if event_id not in order:
                raise AlignmentError(f"tag for unknown event_id: {event_id}")
            if labels[order[event_id]] is not UNTAGGED:
                raise DuplicateKeyError(f"event tagged twice: {event_id}")
            if not tag:
                raise ParameterError(f"empty tag for {event_id}")
            labels[order[event_id]] = tag
    return TagSet.from_labels(labels)


def silhouette(points, result: ClusterResult) -> tuple[float, np.ndarray]:
    """Mean silhouette width and the per-point widths, Euclidean metric.

    Trimmed points are excluded entirely and report 0; singleton-cluster
    points score 0 by convention.  Needs at least two populated clusters.
    """
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[0] != result.assignment.shape[0]:
        raise AlignmentError(
            f"points shape {pts.shape} does not match "
            f"{result.assignment.shape[0]} assignments")
    labels = result.assignment.astype(np.int64) - 1  # trimmed becomes -1
    included = labels >= 0
    if len(set(labels[included].tolist())) < 2:
        raise UndefinedSilhouetteError(
            "silhouette needs at least two populated clusters")
    per_point = kernels.silhouette_samples(pts, labels, result.k)
    index = float(per_point[included].mean())
    return index, per_point


def accuracy(result: ClusterResult, tags: TagSet) -> ValidationReport:
    """Best-case classification accuracy of clusters against tags.

    Clusters and tags are matched one-to-one (rectangular assignment,
    maximizing agreement); accuracy is matched documents over tagged
    documents.  Trimmed documents stay in the denominator, untagged
    documents in neither.
    """
    if len(tags) != result.assignment.shape[0]:
        raise AlignmentError(
            f"{len(tags)} tags for {result.assignment.shape[0]} documents")
    if not tags.tag_names:
        raise ParameterError("no document is tagged")

    tag_index = {t: j for j, t in enumerate(tags.tag_names)}
    table = np.zeros((result.k, len(tags.tag_names)), dtype=np.int64)
    denominator = 0
    for label, tag in zip(result.assignment, tags.labels):
        if tag is UNTAGGED:
            continue
        denominator += 1
        if label != TRIMMED:
            table[label - 1, tag_index[tag]] += 1

    rows, cols = linear_sum_assignment(table, maximize=True)
    matched = int(table[rows, cols].sum())
    acc = matched / denominator
    alignment = {int(r) + 1: tags.tag_names[c] for r, c in zip(rows, cols)}
    return ValidationReport(
        accuracy=acc,
        misclassified=round((1.0 - acc) * denominator),
        alignment=alignment,
    )


def write_silhouette_csv(path, doc_ids, result: ClusterResult,
                         per_point: np.ndarray) -> None:
    """Plot-ready silhouette data: per cluster, widths in decreasing order."""
    rows = []
    for doc_id, label, value in zip(doc_ids, result.assignment, per_point):
        if label == TRIMMED:
            continue
        rows.append((int(label), -float(value), doc_id))
    rows.sort()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster", "doc_id", "silhouette"])
        for label, neg_value, doc_id in rows:
            writer.writerow([label, doc_id, repr(-neg_value)])
