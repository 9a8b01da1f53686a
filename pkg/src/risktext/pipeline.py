"""End-to-end batch pipeline: corpus file in, run artifact out.

The flow is fixed: load and clean the corpus, build TF (optionally
reweighted to TF-IDF), adjust the matrix with embedding similarities,
project with truncated SVD, run the configured clustering methods, then
validate against tags when given.  Point methods cluster the projected
coordinates (all ``lsa_rank`` of them); count methods cluster the adjusted
matrix itself.  Everything stochastic is derived from the config seed, so
rerunning a config reproduces the artifact bit for bit.
"""

import contextlib
import json
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import corpus as corpus_mod
from . import semantic, validate, vectorize
from .cluster import (
    ClusterResult,
    Method,
    MultiStartPolicy,
    dirichlet_multinomial,
    gmm_spherical,
    kmeans,
    lda_gibbs,
    mixtures_of_unigrams,
    spherical_kmeans,
    trimmed_kmeans,
)
from .errors import (
    DuplicateKeyError,
    ParameterError,
    PipelineStageError,
    RiskTextError,
)
from .lsa import Projection2D, project_docs, truncated_svd
from .validate import TagSet, ValidationReport, write_silhouette_csv
from .vectorize import Weighting

LOCK_NAME = ".risktext.lock"

POINT_METHODS = (Method.KMEANS, Method.SKMEANS, Method.GMM_SPHERICAL,
                 Method.TRIMMED_KMEANS)

DEFAULT_PARAMS = {
    Method.KMEANS: {"restarts": 1000},
    Method.SKMEANS: {"restarts": 1000},
    Method.GMM_SPHERICAL: {"restarts": 100, "max_iter": 300, "tol": 1e-8},
    Method.TRIMMED_KMEANS: {"restarts": 1000, "alpha": 0.05},
    Method.MOU: {"restarts": 100, "max_iter": 1000, "tol": 1e-7},
    Method.DMM: {"restarts": 100, "max_iter": 100, "tol": 1e-7},
    Method.LDA: {"iterations": 10000, "burn_in": 5000,
                 "alpha": 0.1, "beta": 0.05},
}


@dataclass(frozen=True)
class MethodSpec:
    """One clustering method to run, with its knobs."""

    method: Method
    k: int
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if not self.label:
            object.__setattr__(self, "label", self.method.value.lower())
        known = set(DEFAULT_PARAMS[self.method]) | {"seed"}
        unknown = set(self.params) - known
        if unknown:
            raise ParameterError(
                f"unknown params for {self.method.value}: {sorted(unknown)}")

    def resolved_params(self) -> dict:
        return {**DEFAULT_PARAMS[self.method], **self.params}


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run needs; serializes to YAML and back unchanged."""

    corpus_path: str
    stopword_path: str
    embedding_path: str
    methods: tuple
    lemma_path: str | None = None
    weighting: Weighting = Weighting.TF
    similarity_threshold: float = 0.8
    lsa_rank: int = 2
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise ParameterError(
                f"similarity_threshold must be in (0, 1], got "
                f"{self.similarity_threshold}")
        if self.lsa_rank < 2:
            raise ParameterError(
                f"lsa_rank must be >= 2, got {self.lsa_rank}")
        if self.weighting not in (Weighting.TF, Weighting.TFIDF):
            raise ParameterError(
                f"weighting must be TF or TFIDF, got {self.weighting}")
        if not self.methods:
            raise ParameterError("configure at least one method")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise DuplicateKeyError(f"duplicate method labels: {labels}")

    def to_dict(self) -> dict:
        out = {
            "corpus": self.corpus_path,
            "stopwords": self.stopword_path,
            "embeddings": self.embedding_path,
            "weighting": self.weighting.value,
            "similarity_threshold": self.similarity_threshold,
            "lsa_rank": self.lsa_rank,
            "seed": self.seed,
            "methods": [
                {"method": m.method.value, "k": m.k, "label": m.label,
                 **({"params": dict(m.params)} if m.params else {})}
                for m in self.methods
            ],
        }
        if self.lemma_path is not None:
            out["lemmas"] = self.lemma_path
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        required = {"corpus", "stopwords", "embeddings", "methods"}
        missing = required - set(raw)
        if missing:
            raise ParameterError(f"config lacks keys: {sorted(missing)}")
        try:
            methods = tuple(
                MethodSpec(method=Method(spec["method"]), k=int(spec["k"]),
                           label=spec.get("label", ""),
                           params=dict(spec.get("params", {})))
                for spec in raw["methods"])
            weighting = Weighting(raw.get("weighting", "TF"))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"bad config: {exc}") from exc
        return cls(
            corpus_path=raw["corpus"],
            stopword_path=raw["stopwords"],
            embedding_path=raw["embeddings"],
            lemma_path=raw.get("lemmas"),
            weighting=weighting,
            similarity_threshold=float(raw.get("similarity_threshold", 0.8)),
            lsa_rank=int(raw.get("lsa_rank", 2)),
            seed=int(raw.get("seed", 0)),
            output_dir=raw.get("output_dir"),
            methods=methods,
        )

    @classmethod
    def from_yaml(cls, path) -> "PipelineConfig":
        """Load a config file; relative paths resolve against its folder."""
        base = Path(path).parent
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ParameterError("config must be a mapping")
        cfg = cls.from_dict(raw)
        def resolve(p):
            return None if p is None else str((base / p).resolve())
        return replace(cfg,
                       corpus_path=resolve(cfg.corpus_path),
                       stopword_path=resolve(cfg.stopword_path),
                       embedding_path=resolve(cfg.embedding_path),
                       lemma_path=resolve(cfg.lemma_path),
                       output_dir=resolve(cfg.output_dir))

    def to_yaml(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)


@dataclass
class RunArtifact:
    """Self-contained result of one pipeline run."""

    config: dict
    doc_ids: tuple
    documents: list
    projection: Projection2D
    results: dict
    validation: dict
    timings: dict
    n_docs: int
    n_terms: int
    weighting: str

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "n_docs": self.n_docs,
            "n_terms": self.n_terms,
            "weighting": self.weighting,
            "documents": self.documents,
            "projection": json.loads(self.projection.to_json()),
            "results": {label: json.loads(r.to_json())
                        for label, r in self.results.items()},
            "validation": {label: v.to_dict()
                           for label, v in self.validation.items()},
            "timings": self.timings,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunArtifact":
        proj = raw["projection"]
        doc_ids = tuple(p["doc_id"] for p in proj)
        projection = Projection2D(
            doc_ids=doc_ids,
            coords=np.array([[p["v1"], p["v2"]] for p in proj]))
        results = {label: ClusterResult.from_json(json.dumps(r))
                   for label, r in raw["results"].items()}
        validation = {label: ValidationReport.from_dict(v)
                      for label, v in raw["validation"].items()}
        return cls(config=raw["config"], doc_ids=doc_ids,
                   documents=raw["documents"], projection=projection,
                   results=results, validation=validation,
                   timings=raw["timings"], n_docs=raw["n_docs"],
                   n_terms=raw["n_terms"], weighting=raw["weighting"])

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "run.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
        self._write_projection_csv(out / "projection.csv")
        first = next(iter(self.results)) if self.results else None
        report = self.validation.get(first)
        if report is not None and report.per_point_silhouette is not None:
            write_silhouette_csv(out / "silhouette.csv", self.doc_ids,
                                 self.results[first],
                                 report.per_point_silhouette)

    def _write_projection_csv(self, path) -> None:
        import csv as _csv

        first = next(iter(self.results)) if self.results else None
        labels = (self.results[first].assignment if first
                  else np.zeros(len(self.doc_ids), dtype=np.int64))
        tags = {d["doc_id"]: d.get("tag") for d in self.documents}
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["doc_id", "v1", "v2", "cluster", "tag"])
            for doc_id, (v1, v2), label in zip(
                    self.doc_ids, self.projection.coords, labels):
                tag = tags.get(doc_id) or ""
                cluster = "TRIMMED" if label == 0 else int(label)
                writer.writerow([doc_id, repr(float(v1)), repr(float(v2)),
                                 cluster, tag])

    @classmethod
    def load(cls, path) -> "RunArtifact":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@contextlib.contextmanager
def _stage(name: str, timings: dict):
    start = time.perf_counter()
    try:
        yield
    except RiskTextError as exc:
        raise PipelineStageError(name, str(exc)) from exc
    finally:
        timings[name] = time.perf_counter() - start


@contextlib.contextmanager
def _output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RiskTextError(
            f"another run holds {lock}; remove it if that run died"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _method_seed(base_seed: int, index: int) -> int:
    seq = np.random.SeedSequence([base_seed, index])
    return int(seq.generate_state(1)[0])


def _run_method(spec: MethodSpec, coords, dtm, seed: int) -> ClusterResult:
    params = spec.resolved_params()
    seed = int(params.pop("seed", seed))
    if spec.method in POINT_METHODS:
        policy = MultiStartPolicy(restarts=params.pop("restarts"), seed=seed)
        if spec.method is Method.KMEANS:
            return kmeans(coords, spec.k, policy)
        if spec.method is Method.SKMEANS:
            return spherical_kmeans(coords, spec.k, policy)
        if spec.method is Method.TRIMMED_KMEANS:
            return trimmed_kmeans(coords, spec.k, params.pop("alpha"), policy)
        return gmm_spherical(coords, spec.k, policy, **params)
    if spec.method is Method.MOU:
        policy = MultiStartPolicy(restarts=params.pop("restarts"), seed=seed)
        return mixtures_of_unigrams(dtm, spec.k, policy, **params)
    if spec.method is Method.DMM:
        policy = MultiStartPolicy(restarts=params.pop("restarts"), seed=seed)
        return dirichlet_multinomial(dtm, spec.k, policy, **params)
    return lda_gibbs(dtm, spec.k, seed=seed, **params)


def run_pipeline(cfg: PipelineConfig, tags: TagSet | None = None,
                 write: bool = True) -> RunArtifact:
    """Execute the whole flow for one config.

    ``tags`` aligns with corpus row order; pass None to skip accuracy.
    With ``write`` (and an output_dir) the artifact lands in
    ``output_dir`` as run.json plus plot-ready CSVs; a lock file refuses
    concurrent runs against the same directory.
    """
    timings: dict = {}

    with _stage("load", timings):
        events = corpus_mod.load_corpus(cfg.corpus_path)
        stopwords = corpus_mod.load_stopwords(cfg.stopword_path)
        lemmas = (corpus_mod.load_lemma_map(cfg.lemma_path)
                  if cfg.lemma_path else {})
        cleaning = corpus_mod.CleaningConfig(stopwords=stopwords,
                                             lemma_map=lemmas)
    if tags is not None and len(tags) != len(events):
        raise PipelineStageError(
            "load", f"{len(tags)} tags for {len(events)} documents")

    with _stage("clean", timings):
        docs = [corpus_mod.clean(e, cleaning) for e in events]

    with _stage("vectorize", timings):
        dtm = vectorize.build_tf(docs)
        if cfg.weighting is Weighting.TFIDF:
            dtm = vectorize.apply_idf(dtm)

    with _stage("adjust", timings):
        table = semantic.load_embeddings(cfg.embedding_path, dtm.vocab)
        simm = semantic.build_similarity(table, dtm.vocab,
                                         cfg.similarity_threshold)
        adjusted = semantic.semantic_adjust(dtm, simm)

    with _stage("project", timings):
        rank = min(cfg.lsa_rank, min(adjusted.shape))
        factors = truncated_svd(adjusted, rank)
        coords = project_docs(factors)
        projection = Projection2D(doc_ids=adjusted.doc_ids,
                                  coords=coords[:, :2])

    results: dict = {}
    validation: dict = {}
    for index, spec in enumerate(cfg.methods):
        with _stage(f"cluster:{spec.label}", timings):
            result = _run_method(spec, coords, adjusted,
                                 _method_seed(cfg.seed, index))
            results[spec.label] = result
        with _stage(f"validate:{spec.label}", timings):
            report = (validate.accuracy(result, tags) if tags is not None
                      and tags.tagged_count else ValidationReport())
            try:
                index_value, per_point = validate.silhouette(coords, result)
                report.silhouette_index = index_value
                report.per_point_silhouette = per_point
            except RiskTextError:
                pass  # single populated cluster: leave silhouette unset
            validation[spec.label] = report

    lookup = {t.event_id: t for t in events}
    tag_of = (dict(zip(dtm.doc_ids, tags.labels)) if tags is not None else {})
    documents = [
        {"doc_id": doc_id,
         "description": lookup[doc_id].description,
         "tokens": list(doc.tokens),
         "tag": tag_of.get(doc_id)}
        for doc_id, doc in zip(dtm.doc_ids, docs)
    ]

    artifact = RunArtifact(
        config=cfg.to_dict(), doc_ids=dtm.doc_ids, documents=documents,
        projection=projection, results=results, validation=validation,
        timings=timings, n_docs=adjusted.shape[0],
        n_terms=adjusted.shape[1], weighting=adjusted.weighting.value)

    if write and cfg.output_dir:
        with _output_lock(Path(cfg.output_dir)):
            artifact.save(cfg.output_dir)
    return artifact


SWEEPABLE = ("threshold", "alpha")


def sensitivity_sweep(cfg: PipelineConfig, parameter: str, values,
                      tags: TagSet) -> list[tuple[float, float]]:
    """Re-run the pipeline across parameter values, reporting accuracy.

    ``threshold`` varies the similarity threshold and reads accuracy off
    the first configured method; ``alpha`` varies the trim fraction of the
    first trimmed-k-means method.  Tags are required since accuracy is the
    response.
    """
    if parameter not in SWEEPABLE:
        raise ParameterError(
            f"parameter must be one of {SWEEPABLE}, got {parameter!r}")
    values = [float(v) for v in values]
    if not values:
        raise ParameterError("no sweep values given")
    if tags is None or not tags.tagged_count:
        raise ParameterError("a sweep needs tagged documents")

    if parameter == "alpha":
        target = next((i for i, m in enumerate(cfg.methods)
                       if m.method is Method.TRIMMED_KMEANS), None)
        if target is None:
            raise ParameterError(
                "alpha sweep needs a TRIMMED_KMEANS method in the config")

    out = []
    for value in values:
        if parameter == "threshold":
            trial = replace(cfg, similarity_threshold=value)
            label = cfg.methods[0].label
        else:
            methods = list(cfg.methods)
            spec = methods[target]
            methods[target] = replace(
                spec, params={**spec.params, "alpha": value})
            trial = replace(cfg, methods=tuple(methods))
            label = spec.label
        artifact = run_pipeline(trial, tags=tags, write=False)
        out.append((value, artifact.validation[label].accuracy))
    return out
