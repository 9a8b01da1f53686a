"""Batch pipeline: configs, artifacts, stage errors and sweeps."""

import csv
import json

import numpy as np
import pytest
from conftest import CARD_WORDS, WIRE_WORDS, make_row, write_rows

from risktext.cluster import Method
from risktext.errors import (DuplicateKeyError, ParameterError,
                             PipelineStageError, RiskTextError)
from risktext.pipeline import (LOCK_NAME, MethodSpec, PipelineConfig,
                               RunArtifact, run_pipeline, sensitivity_sweep)
from risktext.validate import TagSet
from risktext.vectorize import Weighting


def planted_inputs(tmp_path, n_docs=20, seed=3):
    """Corpus files over two disjoint word pools, half and half."""
    rng = np.random.default_rng(seed)
    data = tmp_path / "data"
    data.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(n_docs):
        pool = CARD_WORDS if i < n_docs // 2 else WIRE_WORDS
        picked = [pool[j] for j in rng.choice(len(pool), size=4,
                                              replace=False)]
        rows.append(make_row(f"EV{i:03d}",
                             description=" ".join(picked).capitalize() + "."))
    corpus_path = write_rows(data / "corpus.csv", rows)
    (data / "stopwords.txt").write_text("the\n")
    (data / "embeddings.txt").write_text("0 2\n")
    return data, corpus_path


def base_config(tmp_path, methods=None, **overrides):
    data, corpus_path = planted_inputs(tmp_path)
    if methods is None:
        methods = (MethodSpec(method=Method.KMEANS, k=2,
                              params={"restarts": 50}),)
    defaults = dict(
        corpus_path=str(corpus_path),
        stopword_path=str(data / "stopwords.txt"),
        embedding_path=str(data / "embeddings.txt"),
        methods=methods,
        output_dir=str(tmp_path / "run"),
    )
    defaults.update(overrides)
    return PipelineConfig(**defaults)


def planted_tags(n_docs=20):
    half = n_docs // 2
    return TagSet.from_labels(["card"] * half + ["wire"] * (n_docs - half))


class TestRunArtifact:
    def test_save_load_round_trip(self, tmp_path):
        artifact = run_pipeline(base_config(tmp_path), tags=planted_tags())
        back = RunArtifact.load(tmp_path / "run" / "run.json")
        assert back.to_dict() == artifact.to_dict()

    def test_run_json_schema(self, tmp_path):
        run_pipeline(base_config(tmp_path), tags=planted_tags())
        raw = json.loads((tmp_path / "run" / "run.json").read_text())
        assert set(raw) == {"config", "n_docs", "n_terms", "weighting",
                            "documents", "projection", "results",
                            "validation", "timings"}
        assert raw["n_docs"] == 20
        assert raw["weighting"] == "ADJUSTED_TF"
        assert set(raw["projection"][0]) == {"doc_id", "v1", "v2"}
        doc = raw["documents"][0]
        assert set(doc) == {"doc_id", "description", "tokens", "tag"}
        assert doc["tag"] == "card"
        res = raw["results"]["kmeans"]
        assert res["method"] == "KMEANS" and res["k"] == 2
        report = raw["validation"]["kmeans"]
        assert report["accuracy"] == 1.0
        assert 0.0 < report["silhouette_index"] <= 1.0

    def test_projection_csv(self, tmp_path):
        artifact = run_pipeline(base_config(tmp_path), tags=planted_tags())
        with open(tmp_path / "run" / "projection.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 20
        assert list(rows[0]) == ["doc_id", "v1", "v2", "cluster", "tag"]
        assert [r["doc_id"] for r in rows] == list(artifact.doc_ids)
        for row, (v1, v2) in zip(rows, artifact.projection.coords):
            assert float(row["v1"]) == v1 and float(row["v2"]) == v2
        assert {r["tag"] for r in rows} == {"card", "wire"}
        assert {r["cluster"] for r in rows} == {"1", "2"}

    def test_silhouette_csv_written_for_first_method(self, tmp_path):
        run_pipeline(base_config(tmp_path), tags=planted_tags())
        with open(tmp_path / "run" / "silhouette.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 20
        assert set(int(r["cluster"]) for r in rows) == {1, 2}

    def test_untagged_run_skips_accuracy(self, tmp_path):
        artifact = run_pipeline(base_config(tmp_path))
        report = artifact.validation["kmeans"]
        assert report.accuracy is None
        assert report.silhouette_index is not None

    def test_rerun_is_bit_identical(self, tmp_path):
        cfg_a = base_config(tmp_path / "a")
        cfg_b = base_config(tmp_path / "b")
        art_a = run_pipeline(cfg_a, tags=planted_tags(), write=False)
        art_b = run_pipeline(cfg_b, tags=planted_tags(), write=False)
        da, db = art_a.to_dict(), art_b.to_dict()
        da.pop("timings"), db.pop("timings")
        da["config"].pop("corpus"), db["config"].pop("corpus")
        da["config"].pop("stopwords"), db["config"].pop("stopwords")
        da["config"].pop("embeddings"), db["config"].pop("embeddings")
        da["config"].pop("output_dir"), db["config"].pop("output_dir")
        assert json.dumps(da, sort_keys=True) == json.dumps(db,
                                                            sort_keys=True)


class TestConfig:
    def test_yaml_round_trip_resolves_relative_paths(self, tmp_path):
        data, corpus_path = planted_inputs(tmp_path)
        raw = {
            "corpus": "data/corpus.csv",
            "stopwords": "data/stopwords.txt",
            "embeddings": "data/embeddings.txt",
            "weighting": "TFIDF",
            "similarity_threshold": 0.75,
            "lsa_rank": 3,
            "seed": 9,
            "methods": [{"method": "KMEANS", "k": 2, "label": "km",
                         "params": {"restarts": 25}}],
        }
        cfg_path = tmp_path / "run.yaml"
        import yaml
        cfg_path.write_text(yaml.safe_dump(raw))
        cfg = PipelineConfig.from_yaml(cfg_path)
        assert cfg.corpus_path == str(corpus_path)
        assert cfg.weighting is Weighting.TFIDF
        assert cfg.similarity_threshold == 0.75
        assert cfg.lsa_rank == 3 and cfg.seed == 9
        assert cfg.methods[0].label == "km"
        assert cfg.methods[0].params == {"restarts": 25}

        out = tmp_path / "echo.yaml"
        cfg.to_yaml(out)
        again = PipelineConfig.from_yaml(out)
        assert again == cfg

    def test_dict_round_trip(self, tmp_path):
        cfg = base_config(tmp_path, similarity_threshold=0.7, seed=4)
        assert PipelineConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_method_param_rejected(self):
        with pytest.raises(ParameterError, match="bogus"):
            MethodSpec(method=Method.KMEANS, k=2, params={"bogus": 1})

    def test_duplicate_labels_rejected(self, tmp_path):
        methods = (MethodSpec(method=Method.KMEANS, k=2),
                   MethodSpec(method=Method.KMEANS, k=3))
        with pytest.raises(DuplicateKeyError):
            base_config(tmp_path, methods=methods)

    def test_bounds(self, tmp_path):
        with pytest.raises(ParameterError):
            base_config(tmp_path, similarity_threshold=0.0)
        with pytest.raises(ParameterError):
            base_config(tmp_path, similarity_threshold=1.2)
        with pytest.raises(ParameterError):
            base_config(tmp_path, lsa_rank=1)
        with pytest.raises(ParameterError):
            base_config(tmp_path, weighting=Weighting.ADJUSTED_TF)
        with pytest.raises(ParameterError):
            base_config(tmp_path, methods=())

    def test_from_dict_requires_core_keys(self):
        with pytest.raises(ParameterError, match="methods"):
            PipelineConfig.from_dict({"corpus": "c", "stopwords": "s",
                                      "embeddings": "e"})

    def test_default_label_is_method_name(self):
        spec = MethodSpec(method=Method.TRIMMED_KMEANS, k=2)
        assert spec.label == "trimmed_kmeans"


class TestStageErrors:
    def test_bad_corpus_fails_in_load(self, tmp_path):
        cfg = base_config(tmp_path)
        write_rows(tmp_path / "data" / "corpus.csv",
                   [make_row(loss="not-a-number")])
        with pytest.raises(PipelineStageError) as err:
            run_pipeline(cfg)
        assert err.value.stage == "load"

    def test_bad_embeddings_fail_in_adjust(self, tmp_path):
        cfg = base_config(tmp_path)
        (tmp_path / "data" / "embeddings.txt").write_text("2 xyz\n")
        with pytest.raises(PipelineStageError) as err:
            run_pipeline(cfg)
        assert err.value.stage == "adjust"

    def test_tag_count_mismatch_fails_in_load(self, tmp_path):
        cfg = base_config(tmp_path)
        with pytest.raises(PipelineStageError) as err:
            run_pipeline(cfg, tags=TagSet.from_labels(["card"]))
        assert err.value.stage == "load"

    def test_infeasible_k_names_its_cluster_stage(self, tmp_path):
        methods = (MethodSpec(method=Method.KMEANS, k=21, label="big"),)
        with pytest.raises(PipelineStageError) as err:
            run_pipeline(base_config(tmp_path, methods=methods))
        assert err.value.stage == "cluster:big"


class TestOutputLock:
    def test_stale_lock_refuses_run(self, tmp_path):
        cfg = base_config(tmp_path)
        out = tmp_path / "run"
        out.mkdir()
        (out / LOCK_NAME).write_text("12345")
        with pytest.raises(RiskTextError, match="lock"):
            run_pipeline(cfg, tags=planted_tags())

    def test_lock_released_after_run(self, tmp_path):
        cfg = base_config(tmp_path)
        run_pipeline(cfg, tags=planted_tags())
        assert not (tmp_path / "run" / LOCK_NAME).exists()
        run_pipeline(cfg, tags=planted_tags())  # rerun succeeds


class TestSweep:
    def test_single_value_matches_direct_run(self, tmp_path):
        cfg = base_config(tmp_path)
        tags = planted_tags()
        direct = run_pipeline(cfg, tags=tags, write=False)
        swept = sensitivity_sweep(cfg, "threshold", [0.8], tags)
        assert swept == [(0.8, direct.validation["kmeans"].accuracy)]

    def test_alpha_sweep_targets_trimmed_method(self, tmp_path):
        methods = (MethodSpec(method=Method.KMEANS, k=2),
                   MethodSpec(method=Method.TRIMMED_KMEANS, k=2,
                              params={"restarts": 50}))
        cfg = base_config(tmp_path, methods=methods)
        tags = planted_tags()
        swept = sensitivity_sweep(cfg, "alpha", [0.0, 0.1], tags)
        assert [v for v, _ in swept] == [0.0, 0.1]
        assert all(0.0 <= acc <= 1.0 for _, acc in swept)

    def test_alpha_sweep_without_trimmed_method_rejected(self, tmp_path):
        cfg = base_config(tmp_path)
        with pytest.raises(ParameterError, match="TRIMMED_KMEANS"):
            sensitivity_sweep(cfg, "alpha", [0.1], planted_tags())

    def test_parameter_and_value_validation(self, tmp_path):
        cfg = base_config(tmp_path)
        tags = planted_tags()
        with pytest.raises(ParameterError):
            sensitivity_sweep(cfg, "rank", [2], tags)
        with pytest.raises(ParameterError):
            sensitivity_sweep(cfg, "threshold", [], tags)
        with pytest.raises(ParameterError):
            sensitivity_sweep(cfg, "threshold", [0.8],
                              TagSet.from_labels([None] * 20))
