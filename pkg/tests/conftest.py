"""Shared fixtures: tiny corpora, the worked two-document pair, file writers."""

import csv
from pathlib import Path

import numpy as np
import pytest

from risktext import kernels
from risktext.corpus import CleaningConfig, LossEvent, clean, load_corpus
from risktext.synth import generate_corpus, write_corpus
from risktext.vectorize import build_tf

CORPUS_HEADER = ["event_id", "date_accounting", "event_type", "gross_loss",
                 "description"]

OK_TYPE = "External Fraud"


def write_rows(path: Path, rows, header=None) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CORPUS_HEADER if header is None else header)
        writer.writerows(rows)
    return path


def make_row(event_id="EV1", date="2020-03-02", etype=OK_TYPE,
             loss="125000.00", description="Stolen card used abroad."):
    return [event_id, date, etype, loss, description]


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Touch every jitted kernel once so compile time stays out of tests."""
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]])
    init = np.array([[0.0, 0.0], [5.0, 5.0]])
    kernels.concentration_single(pts, init, 0, 50)
    kernels.concentration_single(pts, init, 1, 50)
    kernels.spherical_single(pts + 1.0, init + 1.0, 50)
    counts = np.array([[2.0, 0.0, 1.0], [0.0, 3.0, 1.0]])
    kernels.lda_gibbs(np.repeat(np.array([0, 0, 0, 1, 1, 1, 1]), 1),
                      np.array([0, 0, 2, 1, 1, 1, 2]), 2, 3, 2,
                      0.1, 0.05, 10, 5, 0)
    sim = np.eye(3)
    kernels.semantic_adjust_matrix(counts, sim)
    kernels.silhouette_samples(pts, np.array([0, 0, 1, 1], dtype=np.int64), 2)


@pytest.fixture(scope="session")
def card_pair_corpus(tmp_path_factory):
    """The two descriptions whose similarity the whole method is built on."""
    root = tmp_path_factory.mktemp("pair")
    path = write_rows(root / "corpus.csv", [
        make_row("d1", description="The customer lost his credit card."),
        make_row("d2", description="The client mislaid her credit card."),
    ])
    return path


@pytest.fixture(scope="session")
def card_pair_config():
    return CleaningConfig(stopwords=frozenset({"the"}), lemma_map={})


@pytest.fixture(scope="session")
def card_pair_tf(card_pair_corpus, card_pair_config):
    events = load_corpus(card_pair_corpus)
    docs = [clean(e, card_pair_config) for e in events]
    return build_tf(docs)


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    """The standard 300-document planted corpus, written once per session."""
    root = tmp_path_factory.mktemp("synth")
    corpus = generate_corpus(n_docs=300, seed=7)
    return write_corpus(corpus, root)


@pytest.fixture(scope="session")
def synth_outlier_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth_outliers")
    corpus = generate_corpus(n_docs=300, seed=7, outlier_rate=0.02)
    return write_corpus(corpus, root)


CARD_WORDS = ("terminal", "skimming", "card", "atm", "cloning", "pin")
WIRE_WORDS = ("wire", "transfer", "settlement", "swift", "routing", "ledger")


def small_artifact(tmp_path, n_docs=20, seed=3, k=2):
    """A tiny finished pipeline run over two hand-planted word groups."""
    from risktext.cluster import Method
    from risktext.pipeline import MethodSpec, PipelineConfig, run_pipeline

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
    cfg = PipelineConfig(
        corpus_path=str(corpus_path),
        stopword_path=str(data / "stopwords.txt"),
        embedding_path=str(data / "embeddings.txt"),
        methods=(MethodSpec(method=Method.KMEANS, k=k,
                            params={"restarts": 50}),),
        output_dir=str(tmp_path / "run"))
    return run_pipeline(cfg)
