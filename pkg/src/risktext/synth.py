"""Seeded synthetic loss corpus with known topic structure.

Three planted topics.  Each topic owns four synonym-pair concepts; half of
the topic's documents use one variant, half the other, and the two never
co-occur, so nothing in the raw counts reveals they mean the same thing.
Only the bundled embedding file does: pair words get vectors whose cosine
sits just above 0.8, which is what makes the similarity threshold bite.
Because the variants carry the entire topic signal, clustering quality
tracks whether the threshold admits them.

Surface vocabulary is arranged against the topics.  The six (topic, half)
groups sit on a cycle; each group draws generic banking words from a
three-word window into a shared pool, and consecutive windows overlap by
two words while a topic's own two halves share none.  Each adjacent pair
on the cycle also shares a small pool of rare jargon.  With the synonym
bridge closed (threshold above 0.82) the halves therefore glue to the
wrong neighbours and accuracy collapses; with it open they fuse into the
planted topics.  Embeddings additionally relate a few concept words
*across* topics at cosines between 0.71 and 0.75, so dropping the
threshold to 0.70 smears topics together.  Accuracy consequently peaks at
an interior threshold.

A handful of documents per topic are jargon-heavy.  Under TF the extra
rare words are background noise; under TF-IDF their weights blow up by
the log of the corpus size and swamp the topic signal of those documents,
which measurably hurts accuracy, mirroring how inverse document frequency
overrewards rarity on short texts.
"""

import itertools
from dataclasses import dataclass
from datetime import date, timedelta
from decimal import Decimal
from pathlib import Path

import numpy as np

from .corpus import LossEvent

GLUE = ("the", "a", "an", "of", "on", "in", "for", "to", "with", "was",
        "were", "is", "are", "by", "at", "and", "or", "over", "after",
        "from", "via", "under", "due", "been", "has", "had", "eur")

# shared pool behind the per-half windows; every word is topic-neutral
OVERLAP_POOL = ("account", "branch", "payment", "statement", "process",
                "record")


@dataclass(frozen=True)
class Topic:
    name: str
    concepts: tuple[tuple[str, str], ...]
    event_type: str


TOPICS = (
    Topic(name="billing",
          concepts=(("calculation", "computation"),
                    ("dispute", "litigation"),
                    ("overcharge", "surcharge"),
                    ("refund", "reimbursement")),
          event_type="Clients, Products & Business Practices"),
    Topic(name="settlement",
          concepts=(("conversion", "exchange"),
                    ("transfer", "remittance"),
                    ("clearing", "netting"),
                    ("valuation", "appraisal")),
          event_type="Execution, Delivery & Process Management"),
    Topic(name="cards",
          concepts=(("theft", "larceny"),
                    ("withdrawal", "disbursement"),
                    ("skimming", "cloning"),
                    ("counterfeit", "forgery")),
          event_type="External Fraud"),
)

SYNONYM_COSINE = 0.82

# cross-topic bridges, all in [0.70, 0.75): admitted only when the
# threshold drops to 0.70.  side 0 relates the two first variants, side 1
# the two second variants, so both halves of a topic feel the smear.
# fields: (topic_a, concept_a, topic_b, concept_b, side, cosine)
NOISE_BRIDGES = (
    (0, 0, 1, 0, 0, 0.715),
    (0, 1, 1, 1, 1, 0.725),
    (1, 2, 2, 0, 0, 0.720),
    (1, 3, 2, 1, 1, 0.730),
    (2, 2, 0, 2, 0, 0.735),
    (2, 3, 0, 3, 1, 0.740),
)

EDGE_POOL_SIZE = 20          # rare jargon words per adjacent half pair
N_EDGES = 6
HEAVY_STRIDE = 24            # every 24th document of a topic is jargon-heavy


def _rare_pool() -> tuple[str, ...]:
    syllables = ("ba", "be", "bo", "da", "de", "do", "ga", "ge", "go",
                 "ka", "ke", "ko", "la", "le", "lo", "ma", "me", "mo",
                 "na", "ne", "no", "pa", "pe", "po", "ra", "re", "ro",
                 "sa", "se", "so", "ta", "te", "to", "va", "ve", "vo")
    words = []
    for a, b, c in itertools.product(syllables, repeat=3):
        if a != b and b != c:
            words.append(a + b + c)
        if len(words) == EDGE_POOL_SIZE * N_EDGES:
            break
    return tuple(words)


RARE_WORDS = _rare_pool()


@dataclass(frozen=True)
class SyntheticCorpus:
    events: tuple
    tags: dict
    embedding_lines: tuple
    stopwords: tuple


def _description(rng, tokens) -> str:
    """Dress a token bag up as a one-line loss description."""
    tokens = list(tokens)
    rng.shuffle(tokens)
    words = []
    for tok in tokens:
        if rng.random() < 0.3:
            words.append(GLUE[int(rng.integers(len(GLUE)))])
        words.append(tok)
    if rng.random() < 0.4:
        words.append("eur")
        words.append(str(int(rng.integers(500, 250000))))
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    cut = rng.random()
    if cut < 0.25 and len(words) > 6:
        mid = len(text) // 2
        space = text.find(" ", mid)
        if space > 0:
            text = text[:space] + ";" + text[space:]
    return text + "."


def _embedding_lines() -> tuple:
    """Four-word vector group per bridge, each in its own 4-D subspace.

    The group holds two synonym pairs (a1, b1) and (a2, b2) chained so the
    within-pair cosines are exactly SYNONYM_COSINE, the bridged cross pair
    is exactly the bridge cosine, and every other cross cosine lands near
    0.5-0.61, below any threshold this corpus is meant to be swept with.
    """
    s = float(np.sqrt(1.0 - SYNONYM_COSINE ** 2))
    dim = 4 * len(NOISE_BRIDGES)
    rows = {}
    for g, (ta, ca, tb, cb, side, w) in enumerate(NOISE_BRIDGES):
        r = float(np.sqrt(1.0 - w * w))
        base = 4 * g
        a1 = np.zeros(dim)
        b1 = np.zeros(dim)
        a2 = np.zeros(dim)
        b2 = np.zeros(dim)
        a1[base] = 1.0
        b1[base] = SYNONYM_COSINE
        b1[base + 1] = s
        if side == 0:
            a2[base] = w
            a2[base + 2] = r
            b2[:] = SYNONYM_COSINE * a2
            b2[base + 3] = s
        else:
            b2[:] = w * b1
            b2[base + 2] = r
            a2[:] = SYNONYM_COSINE * b2
            a2[base + 3] = s
        rows[TOPICS[ta].concepts[ca][0]] = a1
        rows[TOPICS[ta].concepts[ca][1]] = b1
        rows[TOPICS[tb].concepts[cb][0]] = a2
        rows[TOPICS[tb].concepts[cb][1]] = b2
    lines = [f"{len(rows)} {dim}"]
    for word, vec in rows.items():
        lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
    return tuple(lines)


def _outlier_tokens() -> list:
    """A short but massively repetitive bag: huge norm, generic direction."""
    tokens = []
    for word in OVERLAP_POOL:
        tokens.extend([word] * 3)
    for topic in TOPICS:
        tokens.extend([topic.concepts[0][0]] * 2)
    return tokens


def generate_corpus(n_docs: int = 300, seed: int = 7,
                    outlier_rate: float = 0.0) -> SyntheticCorpus:
    """Build a corpus of ``n_docs`` short loss events over three topics.

    Deterministic in the arguments.  Every regular document is tagged with
    its topic name; topic sizes differ slightly so accuracy is sensitive
    to merged or split clusters.  ``outlier_rate`` appends that fraction
    of untagged runaway documents whose vectors dwarf the rest, for
    exercising trimmed clustering.
    """
    if n_docs < 60:
        raise ValueError("need at least 60 documents for stable structure")
    rng = np.random.default_rng(seed)
    shares = (0.40, 0.33, 0.27)
    sizes = [int(round(n_docs * s)) for s in shares]
    sizes[2] = n_docs - sizes[0] - sizes[1]

    events = []
    tags = {}
    serial = 0
    start = date(2018, 1, 3)

    def emit(tokens, event_type, tag, loss_mu=12.2):
        nonlocal serial
        event_id = f"EV{serial:05d}"
        serial += 1
        events.append(LossEvent(
            event_id=event_id,
            date_accounting=start + timedelta(days=int(rng.integers(0, 1460))),
            event_type=event_type,
            gross_loss=Decimal(
                f"{1e5 + float(np.exp(rng.normal(loss_mu, 1.1))):.2f}"),
            description=_description(rng, tokens),
        ))
        if tag is not None:
            tags[event_id] = tag

    for t, (topic, size) in enumerate(zip(TOPICS, sizes)):
        for j in range(size):
            half = 0 if j < size // 2 else 1
            cycle = t + 3 * half
            heavy = j % HEAVY_STRIDE == 5

            tokens = []
            n_concepts = 2 if heavy else 3
            chosen = rng.choice(len(topic.concepts), size=n_concepts,
                                replace=False)
            for c in chosen:
                tokens.append(topic.concepts[c][half])
            if not heavy and rng.random() < 0.25:
                tokens.append(topic.concepts[chosen[0]][half])

            window = [OVERLAP_POOL[(cycle + i) % len(OVERLAP_POOL)]
                      for i in range(3)]
            for i in rng.choice(3, size=2, replace=False):
                tokens.append(window[i])

            edge_pool = [RARE_WORDS[e * EDGE_POOL_SIZE + i]
                         for e in ((cycle - 1) % N_EDGES, cycle)
                         for i in range(EDGE_POOL_SIZE)]
            n_rare = 6 if heavy else int(rng.integers(1, 3))
            for i in rng.choice(len(edge_pool), size=n_rare, replace=False):
                tokens.append(edge_pool[i])

            emit(tokens, topic.event_type, topic.name)

    for _ in range(int(round(n_docs * outlier_rate))):
        emit(_outlier_tokens(), "Execution, Delivery & Process Management",
             None, loss_mu=14.0)

    order = rng.permutation(len(events))
    events = tuple(events[i] for i in order)
    return SyntheticCorpus(events=events, tags=tags,
                           embedding_lines=_embedding_lines(),
                           stopwords=tuple(sorted(set(GLUE))))


def write_corpus(corpus: SyntheticCorpus, out_dir) -> dict:
    """Write corpus.csv, tags.csv, stopwords.txt and embeddings.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.{ext}"
             for name, ext in (("corpus", "csv"), ("tags", "csv"),
                               ("stopwords", "txt"), ("embeddings", "txt"))}

    import csv

    with open(paths["corpus"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_id", "date_accounting", "event_type",
                         "gross_loss", "description"])
        for event in corpus.events:
            writer.writerow([event.event_id, event.date_accounting.isoformat(),
                             event.event_type, str(event.gross_loss),
                             event.description])

    with open(paths["tags"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_id", "tag"])
        for event in corpus.events:
            if event.event_id in corpus.tags:
                writer.writerow([event.event_id, corpus.tags[event.event_id]])

    with open(paths["stopwords"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(corpus.stopwords) + "\n")

    with open(paths["embeddings"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(corpus.embedding_lines) + "\n")

    return {name: str(path) for name, path in paths.items()}
