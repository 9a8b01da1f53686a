"""Loss-event corpus loading and text cleaning.

A corpus is a CSV of loss events; the only free-text field is the
description, which :func:`clean` reduces to a token sequence: casefold,
strip everything outside the allowed alphabet, drop stopwords, then map
tokens through a lemma dictionary.
"""

import csv
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal, InvalidOperation
from typing import Callable, Mapping

from .errors import (
    DuplicateKeyError,
    ParameterError,
    RowError,
    SchemaError,
)

MAX_DESCRIPTION_CHARS = 250

BASEL_EVENT_TYPES = (
    "Internal Fraud",
    "External Fraud",
    "Employment Practices and Workplace Safety",
    "Clients, Products & Business Practices",
    "Damage to Physical Assets",
    "Business Disruption and System Failures",
    "Execution, Delivery & Process Management",
)

CORPUS_COLUMNS = ("event_id", "date_accounting", "event_type", "gross_loss",
                  "description")

DEFAULT_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class LossEvent:
    """One operational-loss record."""

    event_id: str
    date_accounting: date
    event_type: str
    gross_loss: Decimal
    description: str


@dataclass(frozen=True)
class CleanDocument:
    """The token sequence a loss description reduces to."""

    event_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class CleaningConfig:
    """Controls for :func:`clean`.

    ``pre_clean_hooks`` run on the raw description before anything else;
    anonymization or language handling plugs in there.  Stopwords must
    already be lowercase tokens of the allowed alphabet.  Lemma values must
    be single tokens of the allowed alphabet, must not be stopwords, and
    must be fixed points of the map itself, so that cleaning its own output
    changes nothing.
    """

    stopwords: frozenset[str] = frozenset()
    lemma_map: Mapping[str, str] = field(default_factory=dict)
    allowed_alphabet: str = DEFAULT_ALPHABET
    pre_clean_hooks: tuple[Callable[[str], str], ...] = ()

    def __post_init__(self):
        if not self.allowed_alphabet:
            raise ParameterError("allowed_alphabet is empty")
        token_re = re.compile(
            "[%s]+$" % re.escape("".join(sorted(set(self.allowed_alphabet)))))
        for word in self.stopwords:
            if not word or word != word.casefold() or not token_re.match(word):
                raise ParameterError(
                    f"stopword {word!r} is not a lowercase token of the "
                    "allowed alphabet")
        for token, lemma in self.lemma_map.items():
            if not lemma or not token_re.match(lemma):
                raise ParameterError(
                    f"lemma for {token!r} is not a token of the allowed "
                    f"alphabet: {lemma!r}")
            if lemma in self.stopwords:
                raise ParameterError(
                    f"lemma {lemma!r} for {token!r} is a stopword")
            if self.lemma_map.get(lemma, lemma) != lemma:
                raise ParameterError(
                    f"lemma {lemma!r} is itself remapped; the map must be "
                    "idempotent")


def load_corpus(path, fmt: str = "csv") -> list[LossEvent]:
    """Read loss events from ``path``, preserving row order.

    Args:
        path: CSV file with columns event_id, date_accounting (ISO date),
            event_type (a Basel event type), gross_loss (non-negative
            decimal) and description (1 to 250 characters).
        fmt: only ``"csv"`` is supported.

    Raises:
        SchemaError: a required column is missing.
        RowError: a row fails validation; the message names the row.
        DuplicateKeyError: two rows share an event_id.
    """
    if fmt != "csv":
        raise ParameterError(f"unsupported corpus format: {fmt!r}")

    events: list[LossEvent] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in CORPUS_COLUMNS:
            if col not in header:
                raise SchemaError(f"missing column: {col}")
        for row_no, row in enumerate(reader, start=1):
            events.append(_parse_row(row_no, row, seen))
    return events


def _parse_row(row_no: int, row: dict, seen: set[str]) -> LossEvent:
    event_id = (row.get("event_id") or "").strip()
    if not event_id:
        raise RowError(row_no, "empty event_id")
    if event_id in seen:
        raise DuplicateKeyError(f"duplicate event_id: {event_id}")
    seen.add(event_id)

    raw_date = (row.get("date_accounting") or "").strip()
    try:
        accounting = date.fromisoformat(raw_date)
    except ValueError:
        raise RowError(row_no, f"bad date_accounting: {raw_date!r}") from None

    event_type = (row.get("event_type") or "").strip()
    if event_type not in BASEL_EVENT_TYPES:
        raise RowError(row_no, f"unknown event_type: {event_type!r}")

    raw_loss = (row.get("gross_loss") or "").strip()
    try:
        gross_loss = Decimal(raw_loss)
    except InvalidOperation:
        raise RowError(row_no, f"bad gross_loss: {raw_loss!r}") from None
    if not gross_loss.is_finite() or gross_loss < 0:
        raise RowError(row_no, f"gross_loss must be >= 0, got {raw_loss}")

    description = row.get("description") or ""
    if not description.strip():
        raise RowError(row_no, "empty description")
    if len(description) > MAX_DESCRIPTION_CHARS:
        raise RowError(
            row_no, f"description longer than {MAX_DESCRIPTION_CHARS} chars")

    return LossEvent(event_id=event_id, date_accounting=accounting,
                     event_type=event_type, gross_loss=gross_loss,
                     description=description)


def clean(event: LossEvent, cfg: CleaningConfig) -> CleanDocument:
    """Reduce a loss description to its cleaned token sequence.

    Order: pre-clean hooks, unicode NFC, casefold, replace every character
    outside the allowed alphabet with a space, split on whitespace, drop
    stopwords, map through the lemma dictionary.  The result may be empty.
    """
    text = event.description
    for hook in cfg.pre_clean_hooks:
        text = hook(text)
    text = unicodedata.normalize("NFC", text).casefold()
    allowed = set(cfg.allowed_alphabet)
    text = "".join(ch if ch in allowed else " " for ch in text)
    tokens = [t for t in text.split() if t not in cfg.stopwords]
    tokens = [cfg.lemma_map.get(t, t) for t in tokens]
    return CleanDocument(event_id=event.event_id, tokens=tuple(tokens))


def load_stopwords(path, alphabet: str = DEFAULT_ALPHABET) -> frozenset[str]:
    """Read a stopword file, one entry per line.

    Entries pass through the same normalization as document text (casefold,
    alphabet filter), so a file entry like ``don't`` contributes the tokens
    it would split into.  Blank lines are skipped.
    """
    allowed = set(alphabet)
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = unicodedata.normalize("NFC", line.strip()).casefold()
            text = "".join(ch if ch in allowed else " " for ch in text)
            words.update(text.split())
    return frozenset(words)


def load_lemma_map(path) -> dict[str, str]:
    """Read a tab-separated token-to-lemma file.

    Args:
        path: UTF-8 file, one ``token<TAB>lemma`` pair per line; blank
            lines are skipped.

    Raises:
        ParameterError: a line does not have exactly two fields, or a
            token is mapped twice to different lemmas.
    """
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ParameterError(
                    f"line {line_no}: expected 'token<TAB>lemma'")
            token = parts[0].strip().casefold()
            lemma = parts[1].strip().casefold()
            if mapping.get(token, lemma) != lemma:
                raise ParameterError(
                    f"line {line_no}: {token!r} mapped to both "
                    f"{mapping[token]!r} and {lemma!r}")
            mapping[token] = lemma
    return mapping
