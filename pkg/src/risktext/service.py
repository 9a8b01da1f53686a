"""Interactive tagging service over run artifacts.

A session wraps one artifact with a mutable tag layer.  Tag commits are
optimistic: the client sends the revision it based its edits on, and a
stale revision is refused with the current one so the client can rebase.
Every accepted commit is appended to a per-session JSONL event log and
fsynced before the server acknowledges, so a restart replays to exactly
the acknowledged state.

The service trusts its callers (it opens artifact paths it is given);
authentication and multi-user isolation are deliberately out of scope.
"""

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import validate as validate_mod
from .cluster import ClusterResult
from .errors import (
    InsufficientTagsError,
    ParameterError,
    RevisionConflictError,
    RiskTextError,
    UnknownDocumentError,
    UnknownMethodError,
    UnknownSessionError,
)
from .pipeline import RunArtifact
from .validate import UNTAGGED, TagSet, ValidationReport

log = logging.getLogger(__name__)

MAX_TAG_CHARS = 100


@dataclass
class Session:
    """One artifact plus its live tag layer."""

    session_id: str
    artifact_path: str
    artifact: RunArtifact
    tags: list
    revision: int = 0
    lock: threading.Lock = dc_field(default_factory=threading.Lock)

    @property
    def doc_index(self) -> dict:
        return {d: i for i, d in enumerate(self.artifact.doc_ids)}

    def tag_set(self) -> TagSet:
        return TagSet.from_labels(self.tags)


class SessionStore:
    """Sessions backed by append-only JSONL logs in one directory."""

    def __init__(self, sessions_dir):
        self.dir = Path(sessions_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._create_lock = threading.Lock()
        self._replay()

    # -- persistence ------------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self.dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, record: dict) -> None:
        with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _replay(self) -> None:
        for path in sorted(self.dir.glob("*.jsonl")):
            try:
                session = self._replay_one(path)
            except (OSError, ValueError, KeyError, RiskTextError) as exc:
                log.warning("skipping session log %s: %s", path.name, exc)
                continue
            self.sessions[session.session_id] = session

    def _replay_one(self, path: Path) -> Session:
        session = None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                if record["event"] == "create":
                    session = self._build_session(
                        record["session_id"], record["artifact_path"])
                elif record["event"] == "tags":
                    index = session.doc_index
                    for edit in record["edits"]:
                        session.tags[index[edit["doc_id"]]] = edit["tag"]
                    session.revision = record["revision"]
                else:
                    raise ValueError(f"unknown event: {record['event']}")
        if session is None:
            raise ValueError("log has no create event")
        return session

    @staticmethod
    def _build_session(session_id: str, artifact_path: str) -> Session:
        artifact = RunArtifact.load(artifact_path)
        tags = [d.get("tag") for d in artifact.documents]
        return Session(session_id=session_id, artifact_path=artifact_path,
                       artifact=artifact, tags=tags)

    # -- operations -------------------------------------------------------

    def create(self, artifact_path: str) -> Session:
        with self._create_lock:
            session_id = uuid.uuid4().hex[:12]
            while session_id in self.sessions:
                session_id = uuid.uuid4().hex[:12]
            try:
                session = self._build_session(session_id, artifact_path)
            except (OSError, ValueError, KeyError) as exc:
                raise ParameterError(
                    f"cannot load artifact {artifact_path}: {exc}") from exc
            self._append(session_id, {"event": "create",
                                      "session_id": session_id,
                                      "artifact_path": artifact_path})
            self.sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(
                f"no session {session_id}") from None

    def apply_tags(self, session_id: str, expected_revision: int,
                   edits: list) -> int:
        """Commit tag edits atomically; returns the new revision."""
        session = self.get(session_id)
        with session.lock:
            if expected_revision != session.revision:
                raise RevisionConflictError(
                    current_revision=session.revision,
                    message=f"expected revision {expected_revision}, "
                            f"server at {session.revision}")
            index = session.doc_index
            staged = []
            for edit in edits:
                doc_id, tag = edit["doc_id"], edit["tag"]
                if doc_id not in index:
                    raise UnknownDocumentError(f"no document {doc_id}")
                if tag is not None and (
                        not isinstance(tag, str) or not tag.strip()
                        or len(tag) > MAX_TAG_CHARS):
                    raise ParameterError(f"bad tag for {doc_id}: {tag!r}")
                staged.append((doc_id,
                               tag.strip() if tag is not None else None))
            new_revision = session.revision + 1
            # the log carries the normalized edits so replay matches memory
            self._append(session_id, {
                "event": "tags", "revision": new_revision,
                "edits": [{"doc_id": d, "tag": t} for d, t in staged]})
            for doc_id, tag in staged:
                session.tags[index[doc_id]] = tag
            session.revision = new_revision
            return new_revision

    def validate_session(self, session_id: str,
                         method_label: str) -> ValidationReport:
        """Accuracy and silhouette over the currently tagged documents."""
        session = self.get(session_id)
        result = self._result(session, method_label)
        with session.lock:
            tags = list(session.tags)
        tagged = [i for i, t in enumerate(tags) if t is not UNTAGGED]
        if len({tags[i] for i in tagged}) < 2:
            raise InsufficientTagsError(
                "validation needs at least two distinct tags")

        sub_tags = TagSet.from_labels([tags[i] for i in tagged])
        sub_result = ClusterResult(
            method=result.method, k=result.k,
            assignment=result.assignment[tagged],
            objective=result.objective, seed=result.seed)
        report = validate_mod.accuracy(sub_result, sub_tags)
        try:
            coords = session.artifact.projection.coords[tagged]
            index_value, per_point = validate_mod.silhouette(
                coords, sub_result)
            report.silhouette_index = index_value
            report.per_point_silhouette = per_point
        except RiskTextError:
            pass  # fewer than two populated clusters among tagged docs
        return report

    @staticmethod
    def _result(session: Session, method_label: str) -> ClusterResult:
        try:
            return session.artifact.results[method_label]
        except KeyError:
            raise UnknownMethodError(
                f"no clustering result {method_label!r}") from None


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

class CreateSessionBody(BaseModel):
    artifact_path: str


class TagEdit(BaseModel):
    doc_id: str
    tag: str | None = None


class TagCommitBody(BaseModel):
    expected_revision: int
    edits: list[TagEdit] = Field(default_factory=list)


class ValidateBody(BaseModel):
    method: str


_STATUS_OF = (
    (RevisionConflictError, 409, "revision_conflict"),
    (UnknownSessionError, 404, "not_found"),
    (UnknownDocumentError, 404, "not_found"),
    (UnknownMethodError, 404, "not_found"),
    (InsufficientTagsError, 422, "insufficient_tags"),
)


def _error_response(exc: RiskTextError) -> JSONResponse:
    for klass, status, code in _STATUS_OF:
        if isinstance(exc, klass):
            body = {"code": code, "message": str(exc)}
            if isinstance(exc, RevisionConflictError):
                body["current_revision"] = exc.current_revision
            return JSONResponse(status_code=status, content=body)
    return JSONResponse(status_code=400,
                        content={"code": "bad_request", "message": str(exc)})


def _session_summary(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "revision": session.revision,
        "doc_count": len(session.artifact.doc_ids),
        "methods": list(session.artifact.results.keys()),
        "tag_names": list(session.tag_set().tag_names),
        "weighting": session.artifact.weighting,
    }


def create_app(store: SessionStore, static_dir=None) -> FastAPI:
    """Wire a SessionStore into the HTTP interface."""
    app = FastAPI(title="risktext tagging service")

    @app.exception_handler(RiskTextError)
    async def on_risktext_error(request, exc):
        return _error_response(exc)

    @app.get("/sessions")
    def list_sessions():
        return [_session_summary(s) for s in store.sessions.values()]

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = store.create(body.artifact_path)
        return _session_summary(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_summary(store.get(session_id))

    @app.get("/sessions/{session_id}/projection")
    def get_projection(session_id: str):
        session = store.get(session_id)
        coords = session.artifact.projection.coords
        with session.lock:
            tags = list(session.tags)
        return [
            {"doc_id": doc_id, "v1": float(x), "v2": float(y), "tag": tag}
            for doc_id, (x, y), tag in zip(session.artifact.doc_ids,
                                           coords, tags)
        ]

    @app.get("/sessions/{session_id}/clusters/{method}")
    def get_clusters(session_id: str, method: str):
        session = store.get(session_id)
        result = SessionStore._result(session, method)
        return json.loads(result.to_json())

    @app.get("/sessions/{session_id}/documents/{doc_id}")
    def get_document(session_id: str, doc_id: str):
        session = store.get(session_id)
        index = session.doc_index
        if doc_id not in index:
            raise UnknownDocumentError(f"no document {doc_id}")
        doc = session.artifact.documents[index[doc_id]]
        with session.lock:
            tag = session.tags[index[doc_id]]
        return {"doc_id": doc_id, "description": doc["description"],
                "tokens": doc["tokens"], "tag": tag}

    @app.post("/sessions/{session_id}/tags")
    def commit_tags(session_id: str, body: TagCommitBody):
        revision = store.apply_tags(
            session_id, body.expected_revision,
            [{"doc_id": e.doc_id, "tag": e.tag} for e in body.edits])
        return {"revision": revision}

    @app.post("/sessions/{session_id}/validate")
    def validate_session(session_id: str, body: ValidateBody):
        report = store.validate_session(session_id, body.method)
        return report.to_dict()

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True),
                  name="ui")

    return app


def serve(sessions_dir, host: str = "127.0.0.1", port: int = 8080,
          static_dir=None) -> None:  # pragma: no cover - thin uvicorn shim
    import uvicorn

    app = create_app(SessionStore(sessions_dir), static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)
