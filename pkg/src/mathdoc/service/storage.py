"""JSON-backed stores with write-through persistence.

Every mutation rewrites the backing file atomically (temp file +
rename), so a crash never leaves a half-written store.  The graph
store enforces the single-writer contract with a lock; readers get
consistent snapshots because mutations replace whole files.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Callable, Optional

from .. import modelkg, workflowdoc
from ..modelkg import KnowledgeGraph
from ..workflowdoc import DocumentationSession, QuestionnaireTemplate


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class KgStore:
    """Serialized access to one knowledge graph persisted as JSON."""

    def __init__(self, path: Path, id_factory: Optional[Callable[[], str]] = None):
        self.path = path
        self.lock = threading.RLock()
        if path.exists():
            self.graph = modelkg.import_json(path.read_bytes(), id_factory=id_factory)
        else:
            self.graph = KnowledgeGraph(id_factory=id_factory)
            self._persist()

    def _persist(self) -> None:
        _atomic_write(self.path, modelkg.export_json(self.graph))

    def mutate(self, fn: Callable[[KnowledgeGraph], object]) -> object:
        """Run a mutation under the writer lock; persist iff it succeeded."""
        with self.lock:
            result = fn(self.graph)
            self._persist()
            return result

    def read(self, fn: Callable[[KnowledgeGraph], object]) -> object:
        with self.lock:
            return fn(self.graph)

    def replace(self, graph: KnowledgeGraph) -> None:
        with self.lock:
            self.graph = graph
            self._persist()


class SessionStore:
    """Documentation sessions persisted next to the graph so the CLI
    can resume them across invocations."""

    def __init__(self, path: Path, template: QuestionnaireTemplate):
        self.path = path
        self.template = template
        self.lock = threading.RLock()
        self.sessions: dict[str, DocumentationSession] = {}
        if path.exists():
            doc = json.loads(path.read_text("utf-8"))
            for raw in doc.get("sessions", []):
                session = workflowdoc.session_from_dict(raw, template)
                self.sessions[session.session_id] = session
        else:
            self._persist()

    def _persist(self) -> None:
        doc = {
            "schema": "mathdoc-sessions/1",
            "sessions": [
                workflowdoc.session_to_dict(self.sessions[k]) for k in sorted(self.sessions)
            ],
        }
        _atomic_write(self.path, (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode())

    def add(self, session: DocumentationSession) -> None:
        with self.lock:
            self.sessions[session.session_id] = session
            self._persist()

    def get(self, session_id: str) -> Optional[DocumentationSession]:
        with self.lock:
            return self.sessions.get(session_id)

    def save(self) -> None:
        with self.lock:
            self._persist()
