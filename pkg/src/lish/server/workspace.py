"""File-backed workspace: one document per ``<id>.lish.json`` file.

The on-disk file is always the serialization of the latest accepted
version (write to a temp file, then atomically replace), so a crash at
any point leaves a parseable, valid file.  Commands on one document are
serialized by a per-document lock; documents never block each other.
"""

from __future__ import annotations

import asyncio
import os
import re
import tempfile
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .. import edit
from ..model import Document, parse_json, serialize_json

HISTORY_LIMIT = 50

_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*$")


class UnknownDocument(KeyError):
    pass


class VersionConflict(Exception):
    def __init__(self, current_version: int):
        super().__init__(f"expected version does not match current {current_version}")
        self.current_version = current_version


@dataclass
class DocState:
    doc: Document
    history: deque[tuple[int, bytes]] = field(default_factory=lambda: deque(maxlen=HISTORY_LIMIT))
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


class Workspace:
    def __init__(self, root_dir: str | FsPath):
        self.root = FsPath(root_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._states: dict[str, DocState] = {}
        self._subscribers: list[asyncio.Queue] = []

    def _file_for(self, doc_id: str) -> FsPath:
        if not _ID_RE.match(doc_id):
            raise UnknownDocument(doc_id)
        return self.root / f"{doc_id}.lish.json"

    def list_ids(self) -> list[str]:
        ids = {p.name[: -len(".lish.json")] for p in self.root.glob("*.lish.json")}
        ids.update(self._states)
        return sorted(ids)

    def get_state(self, doc_id: str) -> DocState:
        state = self._states.get(doc_id)
        if state is None:
            path = self._file_for(doc_id)
            if not path.exists():
                raise UnknownDocument(doc_id)
            doc = parse_json(path.read_bytes(), doc_id=doc_id)
            state = DocState(doc=doc)
            state.history.append((doc.version, serialize_json(doc)))
            self._states[doc_id] = state
        return state

    def apply_batch(self, state: DocState, expected_version: int, commands: list[dict]) -> edit.EditResult:
        """Apply a command batch atomically; the caller holds the lock.

        Raises VersionConflict or lets edit errors propagate; the state is
        only updated (and the file only replaced) when every command
        succeeded.
        """
        if expected_version != state.doc.version:
            raise VersionConflict(state.doc.version)
        doc = state.doc
        diagnostics: list[str] = []
        steps: list[Document] = []
        for entry in commands:
            result = edit.apply(doc, edit.command_from_json(entry))
            doc = result.doc
            diagnostics.extend(result.diagnostics)
            steps.append(doc)
        self._persist(doc)
        state.doc = doc
        for step in steps:
            state.history.append((step.version, serialize_json(step)))
        self.publish({"id": doc.id, "version": doc.version})
        return edit.EditResult(doc, tuple(diagnostics))

    def _persist(self, doc: Document) -> None:
        target = self._file_for(doc.id)
        data = serialize_json(doc)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{doc.id}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # --- change notification -------------------------------------------

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self._subscribers.append(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        if queue in self._subscribers:
            self._subscribers.remove(queue)

    def publish(self, event: dict) -> None:
        for queue in list(self._subscribers):
            queue.put_nowait(event)
