"""Single-file project-draft store backing the UI workflow.

Drafts live in one JSON file under the data directory; writes are
serialized by a lock and land atomically, reads hand out snapshots.
Component selections are validated against the trained vocabulary when
one is supplied.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass

from .errors import DraftNotFoundError, VocabularyError
from .persistence import write_text_atomic


@dataclass(frozen=True)
class ProjectDraft:
    id: str
    name: str
    selected_components: tuple
    sketch: str
    updated_at: float

    def to_obj(self):
        return {
            "id": self.id,
            "name": self.name,
            "selected_components": list(self.selected_components),
            "sketch": self.sketch,
            "updated_at": self.updated_at,
        }


class ProjectStore:
    """CRUD over ProjectDrafts persisted to <data_dir>/projects.json."""

    def __init__(self, path, vocabulary=None, clock=time.time):
        self._path = os.fspath(path)
        self._vocabulary = set(vocabulary) if vocabulary is not None else None
        self._clock = clock
        self._lock = threading.Lock()
        self._state = {"next_id": 1, "drafts": {}}
        if os.path.exists(self._path):
            with open(self._path, "r", encoding="utf-8") as fh:
                self._state = json.load(fh)

    def _persist(self):
        write_text_atomic(self._path, json.dumps(self._state, indent=1, sort_keys=True))

    def _check_components(self, components):
        components = sorted(set(components))
        if self._vocabulary is not None:
            unknown = [c for c in components if c not in self._vocabulary]
            if unknown:
                raise VocabularyError(unknown)
        return components

    def _draft_from_obj(self, obj):
        return ProjectDraft(
            id=obj["id"],
            name=obj["name"],
            selected_components=tuple(obj["selected_components"]),
            sketch=obj["sketch"],
            updated_at=obj["updated_at"],
        )

    def create(self, name, selected_components=(), sketch="") -> ProjectDraft:
        components = self._check_components(selected_components)
        with self._lock:
            draft_id = f"d{self._state['next_id']:06d}"
            self._state["next_id"] += 1
            obj = {
                "id": draft_id,
                "name": str(name),
                "selected_components": components,
                "sketch": str(sketch),
                "updated_at": self._clock(),
            }
            self._state["drafts"][draft_id] = obj
            self._persist()
            return self._draft_from_obj(obj)

    def get(self, draft_id) -> ProjectDraft:
        obj = self._state["drafts"].get(draft_id)
        if obj is None:
            raise DraftNotFoundError(draft_id)
        return self._draft_from_obj(obj)

    def list(self):
        return [self._draft_from_obj(o) for _, o in sorted(self._state["drafts"].items())]

    def update(self, draft_id, name=None, selected_components=None, sketch=None) -> ProjectDraft:
        with self._lock:
            obj = self._state["drafts"].get(draft_id)
            if obj is None:
                raise DraftNotFoundError(draft_id)
            if selected_components is not None:
                obj["selected_components"] = self._check_components(selected_components)
            if name is not None:
                obj["name"] = str(name)
            if sketch is not None:
                obj["sketch"] = str(sketch)
            obj["updated_at"] = self._clock()
            self._persist()
            return self._draft_from_obj(obj)

    def delete(self, draft_id):
        with self._lock:
            if draft_id not in self._state["drafts"]:
                raise DraftNotFoundError(draft_id)
            del self._state["drafts"][draft_id]
            self._persist()

    def get_sketch(self, draft_id) -> str:
        return self.get(draft_id).sketch

    def put_sketch(self, draft_id, text) -> ProjectDraft:
        return self.update(draft_id, sketch=text)
