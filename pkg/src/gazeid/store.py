"""Persistent enrollment database: user name -> biometric templates.

A single human-readable JSON file; writes go to a temp file in the same
directory followed by an atomic rename, so readers always see either the
old or the new store, never a torn one.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import ModelMismatchError, NotFoundError, StoreFormatError, ValidationError
from .network import Embedding

STORE_FORMAT_VERSION = 1
MAX_NAME_LEN = 64


@dataclass
class TemplateRecord:
    name: str
    embeddings: list[Embedding] = field(default_factory=list)
    enrolled_at: list[str] = field(default_factory=list)


class TemplateStore:
    """Single-writer, multi-reader store bound to one model_id."""

    def __init__(self, path, model_id: str | None = None):
        self.path = str(path)
        self.model_id = model_id
        self.records: dict[str, TemplateRecord] = {}
        if os.path.exists(self.path):
            self._load()

    # -- persistence -------------------------------------------------------

    def _load(self) -> None:
        with open(self.path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if data.get("format_version") != STORE_FORMAT_VERSION:
            raise StoreFormatError(
                f"unknown store format_version: {data.get('format_version')}"
            )
        self.model_id = data["model_id"]
        self.records = {}
        for u in data["users"]:
            rec = TemplateRecord(name=u["name"], enrolled_at=list(u["enrolled_at"]))
            rec.embeddings = [
                Embedding(v=np.array(v, dtype=np.float64), model_id=self.model_id)
                for v in u["embeddings"]
            ]
            self.records[rec.name] = rec

    def save(self) -> None:
        data = {
            "format_version": STORE_FORMAT_VERSION,
            "model_id": self.model_id,
            "users": [
                {
                    "name": r.name,
                    "enrolled_at": r.enrolled_at,
                    "embeddings": [e.v.tolist() for e in r.embeddings],
                }
                for r in self.records.values()
            ],
        }
        dirname = os.path.dirname(os.path.abspath(self.path)) or "."
        fd, tmp = tempfile.mkstemp(prefix=".store-", dir=dirname)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(data, f)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- operations --------------------------------------------------------

    def enroll(self, name: str, embedding: Embedding, when: str | None = None) -> None:
        if not name or len(name) > MAX_NAME_LEN:
            raise ValidationError("name must be 1..64 characters")
        if self.model_id is None and not self.records:
            self.model_id = embedding.model_id
        if embedding.model_id != self.model_id:
            raise ModelMismatchError(
                f"embedding model {embedding.model_id} != store model {self.model_id}"
            )
        rec = self.records.setdefault(name, TemplateRecord(name=name))
        rec.embeddings.append(embedding)
        rec.enrolled_at.append(when or datetime.now(timezone.utc).isoformat())
        self.save()

    def lookup(self, name: str) -> TemplateRecord:
        if name not in self.records:
            raise NotFoundError(f"user not enrolled: {name}")
        return self.records[name]

    def list_users(self) -> list[tuple[str, int]]:
        return [(r.name, len(r.embeddings)) for r in self.records.values()]

    def delete_user(self, name: str) -> None:
        if name not in self.records:
            raise NotFoundError(f"user not enrolled: {name}")
        del self.records[name]
        self.save()
