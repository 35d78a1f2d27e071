"""File persistence backend: one ``<key>.fit.json`` per artifact."""

from __future__ import annotations

import logging
import os
from pathlib import Path

log = logging.getLogger(__name__)

ARTIFACT_SUFFIX = ".fit.json"


class FilePersistenceBackend:
    """Stores artifacts as JSON files in one directory.

    Writes go through a temporary file and ``os.replace`` so a crashed run
    never leaves a truncated artifact behind.
    """

    def __init__(self, base_path: Path) -> None:
        self._base = base_path
        self._base.mkdir(parents=True, exist_ok=True)

    @property
    def base_path(self) -> Path:
        return self._base

    def path_for(self, key: str) -> Path:
        safe_key = key.replace("/", "_").replace("\\", "_")
        return self._base / f"{safe_key}{ARTIFACT_SUFFIX}"

    def save(self, key: str, data: str) -> None:
        path = self.path_for(key)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(data, encoding="utf-8")
        os.replace(tmp, path)
        log.debug("Saved artifact %s to %s", key, path)

    def load(self, key: str) -> str:
        path = self.path_for(key)
        if not path.is_file():
            raise KeyError(f"No artifact {key!r} (looked for {path})")
        return path.read_text(encoding="utf-8")

    def exists(self, key: str) -> bool:
        return self.path_for(key).is_file()

    def delete(self, key: str) -> None:
        self.path_for(key).unlink(missing_ok=True)

    def list_keys(self, prefix: str = "") -> list[str]:
        keys = [p.name[: -len(ARTIFACT_SUFFIX)] for p in self._base.glob(f"*{ARTIFACT_SUFFIX}")]
        return sorted(k for k in keys if k.startswith(prefix))

    def location(self, key: str) -> str:
        return str(self.path_for(key))
