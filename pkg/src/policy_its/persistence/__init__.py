"""Pluggable persistence backends for fit artifacts."""

from __future__ import annotations

from pathlib import Path

from policy_its.core.config import PersistenceConfig
from policy_its.persistence.file_backend import FilePersistenceBackend
from policy_its.persistence.memory_backend import MemoryPersistenceBackend
from policy_its.persistence.protocols import IPersistenceBackend


def create_backend(config: PersistenceConfig, default_dir: Path) -> IPersistenceBackend:
    """Backend named by *config*; files go to ``artifact_dir`` or *default_dir*."""
    if config.backend == "memory":
        return MemoryPersistenceBackend()
    return FilePersistenceBackend(config.artifact_dir or default_dir)


__all__ = ["FilePersistenceBackend", "IPersistenceBackend", "MemoryPersistenceBackend", "create_backend"]
