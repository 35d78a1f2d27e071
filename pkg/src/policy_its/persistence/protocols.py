"""Persistence backend protocol for fit artifacts."""

from __future__ import annotations

from typing import Protocol, runtime_checkable


@runtime_checkable
class IPersistenceBackend(Protocol):
    """Text store keyed by artifact name (file, memory)."""

    def save(self, key: str, data: str) -> None:
        """Store *data* under *key*, replacing any previous value."""
        ...

    def load(self, key: str) -> str:
        """Return the text stored under *key*. Raises KeyError if absent."""
        ...

    def exists(self, key: str) -> bool:
        ...

    def delete(self, key: str) -> None:
        """Remove *key*; a missing key is not an error."""
        ...

    def list_keys(self, prefix: str = "") -> list[str]:
        """Sorted keys starting with *prefix*."""
        ...

    def location(self, key: str) -> str:
        """Human-readable location of *key*, recorded in output metadata."""
        ...
