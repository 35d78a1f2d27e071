"""Save and load fitted posteriors, keyed by intervention-definition label."""

from __future__ import annotations

import hashlib
import logging

from pydantic import ValidationError

from policy_its.core.exceptions import ArtifactError
from policy_its.inference.fitted import FitArtifact, FittedPosterior
from policy_its.persistence.protocols import IPersistenceBackend

log = logging.getLogger(__name__)


class ArtifactStore:
    """``FittedPosterior`` <-> versioned JSON artifact on a persistence backend."""

    def __init__(self, backend: IPersistenceBackend) -> None:
        self._backend = backend

    @property
    def backend(self) -> IPersistenceBackend:
        return self._backend

    def exists(self, label: str) -> bool:
        return self._backend.exists(label)

    def labels(self) -> list[str]:
        return self._backend.list_keys()

    def location(self, label: str) -> str:
        return self._backend.location(label)

    def save(self, fitted: FittedPosterior) -> str:
        """Persist under the manifest's definition label; returns the location."""
        label = fitted.manifest.definition
        if not label:
            raise ArtifactError("Fit has no intervention-definition label to store it under")
        text = fitted.to_artifact().model_dump_json(indent=1) + "\n"
        self._backend.save(label, text)
        location = self._backend.location(label)
        log.info("Saved fit artifact %s (%d draws, sha256 %s) to %s", label, fitted.n_draws, _sha(text)[:12], location)
        return location

    def load(self, label: str) -> FittedPosterior:
        try:
            text = self._backend.load(label)
        except KeyError as exc:
            raise ArtifactError(f"No fit artifact for {label!r}; run `policy-its fit` first") from exc
        try:
            artifact = FitArtifact.model_validate_json(text)
        except ValidationError as exc:
            raise ArtifactError(f"Fit artifact {label!r} is unreadable: {exc}") from exc
        log.info("Loaded fit artifact %s from %s", label, self._backend.location(label))
        return FittedPosterior.from_artifact(artifact)

    def digest(self, label: str) -> str:
        """sha256 of the stored artifact text."""
        try:
            return _sha(self._backend.load(label))
        except KeyError as exc:
            raise ArtifactError(f"No fit artifact for {label!r}") from exc


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
