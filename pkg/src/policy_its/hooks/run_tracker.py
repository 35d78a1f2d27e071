"""Per-run stage timing tracked through ContextVars.

Opt-in and zero overhead when no run is active::

    analytics = start_run(label="awareness_25")
    with track_stage("fit") as stage:
        stage.items = 25
    analytics = end_run()
    print(analytics.total_duration_ms)
"""

from __future__ import annotations

import logging
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Generator, Literal

import structlog
from pydantic import BaseModel, Field

log = logging.getLogger(__name__)


class StageMetrics(BaseModel):
    """Timing and counts for one pipeline stage (ingest, fit, effects, ...)."""

    stage: str
    started_at: datetime | None = None
    ended_at: datetime | None = None
    duration_ms: float = 0.0
    items: int = 0
    failed: bool = False
    error: str = ""


class RunAnalytics(BaseModel):
    """Aggregate timings for a single command invocation."""

    run_id: str
    label: str = ""
    started_at: datetime
    ended_at: datetime | None = None
    total_duration_ms: float = 0.0
    stages: list[StageMetrics] = Field(default_factory=list)
    status: Literal["running", "completed", "failed"] = "running"

    def finalize(self) -> None:
        self.ended_at = datetime.now(timezone.utc)
        self.total_duration_ms = (self.ended_at - self.started_at).total_seconds() * 1000
        self.status = "failed" if any(s.failed for s in self.stages) else "completed"


_current_run: ContextVar[RunAnalytics | None] = ContextVar("policy_its_current_run", default=None)


def get_current_run() -> RunAnalytics | None:
    """Get the active RunAnalytics, or None if no run is active."""
    return _current_run.get()


def start_run(label: str = "", run_id: str | None = None) -> RunAnalytics:
    """Create and activate a new RunAnalytics for the current context."""
    analytics = RunAnalytics(
        run_id=run_id or uuid.uuid4().hex[:12],
        label=label,
        started_at=datetime.now(timezone.utc),
    )
    _current_run.set(analytics)
    structlog.contextvars.bind_contextvars(run_id=analytics.run_id)
    return analytics


def end_run() -> RunAnalytics | None:
    """Finalize the current run, log its summary and return it."""
    analytics = _current_run.get()
    if analytics is None:
        return None

    analytics.finalize()
    _current_run.set(None)
    log.info(
        "Run %s finished (%s) in %.0f ms: %s",
        analytics.run_id,
        analytics.status,
        analytics.total_duration_ms,
        ", ".join(f"{s.stage}={s.duration_ms:.0f}ms" for s in analytics.stages),
    )
    structlog.contextvars.unbind_contextvars("run_id")
    return analytics


@contextmanager
def track_stage(name: str) -> Generator[StageMetrics, None, None]:
    """Record a StageMetrics entry on the current run (no-op without a run)."""
    analytics = _current_run.get()
    stage = StageMetrics(stage=name, started_at=datetime.now(timezone.utc))
    structlog.contextvars.bind_contextvars(stage=name)

    try:
        yield stage
    except Exception as exc:
        stage.failed = True
        stage.error = f"{type(exc).__name__}: {exc}"
        raise
    finally:
        stage.ended_at = datetime.now(timezone.utc)
        if stage.started_at:
            stage.duration_ms = (stage.ended_at - stage.started_at).total_seconds() * 1000
        if analytics is not None:
            analytics.stages.append(stage)
        structlog.contextvars.unbind_contextvars("stage")
