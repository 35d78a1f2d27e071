"""Logging setup and per-run stage tracking."""

from __future__ import annotations

from policy_its.hooks.logging_config import setup_logging
from policy_its.hooks.run_tracker import end_run, get_current_run, start_run, track_stage

__all__ = ["setup_logging", "start_run", "end_run", "get_current_run", "track_stage"]
