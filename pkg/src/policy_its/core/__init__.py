"""Core framework layer: config, exceptions, types."""

from __future__ import annotations
