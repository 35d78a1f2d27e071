"""Sweeps of the standardised change over profile cells.

A sweep enumerates every level (or level combination) of the requested
dimensions, computes rho per cell, and sorts cells by median rho, largest
first, with EMPTY cells last in enumeration order.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass

from policy_its.core.types import FloatArray
from policy_its.effects.change import Adjustment, standardised_change
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.marginal import Aggregation
from policy_its.effects.models import EffectSummary, ProfileQuery

log = logging.getLogger(__name__)


@dataclass
class SweepTable:
    """Sorted cells of one sweep."""

    dimensions: tuple[str, ...]
    cells: list[EffectSummary]

    @property
    def name(self) -> str:
        return "x".join(self.dimensions)

    def populated(self) -> list[EffectSummary]:
        return [c for c in self.cells if not c.is_empty and c.rho is not None]

    def empty(self) -> list[EffectSummary]:
        return [c for c in self.cells if c.is_empty or c.rho is None]


def sort_cells(cells: Sequence[EffectSummary]) -> list[EffectSummary]:
    ranked = [c for c in cells if not c.is_empty and c.rho is not None]
    ranked.sort(key=lambda c: -c.rho.median if c.rho is not None else 0.0)
    return ranked + [c for c in cells if c.is_empty or c.rho is None]


def profile_sweep(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    dimensions: Sequence[str],
    *,
    base: ProfileQuery | None = None,
    aggregation: Aggregation = "linear_predictor",
    adjustment: Adjustment = "multiplicative",
    level: float = 0.95,
) -> SweepTable:
    """rho for every combination of levels of *dimensions* (``area_id`` allowed)."""
    base = base or ProfileQuery()
    dims = tuple(dimensions)
    cells = []
    for combo in itertools.product(*(frame.levels(d) for d in dims)):
        cell = dict(zip(dims, combo))
        query = base.refine(levels={**base.levels, **cell})
        cells.append(
            standardised_change(
                latent_draws,
                frame,
                query,
                cell=cell,
                aggregation=aggregation,
                adjustment=adjustment,
                level=level,
            )
        )
    table = SweepTable(dimensions=dims, cells=sort_cells(cells))
    log.info("Sweep %s: %d cells, %d empty", table.name, len(cells), len(table.empty()))
    return table


def top_bottom_profiles(table: SweepTable, k: int = 5) -> tuple[list[EffectSummary], list[EffectSummary]]:
    """The *k* largest and *k* smallest median-rho populated cells."""
    populated = table.populated()
    top = populated[:k]
    bottom = populated[-k:][::-1] if populated else []
    return top, bottom
