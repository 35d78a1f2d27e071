"""Shared type aliases for the framework layer."""

from __future__ import annotations

from typing import Any

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]

JsonDict = dict[str, Any]

# area_id -> group number (decile or quintile)
AreaGrouping = dict[str, int]
