"""Write a synthetic dataset in the ingestion schemas.

Exactly four files are produced: ``cohort.csv``, ``rollout.csv``,
``areas.csv`` and ``truth.json``. Output bytes depend only on the dataset.
"""

from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from policy_its.cohort.ingest import AREA_COLUMNS, COHORT_COLUMNS, GHQ_COLUMNS
from policy_its.intervention.ingest import ROLLOUT_COLUMNS, format_month
from policy_its.synth.simulate import GroundTruth, SyntheticDataset

log = logging.getLogger(__name__)

DATASET_FILES: tuple[str, ...] = ("cohort.csv", "rollout.csv", "areas.csv", "truth.json")


def _cohort_frame(dataset: SyntheticDataset) -> pd.DataFrame:
    rows = []
    for r in dataset.records:
        row: dict[str, object] = {
            "person_id": r.person_id,
            "area_id": r.area_id,
            "interview_year": r.interview_year,
            "employment_status": r.employment_status,
            "age": r.age,
            "education": r.education,
            "ethnicity": r.ethnicity,
            "marital_status": r.marital_status,
            "sex": r.sex,
            "base_weight": "" if r.base_weight is None else f"{r.base_weight:.6f}",
            "wave_responses": "".join("1" if w else "0" for w in r.wave_responses),
        }
        row.update(zip(GHQ_COLUMNS, r.ghq_items))
        rows.append(row)
    return pd.DataFrame(rows, columns=COHORT_COLUMNS)


def _rollout_frame(dataset: SyntheticDataset) -> pd.DataFrame:
    rows = [
        {"area_id": s.area_id, "month": format_month(m), "count": c}
        for s in dataset.rollout
        for m, c in zip(s.months, s.counts)
    ]
    return pd.DataFrame(rows, columns=ROLLOUT_COLUMNS)


def _areas_frame(dataset: SyntheticDataset) -> pd.DataFrame:
    rows = [
        {
            "area_id": a.area_id,
            "imd_score": f"{a.imd_score:.6f}",
            "ethnic_minority_proportion": f"{a.ethnic_minority_proportion:.6f}",
        }
        for a in dataset.areas
    ]
    return pd.DataFrame(rows, columns=AREA_COLUMNS)


def write_dataset(dataset: SyntheticDataset, out_dir: Path) -> dict[str, Path]:
    """Write the four dataset files into *out_dir*, creating it if needed."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / name for name in DATASET_FILES}
    _cohort_frame(dataset).to_csv(paths["cohort.csv"], index=False, lineterminator="\n")
    _rollout_frame(dataset).to_csv(paths["rollout.csv"], index=False, lineterminator="\n")
    _areas_frame(dataset).to_csv(paths["areas.csv"], index=False, lineterminator="\n")
    paths["truth.json"].write_text(dataset.truth.model_dump_json(indent=2) + "\n", encoding="utf-8")
    log.info("Wrote synthetic dataset (%d rows, %d areas) to %s", len(dataset.records), len(dataset.areas), out_dir)
    return paths


def read_truth(path: Path) -> GroundTruth:
    return GroundTruth.model_validate_json(path.read_text(encoding="utf-8"))
