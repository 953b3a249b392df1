"""Loading and validation of benchmark summary CSVs.

The summary schema is the harness's external interface: one row per
(policy, alpha, t) with mean and population-standard-deviation columns per
metric.  The ``alpha`` column is textual on purpose — policies without an
exploration exponent carry an empty string, which must not be collapsed into
NaN — so the file is read as strings and numeric columns are converted
explicitly.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd

REQUIRED_COLUMNS = (
    "policy",
    "alpha",
    "t",
    "mean_cum_regret",
    "sd_cum_regret",
    "mean_mse_v",
    "sd_mse_v",
    "mean_mse_r",
    "sd_mse_r",
)

# Metric key -> (mean column, sd column, axis label).
METRICS = {
    "cum_regret": ("mean_cum_regret", "sd_cum_regret", "mean cumulative regret"),
    "mse_v": ("mean_mse_v", "sd_mse_v", "mean squared attraction error"),
    "mse_r": ("mean_mse_r", "sd_mse_r", "mean squared revenue error"),
}


class SchemaError(ValueError):
    """The summary file does not match the expected schema."""


def load_summary(path) -> pd.DataFrame:
    """Read a summary CSV, validating the schema.

    Returns a frame with ``policy``/``alpha`` as strings (empty alpha kept
    empty), ``t`` as integers, and metric columns as floats with empty fields
    mapped to NaN.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"summary file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = set(REQUIRED_COLUMNS) - set(frame.columns)
    if missing:
        raise SchemaError(
            f"summary file missing columns {sorted(missing)}; found {list(frame.columns)}"
        )
    frame["t"] = frame["t"].astype(int)
    for column in REQUIRED_COLUMNS[3:]:
        frame[column] = pd.to_numeric(frame[column].replace("", np.nan))
    return frame


def list_series(frame: pd.DataFrame) -> List[Tuple[str, str]]:
    """All (policy, alpha) pairs in first-appearance order."""
    seen = []
    for policy, alpha in zip(frame["policy"], frame["alpha"]):
        if (policy, alpha) not in seen:
            seen.append((policy, alpha))
    return seen


def series_label(policy: str, alpha: str) -> str:
    return policy if alpha == "" else f"{policy} (alpha={alpha})"
