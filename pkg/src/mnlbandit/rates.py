"""Post-run analysis: decay-rate fits, regret/error trade-off products, coverage."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

# Fitted exponents are accepted within this much of their predicted value.
SLOPE_TOLERANCE = 0.15
# Trade-off products across a horizon grid may spread by at most this ratio.
PARETO_MAX_RATIO = 3.0


@dataclass(frozen=True)
class RateFit:
    """Least-squares power-law fit metric ~ C * t^slope on log-log axes."""

    t: np.ndarray
    metric: np.ndarray
    slope: float
    intercept: float
    r_squared: float

    def predicted(self) -> np.ndarray:
        return np.exp(self.intercept + self.slope * np.log(self.t))


def fit_rate(pairs: Sequence[Tuple[float, float]]) -> RateFit:
    """Fit a power law to (t, metric) pairs.

    Requires at least three pairs and strictly positive values on both axes;
    a log-log line is degenerate or undefined otherwise.
    """
    pts = [(float(t), float(m)) for t, m in pairs]
    if len(pts) < 3:
        raise ValueError("need at least 3 points to fit a rate")
    t = np.array([p[0] for p in pts])
    m = np.array([p[1] for p in pts])
    if np.any(t <= 0) or np.any(m <= 0):
        raise ValueError("rate fits require positive horizons and metric values")
    x = np.log(t)
    y = np.log(m)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    total = y - y.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(resid @ resid) / ss_tot
    return RateFit(t=t, metric=m, slope=float(slope), intercept=float(intercept), r_squared=r2)


def pareto_product(regret: float, max_error: float) -> float:
    """Estimation-error/regret trade-off product: max_error * sqrt(regret)."""
    if regret < 0 or max_error < 0:
        raise ValueError("regret and error must be nonnegative")
    return max_error * math.sqrt(regret)


def estimation_radius(completed_epochs: int, alpha: float, delta: float) -> float:
    """High-probability bound on per-item estimation error after L epochs."""
    if completed_epochs < 0:
        raise ValueError("completed_epochs must be nonnegative")
    if not 0 < delta <= 2:
        raise ValueError("delta must lie in (0, 2]")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return 12.0 * math.log(2.0 / delta) * math.sqrt(1.0 / (completed_epochs + 1) ** (1.0 - alpha))


def coverage_check(
    v_hats: Sequence[Sequence[float]],
    v_trues: Sequence[Sequence[float]],
    completed_epochs: Sequence[int],
    alpha: float,
    delta: float,
) -> float:
    """Fraction of (trial, item) cells whose error is inside the bound's radius.

    One radius per trial, from that trial's completed-epoch count.  The bound
    promises coverage of at least 1 - delta.
    """
    hats = np.atleast_2d(np.asarray(v_hats, dtype=float))
    trues = np.atleast_2d(np.asarray(v_trues, dtype=float))
    if trues.shape[0] == 1 and hats.shape[0] > 1:
        trues = np.broadcast_to(trues, hats.shape)
    if hats.shape != trues.shape:
        raise ValueError("estimate and truth arrays must align")
    ls = np.asarray(completed_epochs, dtype=int)
    if ls.shape != (hats.shape[0],):
        raise ValueError("need one completed-epoch count per trial")
    hits = 0
    for row in range(hats.shape[0]):
        radius = estimation_radius(int(ls[row]), alpha, delta)
        hits += int(np.sum(np.abs(hats[row] - trues[row]) <= radius))
    return hits / hats.size


def regret_slope_bound(alpha: float) -> float:
    """Predicted upper envelope for the cumulative-regret exponent."""
    return max(0.5, 1.0 - alpha)


def error_slope_target(alpha: float) -> float:
    """Predicted exponent of the mean estimation error over the horizon."""
    return (alpha - 1.0) / 2.0


def _read_summary(path) -> List[dict]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = {
            "policy",
            "alpha",
            "t",
            "mean_cum_regret",
            "mean_mse_v",
            "mean_mse_r",
        }
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise ValueError(
                f"summary file missing columns {sorted(missing)}; found {reader.fieldnames}"
            )
        return list(reader)


def _read_estimates(path) -> List[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def analyze_summary(
    summary_path,
    t_points: Optional[Sequence[int]] = None,
    delta: float = 0.05,
) -> dict:
    """Fit rates and trade-off products for every policy run in a summary file.

    Slopes use the summary's mean cumulative regret and the root of its mean
    squared attraction error (the root shares the error's decay exponent).
    When ``estimates.csv`` and ``run_manifest.json`` sit next to the summary,
    final-horizon coverage of the estimation bound is evaluated as well.
    Points with nonpositive metric values are dropped from fits.
    """
    summary_path = Path(summary_path)
    rows = _read_summary(summary_path)
    wanted = None if t_points is None else {int(t) for t in t_points}
    groups: Dict[Tuple[str, str], List[dict]] = {}
    for row in rows:
        t = int(row["t"])
        if wanted is not None and t not in wanted:
            continue
        groups.setdefault((row["policy"], row["alpha"]), []).append(row)

    manifest_path = summary_path.parent / "run_manifest.json"
    estimates_path = summary_path.parent / "estimates.csv"
    epoch_counts: Dict[Tuple[str, str, int], int] = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        for run in manifest.get("runs", []):
            epoch_counts[(run["policy"], run["alpha"], int(run["trial"]))] = int(
                run["completed_epochs"]
            )
    estimate_rows: Dict[Tuple[str, str], List[dict]] = {}
    if estimates_path.exists():
        for row in _read_estimates(estimates_path):
            estimate_rows.setdefault((row["policy"], row["alpha"]), []).append(row)

    report = {"source": str(summary_path), "delta": delta, "runs": []}
    for (policy, alpha_s), bucket in groups.items():
        bucket.sort(key=lambda r: int(r["t"]))
        alpha = float(alpha_s) if alpha_s else None
        entry: dict = {"policy": policy, "alpha": alpha}

        regret_pairs = [
            (int(r["t"]), float(r["mean_cum_regret"]))
            for r in bucket
            if float(r["mean_cum_regret"]) > 0
        ]
        if len(regret_pairs) >= 3:
            fit = fit_rate(regret_pairs)
            entry["regret_slope"] = fit.slope
            entry["regret_fit_r_squared"] = fit.r_squared
            if alpha is not None:
                bound = regret_slope_bound(alpha) + SLOPE_TOLERANCE
                entry["regret_slope_bound"] = bound
                entry["regret_slope_ok"] = fit.slope <= bound

        error_pairs = [
            (int(r["t"]), math.sqrt(float(r["mean_mse_v"])))
            for r in bucket
            if r["mean_mse_v"] and float(r["mean_mse_v"]) > 0
        ]
        if len(error_pairs) >= 3:
            fit = fit_rate(error_pairs)
            entry["error_slope"] = fit.slope
            entry["error_fit_r_squared"] = fit.r_squared
            if alpha is not None:
                target = error_slope_target(alpha)
                entry["error_slope_target"] = target
                entry["error_slope_ok"] = abs(fit.slope - target) <= SLOPE_TOLERANCE

        products = [
            pareto_product(float(r["mean_cum_regret"]), math.sqrt(float(r["mean_mse_v"])))
            for r in bucket
            if r["mean_mse_v"] and float(r["mean_mse_v"]) > 0 and float(r["mean_cum_regret"]) > 0
        ]
        if products:
            entry["pareto_products"] = products
            ratio = max(products) / min(products)
            entry["pareto_max_min_ratio"] = ratio
            entry["pareto_ok"] = ratio <= PARETO_MAX_RATIO

        est_bucket = estimate_rows.get((policy, alpha_s), [])
        if est_bucket and alpha is not None and epoch_counts:
            by_trial: Dict[int, List[dict]] = {}
            for row in est_bucket:
                by_trial.setdefault(int(row["trial"]), []).append(row)
            hats, trues, ls = [], [], []
            for trial, items in sorted(by_trial.items()):
                key = (policy, alpha_s, trial)
                if key not in epoch_counts:
                    continue
                items.sort(key=lambda r: int(r["item"]))
                hats.append([float(r["v_hat"]) for r in items])
                trues.append([float(r["v_true"]) for r in items])
                ls.append(epoch_counts[key])
            if hats:
                cov = coverage_check(hats, trues, ls, alpha, delta)
                entry["coverage"] = cov
                entry["coverage_ok"] = cov >= 1.0 - delta
        report["runs"].append(entry)
    report["all_ok"] = all(
        all(v for k, v in entry.items() if k.endswith("_ok")) for entry in report["runs"]
    )
    return report


def write_rates_report(summary_path, out_path, t_points=None, delta: float = 0.05) -> dict:
    report = analyze_summary(summary_path, t_points=t_points, delta=delta)
    Path(out_path).write_text(json.dumps(report, indent=2) + "\n")
    return report
