"""Benchmark harness: seeded trials, policy grids, metric series, CSV outputs.

A trial is fully determined by (master_seed, trial_index, policy run): the
instance stream depends only on (master_seed, trial_index) so every policy in
a trial faces the same demand instance, while the simulation stream also
hashes the policy run label so policies never share draws.  Outputs are
written with round-trippable float formatting so identical configurations
produce byte-identical CSVs, irrespective of worker count.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._version import __version__
from .baselines import EXP3EGConfig, EXP3EGState, ee_select, exp3eg_select, exp3eg_update
from .epochs import run_epoch
from .family import FeasibleFamily, argmax_revenue
from .model import MNLInstance, expected_revenue, load_instance, random_instance, sample_choice
from .policy import (
    PolicyConfig,
    PolicyState,
    Selection,
    finalize,
    observe_epoch,
    select_assortment,
)

UCB_POLICY = "mnl-experiment-ucb"
EE_POLICY = "mnl-bandit-ee"
EXP3EG_POLICY = "exp3eg"
POLICY_NAMES = (UCB_POLICY, EE_POLICY, EXP3EG_POLICY)

# Keeps the instance-drawing stream distinct from every policy stream.
_INSTANCE_TAG = int.from_bytes(hashlib.sha256(b"instance-draw").digest()[:8], "big")

PER_STEP_COLUMNS = ("policy", "alpha", "trial", "t", "offered_size", "cum_regret", "mse_v", "mse_r")
ESTIMATES_COLUMNS = ("policy", "alpha", "trial", "item", "v_true", "v_hat")
SUMMARY_COLUMNS = (
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


@dataclass(frozen=True)
class InstanceSource:
    """Where trial instances come from: fresh uniform draws or a fixed file."""

    kind: str
    v_range: Optional[Tuple[float, float]] = None
    r_range: Optional[Tuple[float, float]] = None
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind == "random":
            if self.v_range is None or self.r_range is None:
                raise ValueError("random instance source requires v_range and r_range")
            if self.path is not None:
                raise ValueError("random instance source takes no path")
        elif self.kind == "file":
            if not self.path:
                raise ValueError("file instance source requires a path")
            if self.v_range is not None or self.r_range is not None:
                raise ValueError("file instance source takes no ranges")
        else:
            raise ValueError(f"instance source kind must be 'random' or 'file', got {self.kind!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceSource":
        allowed = {"kind", "v_range", "r_range", "path"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown instance_source keys: {sorted(extra)}")
        kwargs = dict(data)
        for key in ("v_range", "r_range"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(float(x) for x in kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        if self.kind == "random":
            return {"kind": "random", "v_range": list(self.v_range), "r_range": list(self.r_range)}
        return {"kind": "file", "path": self.path}


@dataclass(frozen=True)
class PolicySpec:
    """One policy entry from the config; UCB entries expand over the alpha grid."""

    name: str
    variant: str = "standard"
    k_star: Optional[int] = None
    b_bound: Optional[float] = None
    delta: float = 0.05
    alpha_exp: float = 0.5
    label: Optional[str] = None

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}; expected one of {POLICY_NAMES}")
        if self.name != UCB_POLICY and (self.variant != "standard" or self.k_star is not None):
            raise ValueError(f"{self.name} takes no variant options")
        if self.name == UCB_POLICY:
            # Surface invalid variant combinations at config time.
            PolicyConfig(alpha=0.0, variant=self.variant, k_star=self.k_star, b_bound=self.b_bound)

    @classmethod
    def from_dict(cls, data: dict) -> "PolicySpec":
        if "name" not in data:
            raise ValueError("policy entries require a name")
        name = data["name"]
        allowed = {"name", "label"}
        if name == UCB_POLICY:
            allowed |= {"variant", "k_star", "b_bound"}
        elif name == EXP3EG_POLICY:
            allowed |= {"delta", "alpha_exp"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown keys for policy {name!r}: {sorted(extra)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        if self.name == UCB_POLICY:
            if self.variant != "standard":
                out["variant"] = self.variant
            if self.k_star is not None:
                out["k_star"] = self.k_star
            if self.b_bound is not None:
                out["b_bound"] = self.b_bound
        if self.name == EXP3EG_POLICY:
            out["delta"] = self.delta
            out["alpha_exp"] = self.alpha_exp
        if self.label:
            out["label"] = self.label
        return out

    @property
    def uses_alpha(self) -> bool:
        return self.name == UCB_POLICY

    @property
    def run_label(self) -> str:
        if self.label:
            return self.label
        if self.name == UCB_POLICY and self.variant != "standard":
            return f"{self.name}-{self.variant}"
        return self.name

    def policy_config(self, alpha: Optional[float]) -> PolicyConfig:
        return PolicyConfig(
            alpha=0.0 if alpha is None else float(alpha),
            variant=self.variant,
            k_star=self.k_star,
            b_bound=self.b_bound,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a benchmark run; rejects unknown keys when parsed."""

    n_items: int
    max_size: int
    horizon: int
    trials: int
    policies: Tuple[PolicySpec, ...]
    alphas: Tuple[float, ...]
    master_seed: int
    instance_source: InstanceSource
    metric_grid: Optional[Tuple[int, ...]] = None
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be at least 1")
        if not 1 <= self.max_size <= self.n_items:
            raise ValueError("max_size must lie in 1..n_items")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.policies:
            raise ValueError("at least one policy is required")
        labels = [
            (spec.run_label, a)
            for spec in self.policies
            for a in (self.alphas if spec.uses_alpha else (None,))
        ]
        if len(set(labels)) != len(labels):
            raise ValueError("policy run labels must be unique; set explicit labels")
        if any(spec.uses_alpha for spec in self.policies) and not self.alphas:
            raise ValueError("alphas must be nonempty when a UCB policy is configured")
        for a in self.alphas:
            PolicyConfig(alpha=float(a))  # range check
        if self.metric_grid is not None:
            g = list(self.metric_grid)
            if not g or any(int(t) < 1 or int(t) > self.horizon for t in g):
                raise ValueError("metric_grid entries must lie in 1..horizon")
            if sorted(set(g)) != g:
                raise ValueError("metric_grid must be strictly increasing and duplicate-free")

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        allowed = {
            "n_items",
            "max_size",
            "horizon",
            "trials",
            "policies",
            "alphas",
            "master_seed",
            "instance_source",
            "metric_grid",
            "output_dir",
        }
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        missing = {"n_items", "max_size", "horizon", "trials", "policies", "alphas", "master_seed", "instance_source"} - set(data)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        policies = tuple(
            PolicySpec.from_dict(p) if isinstance(p, dict) else PolicySpec(name=str(p))
            for p in data["policies"]
        )
        grid = data.get("metric_grid")
        return cls(
            n_items=int(data["n_items"]),
            max_size=int(data["max_size"]),
            horizon=int(data["horizon"]),
            trials=int(data["trials"]),
            policies=policies,
            alphas=tuple(float(a) for a in data["alphas"]),
            master_seed=int(data["master_seed"]),
            instance_source=InstanceSource.from_dict(data["instance_source"]),
            metric_grid=None if grid is None else tuple(int(t) for t in grid),
            output_dir=data.get("output_dir"),
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text()))

    def to_json_dict(self) -> dict:
        out = {
            "n_items": self.n_items,
            "max_size": self.max_size,
            "horizon": self.horizon,
            "trials": self.trials,
            "policies": [spec.to_dict() for spec in self.policies],
            "alphas": list(self.alphas),
            "master_seed": self.master_seed,
            "instance_source": self.instance_source.to_dict(),
            "metric_grid": None if self.metric_grid is None else list(self.metric_grid),
        }
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    def runs(self) -> List[Tuple[PolicySpec, Optional[float]]]:
        """Every (policy, alpha) combination, in config order then alpha order."""
        out = []
        for spec in self.policies:
            if spec.uses_alpha:
                out.extend((spec, float(a)) for a in self.alphas)
            else:
                out.append((spec, None))
        return out

    def grid(self) -> np.ndarray:
        """Metric grid: every step up to 10^4, logarithmic spacing beyond."""
        if self.metric_grid is not None:
            return np.asarray(self.metric_grid, dtype=np.int64)
        if self.horizon <= 10_000:
            return np.arange(1, self.horizon + 1, dtype=np.int64)
        pts = np.unique(np.round(np.geomspace(1, self.horizon, 1024)).astype(np.int64))
        return pts


@dataclass
class EpochLogEntry:
    """One epoch as the harness saw it, for audits of the selection behavior."""

    epoch: int
    kind: str
    offered: tuple
    star: tuple
    length: int
    truncated: bool
    chunks: Optional[tuple] = None


@dataclass
class TrialResult:
    """Metric series for one (policy run, trial), sampled on the metric grid.

    ``mse_v``/``mae_v`` are NaN for policies without an attraction estimator.
    ``estimate_series`` rows hold the running attraction estimate at each grid
    point; ``v_hat`` is the final estimate (None when the policy has none).
    """

    policy: str
    alpha: Optional[float]
    trial: int
    grid: np.ndarray
    cum_regret: np.ndarray
    mse_v: np.ndarray
    mae_v: np.ndarray
    mse_r: np.ndarray
    offered_size: np.ndarray
    v_true: np.ndarray
    v_hat: Optional[np.ndarray]
    completed_epochs: int
    estimate_series: Optional[np.ndarray] = None
    epoch_log: Optional[List[EpochLogEntry]] = None
    metadata: dict = field(default_factory=dict)


def _alpha_str(alpha: Optional[float]) -> str:
    return "" if alpha is None else repr(float(alpha))


def _run_digest(label: str, alpha: Optional[float]) -> int:
    key = f"{label}|alpha={_alpha_str(alpha)}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def trial_stream(master_seed: int, trial_index: int, label: str, alpha: Optional[float]) -> np.random.Generator:
    """Simulation stream for one trial of one policy run."""
    return np.random.default_rng([master_seed, trial_index, _run_digest(label, alpha)])


def instance_for_trial(config: ExperimentConfig, trial_index: int) -> MNLInstance:
    """The demand instance all policies share within a trial."""
    src = config.instance_source
    if src.kind == "file":
        instance = load_instance(src.path)
        if instance.n_items != config.n_items:
            raise ValueError(
                f"instance file has {instance.n_items} items, config says {config.n_items}"
            )
        return instance
    rng = np.random.default_rng([config.master_seed, trial_index, _INSTANCE_TAG])
    return random_instance(config.n_items, src.v_range, src.r_range, rng)


def _true_revenues(family: FeasibleFamily, instance: MNLInstance) -> np.ndarray:
    m = family.indicator_matrix()
    v, r = instance.attractions, instance.revenues
    return (m @ (r * v)) / (1.0 + m @ v)


def _epoch_policy_trial(
    config: ExperimentConfig,
    spec: PolicySpec,
    alpha: Optional[float],
    trial_index: int,
    keep_epoch_log: bool,
    keep_series: bool,
) -> TrialResult:
    instance = instance_for_trial(config, trial_index)
    family = FeasibleFamily(config.n_items, config.max_size)
    rng = trial_stream(config.master_seed, trial_index, spec.run_label, alpha)
    pconf = spec.policy_config(alpha)
    n = config.n_items
    horizon = config.horizon
    grid = config.grid()
    v_true = instance.attractions
    revenues = instance.revenues
    matrix = family.indicator_matrix()
    _, best_revenue = argmax_revenue(family, v_true, revenues)
    true_revs = _true_revenues(family, instance)
    use_ipw = spec.name == UCB_POLICY

    gsize = len(grid)
    cum_regret = np.empty(gsize)
    mse_v = np.empty(gsize)
    mae_v = np.empty(gsize)
    mse_r = np.empty(gsize)
    offered_size = np.empty(gsize, dtype=np.int64)
    series = np.empty((gsize, n)) if keep_series else None
    epoch_log: Optional[List[EpochLogEntry]] = [] if keep_epoch_log else None

    state = PolicyState(n)
    estimate = np.zeros(n)  # running estimate before the first completed epoch

    def record(gi: int, regret_value: float, size: int) -> None:
        cum_regret[gi] = regret_value
        offered_size[gi] = size
        diff = estimate - v_true
        mse_v[gi] = float(diff @ diff) / n
        mae_v[gi] = float(np.abs(diff).sum()) / n
        est_rev = (matrix @ (revenues * estimate)) / (1.0 + matrix @ estimate)
        gap = est_rev - true_revs
        mse_r[gi] = float(gap @ gap) / len(gap)
        if series is not None:
            series[gi] = estimate

    gi = 0
    cum = 0.0
    t = 1
    while t <= horizon:
        if spec.name == EE_POLICY:
            sel = ee_select(state, family, revenues)
        else:
            sel = select_assortment(state, pconf, family, revenues, rng)
        rec, _ = run_epoch(instance, sel.offered, sel.selection_probs, t, horizon, rng, state.epoch)
        step_gap = best_revenue - expected_revenue(instance, sel.offered)
        end = t + rec.length - 1
        while gi < gsize and grid[gi] < end:
            record(gi, cum + (grid[gi] - t + 1) * step_gap, len(sel.offered))
            gi += 1
        cum += rec.length * step_gap
        if not rec.truncated:
            observe_epoch(state, pconf, rec)
            estimate = (
                state.ipw_sums / state.completed if use_ipw else state.mean_counts.copy()
            )
        if gi < gsize and grid[gi] == end:
            record(gi, cum, len(sel.offered))
            gi += 1
        if epoch_log is not None:
            epoch_log.append(
                EpochLogEntry(rec.epoch_index, sel.kind, sel.offered, sel.star, rec.length, rec.truncated, sel.chunks)
            )
        t = end + 1

    completed = state.completed
    if use_ipw:
        v_hat = finalize(state).v_hat if completed > 0 else np.zeros(n)
    else:
        v_hat = state.mean_counts.copy()
    return TrialResult(
        policy=spec.run_label,
        alpha=alpha,
        trial=trial_index,
        grid=grid,
        cum_regret=cum_regret,
        mse_v=mse_v,
        mae_v=mae_v,
        mse_r=mse_r,
        offered_size=offered_size,
        v_true=v_true.copy(),
        v_hat=v_hat,
        completed_epochs=completed,
        estimate_series=series,
        epoch_log=epoch_log,
        metadata={
            "seed": [config.master_seed, trial_index, _run_digest(spec.run_label, alpha)],
            "instance_digest": instance.digest(),
            "estimator": "ipw" if use_ipw else "mean-counts",
            "out_of_theory": bool(alpha is not None and alpha > 0.5),
        },
    )


def _exp3eg_trial(
    config: ExperimentConfig,
    spec: PolicySpec,
    trial_index: int,
    keep_series: bool,
) -> TrialResult:
    instance = instance_for_trial(config, trial_index)
    family = FeasibleFamily(config.n_items, config.max_size)
    rng = trial_stream(config.master_seed, trial_index, spec.run_label, None)
    grid = config.grid()
    revenues = instance.revenues
    _, best_revenue = argmax_revenue(family, instance.attractions, revenues)
    true_revs = _true_revenues(family, instance)
    state = EXP3EGState(family, revenues, EXP3EGConfig(delta=spec.delta, alpha_exp=spec.alpha_exp))

    gsize = len(grid)
    cum_regret = np.empty(gsize)
    mse_r = np.empty(gsize)
    offered_size = np.empty(gsize, dtype=np.int64)
    nan_series = np.full(gsize, np.nan)
    reward_sums = np.zeros(state.n_arms)
    plays = np.zeros(state.n_arms, dtype=np.int64)

    gi = 0
    cum = 0.0
    for t in range(1, config.horizon + 1):
        arm = exp3eg_select(state, rng)
        k = state.arm_rank[arm]
        outcome = sample_choice(instance, arm, rng)
        reward = float(revenues[outcome - 1]) if outcome else 0.0
        exp3eg_update(state, arm, reward)
        reward_sums[k] += reward
        plays[k] += 1
        cum += best_revenue - true_revs[k]
        if gi < gsize and grid[gi] == t:
            est_rev = np.divide(reward_sums, plays, out=np.zeros_like(reward_sums), where=plays > 0)
            gap = est_rev - true_revs
            cum_regret[gi] = cum
            mse_r[gi] = float(gap @ gap) / len(gap)
            offered_size[gi] = len(arm)
            gi += 1

    return TrialResult(
        policy=spec.run_label,
        alpha=None,
        trial=trial_index,
        grid=grid,
        cum_regret=cum_regret,
        mse_v=nan_series.copy(),
        mae_v=nan_series.copy(),
        mse_r=mse_r,
        offered_size=offered_size,
        v_true=instance.attractions.copy(),
        v_hat=None,
        completed_epochs=0,
        estimate_series=None,
        epoch_log=None,
        metadata={
            "seed": [config.master_seed, trial_index, _run_digest(spec.run_label, None)],
            "instance_digest": instance.digest(),
            "estimator": "per-arm-mean-reward",
            "out_of_theory": False,
        },
    )


def run_trial(
    config: ExperimentConfig,
    spec: PolicySpec,
    alpha: Optional[float],
    trial_index: int,
    keep_epoch_log: bool = True,
    keep_series: bool = True,
) -> TrialResult:
    """Run one seeded trial of one policy run; pure function of its arguments."""
    if spec.name == EXP3EG_POLICY:
        return _exp3eg_trial(config, spec, trial_index, keep_series)
    return _epoch_policy_trial(config, spec, alpha, trial_index, keep_epoch_log, keep_series)


def simulate_policy_epochs(
    instance: MNLInstance,
    family: FeasibleFamily,
    pconf: PolicyConfig,
    n_epochs: int,
    rng: np.random.Generator,
) -> Tuple[PolicyState, List[EpochLogEntry], List[Selection]]:
    """Run the exploring policy for exactly ``n_epochs`` completed epochs.

    No horizon truncation is in play; intended for estimator diagnostics and
    variant audits rather than regret experiments.
    """
    state = PolicyState(instance.n_items)
    log: List[EpochLogEntry] = []
    selections: List[Selection] = []
    horizon = 10**12
    for _ in range(n_epochs):
        sel = select_assortment(state, pconf, family, instance.revenues, rng)
        rec, _ = run_epoch(instance, sel.offered, sel.selection_probs, 1, horizon, rng, state.epoch)
        observe_epoch(state, pconf, rec)
        log.append(EpochLogEntry(rec.epoch_index, sel.kind, sel.offered, sel.star, rec.length, rec.truncated, sel.chunks))
        selections.append(sel)
    return state, log, selections


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: List[TrialResult]
    failures: List[dict]
    wall_clock_seconds: float

    def for_run(self, label: str, alpha: Optional[float]) -> List[TrialResult]:
        return [
            t
            for t in self.trials
            if t.policy == label and _alpha_str(t.alpha) == _alpha_str(alpha)
        ]


def _trial_task(args):
    config, spec, alpha, trial_index, keep_epoch_log, keep_series = args
    try:
        return ("ok", run_trial(config, spec, alpha, trial_index, keep_epoch_log, keep_series))
    except Exception as exc:  # noqa: BLE001 - recorded, aggregation proceeds
        return (
            "error",
            {
                "policy": spec.run_label,
                "alpha": _alpha_str(alpha),
                "trial": trial_index,
                "error": f"{type(exc).__name__}: {exc}",
            },
        )


def run_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    keep_epoch_logs: bool = False,
    keep_estimate_series: bool = True,
) -> ExperimentResult:
    """Run every (policy run, trial) cell of the experiment grid.

    With ``workers > 1`` trials run in separate processes; results are merged
    in the deterministic grid order, so outputs match a sequential run.
    """
    started = time.perf_counter()
    tasks = [
        (config, spec, alpha, trial, keep_epoch_logs, keep_estimate_series)
        for spec, alpha in config.runs()
        for trial in range(config.trials)
    ]
    outcomes = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=1))
    else:
        outcomes = [_trial_task(t) for t in tasks]
    trials = [payload for status, payload in outcomes if status == "ok"]
    failures = [payload for status, payload in outcomes if status == "error"]
    return ExperimentResult(config, trials, failures, time.perf_counter() - started)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isnan(xf):
        return ""
    return repr(xf)


def summarize(result: ExperimentResult) -> List[dict]:
    """Per-(policy, alpha, t) means and standard deviations across trials.

    Uses population standard deviations so a single trial summarizes to a
    zero-width band.  Metrics without values (no attraction estimator) stay
    empty rather than zero.
    """
    rows: List[dict] = []
    grid = result.config.grid()
    for spec, alpha in result.config.runs():
        bucket = result.for_run(spec.run_label, alpha)
        if not bucket:
            continue
        bucket = sorted(bucket, key=lambda tr: tr.trial)
        cum = np.stack([tr.cum_regret for tr in bucket])
        msev = np.stack([tr.mse_v for tr in bucket])
        mser = np.stack([tr.mse_r for tr in bucket])
        has_v = not np.isnan(msev).all()
        for gi, t in enumerate(grid):
            rows.append(
                {
                    "policy": spec.run_label,
                    "alpha": _alpha_str(alpha),
                    "t": int(t),
                    "mean_cum_regret": float(cum[:, gi].mean()),
                    "sd_cum_regret": float(cum[:, gi].std()),
                    "mean_mse_v": float(msev[:, gi].mean()) if has_v else None,
                    "sd_mse_v": float(msev[:, gi].std()) if has_v else None,
                    "mean_mse_r": float(mser[:, gi].mean()),
                    "sd_mse_r": float(mser[:, gi].std()),
                }
            )
    return rows


def _approximation_notes(config: ExperimentConfig) -> List[str]:
    notes = [
        "running attraction estimate is the zero vector until the first epoch completes",
        "exp3eg schedule: gamma_t = min(1, delta*M*t^-alpha_exp), eta_t = sqrt(log(M)/(M*t)); "
        "only (alpha_exp, delta) are pinned by the benchmark definition",
    ]
    out_of_theory = sorted({float(a) for a in config.alphas if a > 0.5})
    if out_of_theory and any(s.uses_alpha for s in config.policies):
        notes.append(
            f"alphas {out_of_theory} exceed the guaranteed exploration-decay range [0, 0.5] "
            "and are run for comparison only"
        )
    return notes


def write_outputs(result: ExperimentResult, out_dir) -> dict:
    """Write per_step.csv, estimates.csv, summary.csv, and run_manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = result.config

    per_step_path = out / "per_step.csv"
    with per_step_path.open("w", newline="") as fh:
        fh.write(",".join(PER_STEP_COLUMNS) + "\n")
        for tr in result.trials:
            alpha_s = _alpha_str(tr.alpha)
            for gi, t in enumerate(tr.grid):
                fh.write(
                    f"{tr.policy},{alpha_s},{tr.trial},{int(t)},{int(tr.offered_size[gi])},"
                    f"{_fmt(tr.cum_regret[gi])},{_fmt(tr.mse_v[gi])},{_fmt(tr.mse_r[gi])}\n"
                )

    estimates_path = out / "estimates.csv"
    with estimates_path.open("w", newline="") as fh:
        fh.write(",".join(ESTIMATES_COLUMNS) + "\n")
        for tr in result.trials:
            if tr.v_hat is None:
                continue
            alpha_s = _alpha_str(tr.alpha)
            for item in range(1, len(tr.v_true) + 1):
                fh.write(
                    f"{tr.policy},{alpha_s},{tr.trial},{item},"
                    f"{_fmt(tr.v_true[item - 1])},{_fmt(tr.v_hat[item - 1])}\n"
                )

    summary_path = out / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in summarize(result):
            fh.write(",".join(_fmt(row[c]) if not isinstance(row[c], str) else row[c] for c in SUMMARY_COLUMNS) + "\n")

    manifest = {
        "config": config.to_json_dict(),
        "code_version": __version__,
        "wall_clock_seconds": result.wall_clock_seconds,
        "approximations": _approximation_notes(config),
        "failure_count": len(result.failures),
        "failures": result.failures,
        "runs": [
            {
                "policy": tr.policy,
                "alpha": _alpha_str(tr.alpha),
                "trial": tr.trial,
                "seed": tr.metadata.get("seed"),
                "instance_digest": tr.metadata.get("instance_digest"),
                "estimator": tr.metadata.get("estimator"),
                "completed_epochs": tr.completed_epochs,
                "out_of_theory": tr.metadata.get("out_of_theory", False),
            }
            for tr in result.trials
        ],
    }
    manifest_path = out / "run_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return {
        "per_step": per_step_path,
        "estimates": estimates_path,
        "summary": summary_path,
        "manifest": manifest_path,
    }
