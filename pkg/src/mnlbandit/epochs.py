"""Epoch engine: offer a fixed assortment until the customer walks away."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .model import (
    NO_PURCHASE,
    MNLInstance,
    _choice_thresholds,
    _outcome_from_uniform,
    _validate_offer,
)


@dataclass
class EpochRecord:
    """One epoch's outcome: per-item purchase counts under a fixed offer.

    ``length`` counts every step the epoch consumed, including the terminal
    no-purchase step when one occurred.  ``truncated`` epochs ran into the
    horizon before a no-purchase and must not feed estimator updates.
    ``selection_probs[k]`` is the probability that item ``k + 1`` was included
    in the offered set under the policy's randomization (1 when the policy did
    not randomize).
    """

    epoch_index: int
    offered: tuple
    length: int
    counts: np.ndarray
    selection_probs: np.ndarray
    truncated: bool

    @property
    def purchases(self) -> int:
        return int(self.counts.sum())


def run_epoch(
    instance: MNLInstance,
    offered: Sequence[int],
    selection_probs: Sequence[float],
    t_now: int,
    horizon: int,
    rng: np.random.Generator,
    epoch_index: int,
) -> Tuple[EpochRecord, List[int]]:
    """Sample one epoch starting at step ``t_now``.

    Choices are drawn step by step (one uniform per step, same mapping as
    :func:`mnlbandit.model.sample_choice`) until the first no-purchase or until
    the horizon is exhausted, whichever comes first.  Returns the record plus
    the raw per-step outcome log.
    """
    _validate_offer(instance, offered)
    if len(offered) == 0:
        raise ValueError("cannot run an epoch on an empty assortment")
    if t_now < 1 or t_now > horizon:
        raise ValueError(f"t_now={t_now} outside 1..horizon={horizon}")
    probs = np.asarray(selection_probs, dtype=float)
    if probs.shape != (instance.n_items,):
        raise ValueError("selection_probs must have one entry per item")
    if np.any(probs <= 0) or np.any(probs > 1):
        raise ValueError("selection probabilities must lie in (0, 1]")

    offered = tuple(offered)
    thresholds = _choice_thresholds(instance, offered)
    counts = np.zeros(instance.n_items, dtype=np.int64)
    log: List[int] = []
    truncated = True
    max_steps = horizon - t_now + 1
    for _ in range(max_steps):
        outcome = _outcome_from_uniform(thresholds, offered, rng.random())
        log.append(outcome)
        if outcome == NO_PURCHASE:
            truncated = False
            break
        counts[outcome - 1] += 1
    record = EpochRecord(
        epoch_index=epoch_index,
        offered=offered,
        length=len(log),
        counts=counts,
        selection_probs=probs.copy(),
        truncated=truncated,
    )
    return record, log


@dataclass
class EpochSampleStats:
    """Monte Carlo summary of repeated epochs on one fixed assortment."""

    offered: tuple
    n_epochs: int
    mean_length: float
    se_length: float
    mean_counts: dict
    se_counts: dict
    second_moment_counts: dict
    se_second_moment: dict


def epoch_sample_stats(
    instance: MNLInstance,
    offered: Sequence[int],
    n_epochs: int,
    rng: np.random.Generator,
) -> EpochSampleStats:
    """Run ``n_epochs`` untruncated epochs and summarize lengths and counts.

    The mean length estimates one plus the total offered attraction weight;
    the per-item count moments estimate the attraction parameter and its
    second moment.  Standard errors are empirical.
    """
    if n_epochs < 2:
        raise ValueError("need at least 2 epochs for standard errors")
    offered = tuple(offered)
    lengths = np.empty(n_epochs)
    counts = np.empty((n_epochs, len(offered)))
    # A horizon far beyond any realistic epoch keeps truncation out of play.
    horizon = 10**12
    for e in range(n_epochs):
        rec, _ = run_epoch(instance, offered, np.ones(instance.n_items), 1, horizon, rng, e + 1)
        lengths[e] = rec.length
        counts[e] = [rec.counts[i - 1] for i in offered]

    def _mean_se(x):
        return float(x.mean()), float(x.std(ddof=1) / np.sqrt(n_epochs))

    mean_len, se_len = _mean_se(lengths)
    mean_counts, se_counts, second, se_second = {}, {}, {}, {}
    for col, item in enumerate(offered):
        mean_counts[item], se_counts[item] = _mean_se(counts[:, col])
        second[item], se_second[item] = _mean_se(counts[:, col] ** 2)
    return EpochSampleStats(
        offered=offered,
        n_epochs=n_epochs,
        mean_length=mean_len,
        se_length=se_len,
        mean_counts=mean_counts,
        se_counts=se_counts,
        second_moment_counts=second,
        se_second_moment=se_second,
    )
