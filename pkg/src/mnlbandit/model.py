"""Multinomial-logit demand model: instances, choice probabilities, sampling."""

from __future__ import annotations

import hashlib
import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import numpy as np

# Outcome code for "customer left without purchasing". Item indices are 1-based.
NO_PURCHASE = 0

# The no-purchase option has a fixed attraction weight of 1; all item
# attractions are expressed relative to it.
NO_PURCHASE_WEIGHT = 1.0

Assortment = Tuple[int, ...]


def as_assortment(items: Iterable[int], n_items: int) -> Assortment:
    """Normalize ``items`` to a sorted tuple of distinct 1-based indices.

    Raises ValueError on duplicates or indices outside ``1..n_items``.
    """
    raw = [int(i) for i in items]
    s = tuple(sorted(raw))
    if len(set(s)) != len(s):
        raise ValueError(f"duplicate item indices in assortment: {raw}")
    if s and (s[0] < 1 or s[-1] > n_items):
        raise ValueError(f"item indices must lie in 1..{n_items}, got {raw}")
    return s


@dataclass(frozen=True)
class MNLInstance:
    """Ground-truth demand instance: attraction weights and per-item revenues.

    ``attractions[k]`` and ``revenues[k]`` belong to item ``k + 1``; outcome 0
    is the no-purchase option with weight :data:`NO_PURCHASE_WEIGHT`.
    Attractions may be zero (an item nobody ever buys) but not negative;
    revenues must be positive.  Instances are immutable.
    """

    attractions: np.ndarray
    revenues: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.attractions, dtype=float).copy()
        r = np.asarray(self.revenues, dtype=float).copy()
        if v.ndim != 1 or r.ndim != 1 or v.shape != r.shape or v.size == 0:
            raise ValueError("attractions and revenues must be equal-length 1-d arrays")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(r)):
            raise ValueError("attractions and revenues must be finite")
        if np.any(v < 0):
            raise ValueError("attractions must be nonnegative")
        if np.any(r <= 0):
            raise ValueError("revenues must be positive")
        v.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "attractions", v)
        object.__setattr__(self, "revenues", r)

    @property
    def n_items(self) -> int:
        return int(self.attractions.size)

    def max_attraction(self) -> float:
        return float(self.attractions.max())

    def within_attraction_bound(self, bound: float = 1.0) -> bool:
        """True if every attraction is at most ``bound`` times the no-purchase weight."""
        return bool(np.all(self.attractions <= bound * NO_PURCHASE_WEIGHT))

    def to_json_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "v": [float(x) for x in self.attractions],
            "r": [float(x) for x in self.revenues],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MNLInstance":
        extra = set(data) - {"n_items", "v", "r"}
        if extra:
            raise ValueError(f"unknown instance keys: {sorted(extra)}")
        inst = cls(np.asarray(data["v"], dtype=float), np.asarray(data["r"], dtype=float))
        if inst.n_items != int(data["n_items"]):
            raise ValueError("n_items does not match the length of v and r")
        return inst

    def digest(self) -> str:
        payload = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def save_instance(instance: MNLInstance, path) -> None:
    Path(path).write_text(json.dumps(instance.to_json_dict(), indent=2) + "\n")


def load_instance(path) -> MNLInstance:
    return MNLInstance.from_json_dict(json.loads(Path(path).read_text()))


def _validate_offer(instance: MNLInstance, assortment: Sequence[int]) -> None:
    seen = set()
    for i in assortment:
        if not 1 <= i <= instance.n_items:
            raise ValueError(f"item {i} out of range 1..{instance.n_items}")
        if i in seen:
            raise ValueError(f"duplicate item {i} in assortment")
        seen.add(i)


def _offer_weight(instance: MNLInstance, assortment: Sequence[int]) -> float:
    return float(sum(instance.attractions[i - 1] for i in assortment))


def choice_prob(instance: MNLInstance, assortment: Sequence[int], outcome: int) -> float:
    """P(customer picks ``outcome``) when ``assortment`` is on offer.

    ``outcome`` 0 is no-purchase; items not on offer have probability zero.
    """
    _validate_offer(instance, assortment)
    if not 0 <= outcome <= instance.n_items:
        raise ValueError(f"outcome {outcome} out of range 0..{instance.n_items}")
    denom = NO_PURCHASE_WEIGHT + _offer_weight(instance, assortment)
    if outcome == NO_PURCHASE:
        return NO_PURCHASE_WEIGHT / denom
    if outcome in set(assortment):
        return float(instance.attractions[outcome - 1]) / denom
    return 0.0


def expected_revenue(instance: MNLInstance, assortment: Sequence[int]) -> float:
    """Expected one-step revenue of offering ``assortment`` (0 for the empty offer)."""
    _validate_offer(instance, assortment)
    if len(assortment) == 0:
        return 0.0
    num = float(sum(instance.revenues[i - 1] * instance.attractions[i - 1] for i in assortment))
    return num / (NO_PURCHASE_WEIGHT + _offer_weight(instance, assortment))


def _choice_thresholds(instance: MNLInstance, assortment: Sequence[int]) -> list:
    """Cumulative probabilities over outcomes ordered (no-purchase, then items as given)."""
    denom = NO_PURCHASE_WEIGHT + _offer_weight(instance, assortment)
    cum = [NO_PURCHASE_WEIGHT / denom]
    acc = cum[0]
    for i in assortment:
        acc += float(instance.attractions[i - 1]) / denom
        cum.append(acc)
    return cum


def _outcome_from_uniform(thresholds: list, assortment: Sequence[int], u: float) -> int:
    k = bisect_right(thresholds, u)
    if k == 0:
        return NO_PURCHASE
    if k > len(assortment):
        k = len(assortment)  # guards the measure-zero edge u >= thresholds[-1]
    return int(assortment[k - 1])


def sample_choice(instance: MNLInstance, assortment: Sequence[int], rng: np.random.Generator) -> int:
    """Draw one customer choice from the offered assortment.

    Consumes exactly one uniform draw from ``rng`` per call; the draw is mapped
    through cumulative probabilities ordered (no-purchase, item_1, item_2, ...)
    so replays with the same stream are bit-reproducible.
    """
    _validate_offer(instance, assortment)
    if len(assortment) == 0:
        raise ValueError("cannot sample a choice from an empty assortment")
    thresholds = _choice_thresholds(instance, assortment)
    return _outcome_from_uniform(thresholds, assortment, rng.random())


def random_instance(
    n_items: int,
    v_range: Tuple[float, float] = (0.1, 1.0),
    r_range: Tuple[float, float] = (0.5, 1.5),
    rng: np.random.Generator | None = None,
) -> MNLInstance:
    """Draw an instance with i.i.d. uniform attractions and revenues.

    All attractions are drawn first, then all revenues, each in item-index
    order, so a given generator state pins the instance exactly.
    """
    if rng is None:
        raise ValueError("an explicit numpy Generator is required")
    if n_items < 1:
        raise ValueError("n_items must be at least 1")
    for name, (lo, hi) in (("v_range", v_range), ("r_range", r_range)):
        if not (0 < lo <= hi):
            raise ValueError(f"{name} must satisfy 0 < low <= high, got ({lo}, {hi})")
    v = rng.uniform(v_range[0], v_range[1], n_items)
    r = rng.uniform(r_range[0], r_range[1], n_items)
    return MNLInstance(v, r)
