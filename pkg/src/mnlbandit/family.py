"""Cardinality-constrained assortment family: enumeration and exact optimization."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .model import Assortment

# Enumerations beyond this many assortments are refused rather than silently built.
DEFAULT_ENUMERATION_CAP = 1_000_000


class CapacityError(ValueError):
    """Raised when a family is too large to enumerate explicitly."""


def family_size(n_items: int, max_size: int, include_empty: bool = False) -> int:
    total = sum(math.comb(n_items, k) for k in range(1, max_size + 1))
    return total + 1 if include_empty else total


@dataclass
class FeasibleFamily:
    """All assortments of at most ``max_size`` of the items ``1..n_items``.

    The enumeration is materialized once, ordered by cardinality and then
    lexicographically, and reused for every optimization call.
    """

    n_items: int
    max_size: int
    include_empty: bool = False
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    _assortments: tuple = field(default=None, repr=False, compare=False)
    _matrix: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be at least 1")
        if not 1 <= self.max_size <= self.n_items:
            raise ValueError("max_size must lie in 1..n_items")
        count = family_size(self.n_items, self.max_size, self.include_empty)
        if count > self.enumeration_cap:
            raise CapacityError(
                f"family has {count} assortments, above the cap of {self.enumeration_cap}"
            )

    @property
    def size(self) -> int:
        return family_size(self.n_items, self.max_size, self.include_empty)

    def assortments(self) -> Tuple[Assortment, ...]:
        """The cached enumeration, by cardinality then lexicographic order."""
        if self._assortments is None:
            sets = []
            if self.include_empty:
                sets.append(())
            for k in range(1, self.max_size + 1):
                sets.extend(itertools.combinations(range(1, self.n_items + 1), k))
            self._assortments = tuple(sets)
        return self._assortments

    def indicator_matrix(self) -> np.ndarray:
        """Float membership matrix, one row per assortment, one column per item."""
        if self._matrix is None:
            sets = self.assortments()
            m = np.zeros((len(sets), self.n_items))
            for row, s in enumerate(sets):
                for i in s:
                    m[row, i - 1] = 1.0
            m.flags.writeable = False
            self._matrix = m
        return self._matrix

    def __contains__(self, items) -> bool:
        try:
            s = tuple(items)
        except TypeError:
            return False
        if len(s) == 0:
            return self.include_empty
        if len(s) > self.max_size or len(set(s)) != len(s):
            return False
        return all(isinstance(i, (int, np.integer)) and 1 <= i <= self.n_items for i in s)

    def __len__(self) -> int:
        return self.size


def assortment_score(weights: Sequence[float], revenues: Sequence[float], items: Iterable[int]) -> float:
    """Plug-in expected revenue of ``items`` under the given attraction weights."""
    num = sum(revenues[i - 1] * weights[i - 1] for i in items)
    den = 1.0 + sum(weights[i - 1] for i in items)
    return num / den


def argmax_revenue(
    family: FeasibleFamily, weights: Sequence[float], revenues: Sequence[float]
) -> Tuple[Assortment, float]:
    """Exact maximizer of the plug-in expected revenue over the family.

    Ties go to the smallest cardinality and then the lexicographically
    smallest item sequence, which is the enumeration order, so the first
    maximal row wins.  The returned score is recomputed on the winning set
    with :func:`assortment_score` so it is attained exactly.
    """
    w = np.asarray(weights, dtype=float)
    r = np.asarray(revenues, dtype=float)
    if w.shape != (family.n_items,) or r.shape != (family.n_items,):
        raise ValueError("weights and revenues must have one entry per item")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    m = family.indicator_matrix()
    scores = (m @ (r * w)) / (1.0 + m @ w)
    best = int(np.argmax(scores))
    winner = family.assortments()[best]
    return winner, assortment_score(w, r, winner)
