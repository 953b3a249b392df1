"""Epoch-based UCB assortment policy with forced exploration of the complement.

The policy offers the plug-in-optimal assortment under optimistic attraction
indices, but with a decaying probability it offers the complement of that set
instead, so every item keeps accruing observations.  Per-item purchase counts
within an epoch are unbiased for the attractions, and an inverse-propensity
average over epochs yields estimates whose error decays at a rate traded off
against regret through the exploration-decay exponent ``alpha``.

Three selection variants are supported:

* ``standard``   - explore the full complement with probability 1/(2 l^alpha).
* ``k-star``     - the complement is split into chunks of at most ``k_star``
                   items, each offered with probability 1/(ceil(N/k_star) l^alpha).
* ``general``    - for attractions that may exceed the no-purchase weight;
                   uses a wider index and forces dedicated exploratory epochs
                   for items whose epoch count is below a logarithmic threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .epochs import EpochRecord
from .family import CapacityError, FeasibleFamily, argmax_revenue, assortment_score
from .model import Assortment

VARIANTS = ("standard", "k-star", "general")

OPTIMISTIC = "optimistic"
COMPLEMENT = "complement"
COMPLEMENT_CHUNK = "complement-chunk"
EXPLORATORY = "exploratory"


@dataclass(frozen=True)
class PolicyConfig:
    """Knobs of the exploring UCB policy.

    ``alpha`` controls how fast forced exploration decays; values in [0, 1/2]
    carry the regret and estimation guarantees, larger values still run but
    are outside the supported range (see ``in_theory``).  ``k_star`` caps the
    size of exploratory offers for the k-star variant.  ``b_bound`` documents
    the assumed ceiling on attractions for the general variant; it only
    affects bookkeeping, not behavior.
    """

    alpha: float = 0.0
    variant: str = "standard"
    k_star: Optional[int] = None
    b_bound: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "k-star":
            if self.k_star is None or self.k_star < 1:
                raise ValueError("k-star variant requires k_star >= 1")
        elif self.k_star is not None:
            raise ValueError("k_star only applies to the k-star variant")
        if self.b_bound is not None and self.b_bound < 1.0:
            raise ValueError("b_bound must be at least 1")

    @property
    def in_theory(self) -> bool:
        """Whether ``alpha`` lies in the range the guarantees cover."""
        return self.alpha <= 0.5


class PolicyState:
    """Running statistics: one slot per item, epochs indexed from 1."""

    def __init__(self, n_items: int):
        if n_items < 1:
            raise ValueError("n_items must be at least 1")
        self.n_items = n_items
        self.epoch = 1  # index of the epoch about to run
        self.appearances = np.zeros(n_items, dtype=np.int64)  # epochs containing the item
        self.count_totals = np.zeros(n_items)  # summed per-epoch purchase counts
        self.mean_counts = np.zeros(n_items)  # count_totals / appearances
        self.ucb = np.ones(n_items)  # optimistic index, initialized to 1
        self.ipw_sums = np.zeros(n_items)  # propensity-weighted count totals
        self.last_star: Optional[Assortment] = None
        self.last_selection_probs: Optional[np.ndarray] = None
        self.last_chunks: Optional[Tuple[Assortment, ...]] = None

    @property
    def completed(self) -> int:
        """Number of epochs whose observations have been absorbed."""
        return self.epoch - 1


@dataclass(frozen=True)
class Selection:
    """What the policy chose to offer and under what inclusion probabilities."""

    offered: Assortment
    selection_probs: np.ndarray
    kind: str
    star: Assortment
    chunks: Optional[Tuple[Assortment, ...]] = None


@dataclass(frozen=True)
class FinalEstimates:
    """Inverse-propensity attraction estimates after ``completed_epochs`` epochs."""

    v_hat: np.ndarray
    completed_epochs: int


def confidence_scale(n_items: int, ell: int) -> float:
    """The shared log term 48*log(sqrt(N)*l + 1) of index radii and thresholds."""
    return 48.0 * math.log(math.sqrt(n_items) * ell + 1.0)


def ucb_index(mean_count: float, appearances: int, n_items: int, ell: int) -> float:
    """Optimistic attraction index after ``ell`` completed epochs.

    Items never yet offered (``appearances == 0``) keep the initialization
    value 1.
    """
    if appearances == 0:
        return 1.0
    radius = confidence_scale(n_items, ell) / appearances
    return mean_count + math.sqrt(mean_count * radius) + radius


def ucb2_index(mean_count: float, appearances: int, n_items: int, ell: int) -> float:
    """Wider index for the general variant; equals ``ucb_index`` when the mean
    count is at most 1, and inflates the middle term by the mean beyond that."""
    if appearances == 0:
        return 1.0
    radius = confidence_scale(n_items, ell) / appearances
    return mean_count + max(math.sqrt(mean_count), mean_count) * math.sqrt(radius) + radius


def exploration_prob(config: PolicyConfig, n_items: int, ell: int) -> float:
    """Per-epoch probability assigned to each exploratory offer at epoch ``ell``."""
    if ell < 1:
        raise ValueError("epoch indices start at 1")
    if config.variant == "k-star":
        return 1.0 / (math.ceil(n_items / config.k_star) * ell**config.alpha)
    return 1.0 / (2.0 * ell**config.alpha)


def exploration_threshold(n_items: int, ell: int) -> float:
    """Minimum epoch count below which the general variant forces exploration."""
    return confidence_scale(n_items, ell)


def optimistic_assortment(
    state: PolicyState, family: FeasibleFamily, revenues: Sequence[float]
) -> Tuple[Assortment, float]:
    """Best assortment in the family under the current optimistic indices."""
    return argmax_revenue(family, state.ucb, revenues)


def complement_of(items: Sequence[int], n_items: int) -> Assortment:
    inside = set(items)
    return tuple(i for i in range(1, n_items + 1) if i not in inside)


def partition_complement(complement: Sequence[int], k_star: int) -> Tuple[Assortment, ...]:
    """Split the complement, in ascending item order, into runs of at most ``k_star``."""
    items = tuple(sorted(complement))
    return tuple(items[j : j + k_star] for j in range(0, len(items), k_star))


def select_assortment(
    state: PolicyState,
    config: PolicyConfig,
    family: FeasibleFamily,
    revenues: Sequence[float],
    rng: np.random.Generator,
) -> Selection:
    """Pick the next epoch's offer.

    At most one uniform draw is consumed, and only when there is an actual
    randomization to resolve (a nonempty complement, or at least one chunk).
    The complement offered by the standard variant may exceed the family's
    cardinality cap; it is offered anyway.  ``selection_probs`` always holds
    the inclusion probability of every item given the optimistic set.
    """
    n = state.n_items
    star, _ = optimistic_assortment(state, family, revenues)
    ell = state.epoch
    state.last_star = star
    state.last_chunks = None

    if config.variant == "general":
        threshold = exploration_threshold(n, ell)
        if any(state.appearances[i - 1] < threshold for i in star):
            under = tuple(i for i in range(1, n + 1) if state.appearances[i - 1] < threshold)
            offered = under[: min(family.max_size, len(under))]
            probs = np.ones(n)
            state.last_selection_probs = probs
            return Selection(offered, probs, EXPLORATORY, star)

    a_ell = exploration_prob(config, n, ell)
    comp = complement_of(star, n)
    star_idx = np.asarray(star, dtype=int) - 1

    if config.variant == "k-star":
        chunks = partition_complement(comp, config.k_star)
        m = len(chunks)
        state.last_chunks = chunks
        if m == 0:
            probs = np.ones(n)
            state.last_selection_probs = probs
            return Selection(star, probs, OPTIMISTIC, star, chunks)
        total = m * a_ell
        if total > 1.0 + 1e-12:
            raise ValueError("chunk exploration probabilities exceed 1")
        probs = np.full(n, a_ell)
        probs[star_idx] = 1.0 - total
        state.last_selection_probs = probs
        u = rng.random()
        if u < total:
            j = min(int(u / a_ell), m - 1)
            return Selection(chunks[j], probs, COMPLEMENT_CHUNK, star, chunks)
        return Selection(star, probs, OPTIMISTIC, star, chunks)

    # standard variant (also the non-exploratory path of the general variant)
    if not comp:
        probs = np.ones(n)
        state.last_selection_probs = probs
        return Selection(star, probs, OPTIMISTIC, star)
    probs = np.full(n, a_ell)
    probs[star_idx] = 1.0 - a_ell
    state.last_selection_probs = probs
    if rng.random() < a_ell:
        return Selection(comp, probs, COMPLEMENT, star)
    return Selection(star, probs, OPTIMISTIC, star)


def _refresh_indices(state: PolicyState, config: PolicyConfig) -> None:
    """Recompute indices for all observed items using the just-completed epoch.

    Items with no appearances keep the initialization value 1.
    """
    ell = state.completed
    mask = state.appearances > 0
    if not mask.any():
        return
    t = state.appearances[mask].astype(float)
    vb = state.mean_counts[mask]
    radius = confidence_scale(state.n_items, ell) / t
    if config.variant == "general":
        middle = np.maximum(np.sqrt(vb), vb) * np.sqrt(radius)
    else:
        middle = np.sqrt(vb * radius)
    state.ucb[mask] = vb + middle + radius


def observe_epoch(state: PolicyState, config: PolicyConfig, record: EpochRecord) -> PolicyState:
    """Absorb one completed epoch into the running statistics.

    Rejects truncated records: an epoch cut off by the horizon never saw its
    terminal no-purchase, so its counts are biased low.  Items not offered are
    untouched except that every observed item's index is refreshed with the
    new epoch count.
    """
    if record.truncated:
        raise ValueError("truncated epochs must not update the estimators")
    if record.epoch_index != state.epoch:
        raise ValueError(
            f"record is for epoch {record.epoch_index}, state expects {state.epoch}"
        )
    idx = np.asarray(record.offered, dtype=int) - 1
    counts = record.counts[idx].astype(float)
    probs = record.selection_probs[idx]
    state.appearances[idx] += 1
    state.count_totals[idx] += counts
    state.mean_counts[idx] = state.count_totals[idx] / state.appearances[idx]
    state.ipw_sums[idx] += counts / probs
    state.epoch += 1
    _refresh_indices(state, config)
    return state


def finalize(state: PolicyState) -> FinalEstimates:
    """Average the propensity-weighted counts over completed epochs."""
    if state.completed == 0:
        raise ValueError("no completed epochs to finalize")
    return FinalEstimates(state.ipw_sums / state.completed, state.completed)


def plug_in_revenue(v_hat: Sequence[float], revenues: Sequence[float], items: Sequence[int]) -> float:
    """Expected-revenue estimate for ``items`` under estimated attractions."""
    if len(items) == 0:
        return 0.0
    return assortment_score(v_hat, revenues, items)


def revenue_estimate(
    estimates: FinalEstimates, revenues: Sequence[float], items: Sequence[int]
) -> float:
    return plug_in_revenue(estimates.v_hat, revenues, items)


@dataclass
class AteEstimates:
    """Pairwise treatment-effect estimates between items and between assortments.

    Item pairs compare attraction estimates; assortment pairs compare plug-in
    revenue estimates, with assortments identified by their 1-based rank in
    the family's canonical enumeration.  Pairs are produced lazily; full
    tables are only materialized below a size cap.
    """

    v_hat: np.ndarray
    revenues: np.ndarray
    family: FeasibleFamily
    table_cap: int = 10**6

    def __post_init__(self):
        self.v_hat = np.asarray(self.v_hat, dtype=float)
        self.revenues = np.asarray(self.revenues, dtype=float)
        self._revenue_hats = None

    def attraction_gap(self, i: int, j: int) -> float:
        """Estimated attraction difference v_hat_i - v_hat_j."""
        return float(self.v_hat[i - 1] - self.v_hat[j - 1])

    def _revenue_vector(self) -> np.ndarray:
        if self._revenue_hats is None:
            m = self.family.indicator_matrix()
            self._revenue_hats = (m @ (self.revenues * self.v_hat)) / (1.0 + m @ self.v_hat)
        return self._revenue_hats

    def revenue_gap(self, rank_a: int, rank_b: int) -> float:
        """Estimated revenue difference between two enumerated assortments."""
        rv = self._revenue_vector()
        return float(rv[rank_a - 1] - rv[rank_b - 1])

    def iter_attraction_gaps(self) -> Iterator[Tuple[int, int, float]]:
        n = self.v_hat.size
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                yield i, j, self.attraction_gap(i, j)

    def iter_revenue_gaps(self) -> Iterator[Tuple[int, int, float]]:
        count = self.family.size
        for a in range(1, count + 1):
            for b in range(a + 1, count + 1):
                yield a, b, self.revenue_gap(a, b)

    def attraction_table(self) -> np.ndarray:
        return self.v_hat[:, None] - self.v_hat[None, :]

    def revenue_table(self) -> np.ndarray:
        count = self.family.size
        if count * count > self.table_cap:
            raise CapacityError(
                f"revenue gap table would hold {count * count} entries, above {self.table_cap}"
            )
        rv = self._revenue_vector()
        return rv[:, None] - rv[None, :]


def ate_estimates(
    estimates: FinalEstimates, revenues: Sequence[float], family: FeasibleFamily
) -> AteEstimates:
    """Pairwise effect estimates derived from the final attraction estimates."""
    return AteEstimates(estimates.v_hat, np.asarray(revenues, dtype=float), family)
