"""The epoch-based robust bandit agent: planning, filtering, gap updates.

Each agent runs synchronized epochs. Within epoch m it pulls arms from a
fixed sampling distribution derived from its gap estimates, then exchanges
per-arm reward sums with its w-neighborhood and aggregates them through a
count filter plus trimmed mean before re-estimating the gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .topology import NeighborhoodStats

LAMBDA_THEORY = "theory"
LAMBDA_EXPERIMENT = "experiment"


def lambda_value(rule, agents: int, horizon: int) -> float:
    """Resolve the exploration constant.

    ``theory`` is the analysis-grade value 2^9 ln(2VT); ``experiment`` is the
    smaller 5 ln(4 V^2 T) used for desk-scale runs. A number passes through.
    """
    if rule == LAMBDA_THEORY:
        return 2.0**9 * math.log(2 * agents * horizon)
    if rule == LAMBDA_EXPERIMENT:
        return 5.0 * math.log(4 * agents * agents * horizon)
    return float(rule)


def epoch_length(lam: float, arm_count: int, alpha: float, v_min_w: int, m: int) -> int:
    """Instance-independent length N_m of epoch m (pull rounds only)."""
    return math.ceil(lam * arm_count * 4.0 ** (m - 1) / ((1.0 - 2.0 * alpha) * v_min_w))


@dataclass(frozen=True)
class EpochMessage:
    """Broadcast tuple: origin agent, its per-arm reward sums and pull budgets."""

    origin: int
    epoch: int
    sums: np.ndarray
    counts: np.ndarray


@dataclass
class Agent:
    """Per-agent algorithm state for one trial.

    ``planned`` holds the real-valued expected pull counts for the current
    epoch; ``reward_sums`` accumulates the observed (possibly corrupted)
    rewards of the current epoch only.
    """

    agent_id: int
    arm_count: int
    alpha: float
    lam: float
    stats: NeighborhoodStats
    epoch: int = 0
    gap_estimates: np.ndarray = None
    planned: np.ndarray = None
    sampling: np.ndarray = None
    fallback_arm: int = 0
    reward_sums: np.ndarray = None
    last_filtered: np.ndarray = None
    filter_reset_events: int = 0
    _prev_scores: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.gap_estimates = np.ones(self.arm_count)

    @property
    def neighborhood_size(self) -> int:
        return int(self.stats.sizes[self.agent_id])

    @property
    def v_i_w(self) -> int:
        return int(self.stats.v_i_w[self.agent_id])

    def count_cap(self, m: int) -> float:
        """Per-epoch upper bound on any planned pull count."""
        return self.lam * 4.0 ** (m - 1) / ((1.0 - 2.0 * self.alpha) * self.v_i_w)

    def begin_epoch(self, m: int, n_m: int) -> None:
        """Plan epoch m: pull budgets, fallback arm, sampling distribution."""
        assert m == self.epoch + 1, "epochs must advance one at a time"
        self.epoch = m
        denom = (1.0 - 2.0 * self.alpha) * self.v_i_w
        inv_sq = self.gap_estimates**-2.0
        planned = np.minimum(16.0 * self.lam * inv_sq, self.lam * 4.0 ** (m - 1)) / denom

        target = 2.0 ** (-(m - 1))
        eligible = np.nonzero(self.gap_estimates == target)[0]
        assert eligible.size > 0, "no arm with gap estimate at the epoch floor"
        if m == 1 or self._prev_scores is None:
            self.fallback_arm = int(eligible[0])
        else:
            # best previous-epoch performer among eligible arms, lowest index on ties
            scores = self._prev_scores[eligible]
            self.fallback_arm = int(eligible[int(np.argmax(scores))])

        planned[self.fallback_arm] = 0.0
        leftover = n_m - planned.sum()
        assert leftover >= 0.0, "epoch budget cannot absorb the planned pulls"
        planned[self.fallback_arm] = leftover
        self.planned = planned
        self.sampling = planned / n_m
        assert abs(self.sampling.sum() - 1.0) < 1e-12
        self.reward_sums = np.zeros(self.arm_count)

    def sample_arms(self, rng: np.random.Generator, rounds: int) -> np.ndarray:
        """Draw arm choices for a block of pull rounds, i.i.d. from p."""
        cdf = np.cumsum(self.sampling)
        cdf[-1] = 1.0
        return np.searchsorted(cdf, rng.random(rounds), side="right").astype(np.int64)

    def record_observation(self, arm: int, reward: float) -> None:
        if not (0.0 <= reward <= 1.0):
            raise ValueError(f"observation {reward} outside [0, 1]")
        self.reward_sums[arm] += reward

    def make_message(self) -> EpochMessage:
        return EpochMessage(
            origin=self.agent_id,
            epoch=self.epoch,
            sums=self.reward_sums.copy(),
            counts=self.planned.copy(),
        )

    def count_thresholds(self) -> np.ndarray:
        """Minimum acceptable neighbor pull count per arm for this epoch."""
        denom = (1.0 - 2.0 * self.alpha) * self.neighborhood_size
        return self.lam * self.gap_estimates**-2.0 / denom

    def filter_epoch(self, inbox: dict[int, EpochMessage]) -> np.ndarray:
        """Aggregate neighborhood messages into per-arm reward estimates.

        ``inbox`` maps origin id to that origin's epoch message; the agent's
        own message must be present. Falls back to own statistics only when
        the inbox is otherwise empty.
        """
        if not inbox:
            inbox = {self.agent_id: self.make_message()}
        origins = sorted(inbox)
        sums = np.stack([inbox[j].sums for j in origins])
        counts = np.stack([inbox[j].counts for j in origins])
        thresholds = self.count_thresholds()
        estimates, resets = trimmed_filter(
            sums, counts, thresholds, self.neighborhood_size, self.alpha
        )
        self.filter_reset_events += int(resets.sum())
        self.last_filtered = estimates
        return estimates

    def update_gaps(self, filtered: np.ndarray) -> None:
        """Re-estimate gaps from the filtered per-arm reward estimates."""
        scores = filtered - self.gap_estimates / 8.0
        best = scores.max()
        self.gap_estimates = np.maximum(2.0 ** (-self.epoch), best - filtered)
        self._prev_scores = scores


def trimmed_filter(
    sums: np.ndarray,
    counts: np.ndarray,
    thresholds: np.ndarray,
    neighborhood_size: int,
    alpha: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Count-filtered trimmed mean of per-neighbor reward averages.

    Args:
        sums: (n, K) per-neighbor reward sums.
        counts: (n, K) per-neighbor reported pull counts.
        thresholds: (K,) minimum acceptable count per arm.
        neighborhood_size: |N_w(i)| the filter is sized for.
        alpha: tolerated fraction of bad neighbors, in [0, 0.5).

    Returns:
        (estimates, resets): (K,) filtered estimates capped at 1, and a (K,)
        bool array marking arms where the count filter removed too many
        neighbors and was reset to the minimum reported count.
    """
    n, arm_count = sums.shape
    keep_floor = (1.0 - 2.0 * alpha) * neighborhood_size
    estimates = np.empty(arm_count)
    resets = np.zeros(arm_count, dtype=bool)
    averages = sums / counts
    for k in range(arm_count):
        eligible = counts[:, k] >= thresholds[k]
        if eligible.sum() < keep_floor:
            resets[k] = True
            eligible = np.ones(n, dtype=bool)
        values = np.sort(averages[eligible, k])
        f = max(0, math.floor((values.size - keep_floor) / 2.0))
        trimmed = values[f : values.size - f]
        assert trimmed.size >= keep_floor - 1e-9
        estimates[k] = min(trimmed.mean(), 1.0)
    return estimates, resets
