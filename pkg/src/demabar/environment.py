"""Stochastic bandit instances and reproducible reward generation.

Randomness is organized as named substreams of a single root seed so that
trials can run concurrently (or in any order) with bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ROLE_IDS = {"env": 0, "adversary": 1, "agent": 2, "byzantine": 3, "instance": 4}


@dataclass(frozen=True)
class RngStream:
    """Factory for deterministic per-(trial, role) random generators."""

    root_seed: int

    def generator(self, trial: int, role: str, index: int = 0) -> np.random.Generator:
        """Generator for a named substream.

        The same (root_seed, trial, role, index) always yields the same
        draw sequence, independent of every other substream.
        """
        role_id = _ROLE_IDS[role]
        seq = np.random.SeedSequence(
            entropy=self.root_seed, spawn_key=(trial, role_id, index)
        )
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class BanditInstance:
    """A fixed K-armed problem: means, distribution family, derived gaps.

    ``min_gap`` is None when every arm is optimal (degenerate instance).
    """

    means: np.ndarray
    family: str  # "gaussian" or "bernoulli"
    sigma: float
    clip: bool

    @property
    def arm_count(self) -> int:
        return len(self.means)

    @property
    def optimal_arm(self) -> int:
        return int(np.argmax(self.means))

    @property
    def gaps(self) -> np.ndarray:
        return self.means.max() - self.means

    @property
    def min_gap(self) -> float | None:
        positive = self.gaps[self.gaps > 0]
        return float(positive.min()) if positive.size else None

    @property
    def degenerate(self) -> bool:
        return self.min_gap is None


def sample_instance(
    arm_count: int,
    rng: np.random.Generator,
    family: str = "gaussian",
    sigma: float = 0.01,
    means=None,
    mean_range: tuple[float, float] = (0.1, 0.9),
    clip: bool = True,
) -> BanditInstance:
    """Draw arm means uniformly from mean_range, or take them from config."""
    if family not in ("gaussian", "bernoulli"):
        raise ValueError(f"unknown reward family {family!r}")
    if means is not None:
        mu = np.asarray(means, dtype=np.float64)
    else:
        if arm_count < 2:
            raise ValueError(f"need at least 2 arms, got {arm_count}")
        lo, hi = mean_range
        mu = rng.uniform(lo, hi, size=arm_count)
    if (mu < 0).any() or (mu > 1).any():
        raise ValueError("arm means must lie in [0, 1]")
    return BanditInstance(means=mu, family=family, sigma=float(sigma), clip=clip)


def sample_reward_block(
    inst: BanditInstance, rng: np.random.Generator, rounds: int, agents: int
) -> np.ndarray:
    """Sample a (rounds, agents, K) reward tensor, i.i.d. over all axes.

    Generation is a single draw so the realized rewards do not depend on how
    (or whether) agents later consume them. Gaussian draws are clipped to
    [0, 1] when the instance requests it.
    """
    shape = (rounds, agents, inst.arm_count)
    if inst.family == "bernoulli":
        return (rng.random(shape) < inst.means).astype(np.float64)
    rewards = rng.normal(loc=inst.means, scale=inst.sigma, size=shape)
    if inst.clip:
        np.clip(rewards, 0.0, 1.0, out=rewards)
    return rewards


def sample_reward_vectors(
    inst: BanditInstance, rng: np.random.Generator, agents: int
) -> np.ndarray:
    """One round's (agents, K) reward matrix."""
    return sample_reward_block(inst, rng, 1, agents)[0]
