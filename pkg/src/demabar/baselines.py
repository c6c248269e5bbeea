"""Non-cooperative reference algorithms.

UCB1 (exploration coefficient 1.5) is implemented here, vectorized across
agents since the agents never interact. IND-BARBAR is not a separate
implementation: it is the epoch algorithm run in its single-neighborhood
degenerate mode (w=0, alpha=0), wired up by the engine.

Further baselines from the literature (DRAA, MA-BARBAT, resilient
decentralized UCB, IND-FTRL) are declared as plugin slots only: register an
implementation under a name and select it from the config.
"""

from __future__ import annotations

import math

import numpy as np


class UcbBank:
    """Independent UCB1 learners for every agent.

    Plays each arm once in round-robin order, then picks the arm maximizing
    mean + sqrt(coefficient * ln(t) / count); ties resolve to lowest index.
    """

    def __init__(self, agents: int, arm_count: int, coefficient: float = 1.5):
        self.agents = agents
        self.arm_count = arm_count
        self.coefficient = coefficient
        self.counts = np.zeros((agents, arm_count))
        self.sums = np.zeros((agents, arm_count))

    def select(self, t: int) -> np.ndarray:
        """Arms for round t (1-based), one per agent."""
        if t <= self.arm_count:
            return np.full(self.agents, t - 1, dtype=np.int64)
        bonus = np.sqrt(self.coefficient * math.log(t) / self.counts)
        return np.argmax(self.sums / self.counts + bonus, axis=1)

    def observe(self, arms: np.ndarray, rewards: np.ndarray) -> None:
        """Record one observed reward per agent for its pulled arm."""
        idx = np.arange(self.agents)
        self.counts[idx, arms] += 1
        self.sums[idx, arms] += rewards


def ucb_step(bank: UcbBank, t: int) -> np.ndarray:
    return bank.select(t)


# Registry of algorithm names accepted by the config. Values are descriptive
# only; the engine dispatches on the name. External baselines may be added by
# registering a runner with the engine (see engine.EXTERNAL_BASELINES).
KNOWN_ALGORITHMS = ("demabar", "ind_barbar", "ind_ucb")
PLUGIN_SLOTS = ("draa", "ma_barbat", "resilient_decentralized_ucb", "ind_ftrl")
