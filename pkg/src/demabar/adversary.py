"""Reward-corruption adversary and Byzantine agent behaviors.

The corruption adversary sees every agent's full reward vector plus the arms
the agents are about to pull, modifies rewards of attackable agents, and is
charged per agent-round at the max over arms of the absolute perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .agent import EpochMessage
from .environment import BanditInstance
from .topology import Topology


@dataclass
class CorruptionLedger:
    """Budget accounting for the corruption adversary.

    ``spent`` never exceeds ``budget``; the final corrupting round is scaled
    down so the budget is spent exactly.
    """

    budget: float
    corrupted_agents: frozenset
    spent: float = 0.0

    @property
    def remaining(self) -> float:
        return self.budget - self.spent

    @property
    def exhausted(self) -> bool:
        return self.remaining <= 0.0


def targeted_attack(
    inst: BanditInstance,
    rewards: np.ndarray,
    pulls: np.ndarray,
    ledger: CorruptionLedger,
    scope: str = "pulled",
    trigger_reward_one: bool = False,
) -> np.ndarray:
    """Corrupt rewards so agents favor the target arms (means <= 0.5).

    With scope ``pulled`` only the entry of the arm each attackable agent is
    about to pull is forced toward 0 (when that arm is a non-target); with
    scope ``all`` every non-target entry of the row is. The per-agent charge
    is the max over arms of |perturbation|; a charge exceeding the remaining
    budget scales the whole perturbation down so spent == budget exactly.

    ``trigger_reward_one`` restricts corruption to realized rewards equal to
    1 (only meaningful for Bernoulli rewards).
    """
    if ledger.exhausted or not ledger.corrupted_agents:
        return rewards
    non_target = inst.means > 0.5
    corrupted = rewards.copy()
    for i in sorted(ledger.corrupted_agents):
        if ledger.exhausted:
            break
        row = rewards[i]
        diff = np.zeros_like(row)
        if scope == "pulled":
            k = int(pulls[i])
            if non_target[k] and (not trigger_reward_one or row[k] == 1.0):
                diff[k] = row[k]
        else:
            mask = non_target if not trigger_reward_one else non_target & (row == 1.0)
            diff[mask] = row[mask]
        charge = diff.max(initial=0.0)
        if charge == 0.0:
            continue
        if charge > ledger.remaining:
            diff *= ledger.remaining / charge
            charge = ledger.remaining
        corrupted[i] = np.clip(row - diff, 0.0, 1.0)
        ledger.spent += charge
    return corrupted


@dataclass
class ByzantineSpec:
    """Which agents are Byzantine and how they forge messages.

    ``gaussian_scale`` is interpreted as a variance by default (0.001), per
    the experimental protocol; set ``scale_is_std`` to read it as a standard
    deviation instead.
    """

    byzantine_agents: frozenset
    attack: str  # "adaptive" or "gaussian"
    biases: np.ndarray | None = None  # (V, K), rows for non-Byzantine ids unused
    gaussian_scale: float = 0.001
    scale_is_std: bool = False

    @property
    def gaussian_std(self) -> float:
        return self.gaussian_scale if self.scale_is_std else math.sqrt(self.gaussian_scale)


def draw_biases(
    agents: int, arm_count: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-(agent, arm) biases in (0, 1) for the gaussian attack."""
    return rng.uniform(0.0, 1.0, size=(agents, arm_count))


def validate_byzantine_placement(
    topology: Topology, byzantine_agents: frozenset, alpha: float
) -> list[str]:
    """Check every normal agent has at most alpha * |N_1(i)| Byzantine neighbors.

    Returns human-readable warnings; an empty list means the placement is
    within tolerance.
    """
    warnings = []
    for i in range(topology.node_count):
        if i in byzantine_agents:
            continue
        closed = set(topology.neighbors(i)) | {i}
        bad = len(closed & byzantine_agents)
        if bad > alpha * len(closed):
            warnings.append(
                f"agent {i} has {bad} Byzantine neighbors out of {len(closed)} "
                f"(tolerance alpha={alpha})"
            )
    return warnings


def byzantine_message(
    spec: ByzantineSpec,
    honest: EpochMessage,
    recipient: int,
    inst: BanditInstance,
    count_cap: float,
    rng: np.random.Generator,
) -> EpochMessage:
    """Forge the message a Byzantine sender delivers to one recipient.

    Adaptive: report the mirrored true means (1 - mu_k) with counts inflated
    to the per-epoch cap so the count filter never rejects them. Gaussian:
    add an independent N(bias, scale) offset to each reported average.
    """
    arm_count = len(honest.sums)
    if spec.attack == "adaptive":
        counts = np.full(arm_count, count_cap)
        sums = (1.0 - inst.means) * counts
    elif spec.attack == "gaussian":
        biases = spec.biases[honest.origin]
        offsets = rng.normal(biases, spec.gaussian_std)
        counts = honest.counts.copy()
        sums = (honest.sums / honest.counts + offsets) * counts
    else:
        raise ValueError(f"unknown Byzantine attack {spec.attack!r}")
    return EpochMessage(origin=honest.origin, epoch=honest.epoch, sums=sums, counts=counts)


def byzantine_arm_choice(arm_count: int, rng: np.random.Generator) -> int:
    """Byzantine agents pull a uniformly random arm."""
    return int(rng.integers(arm_count))
