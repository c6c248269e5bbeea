"""Pseudo-regret, communication cost, and cross-trial aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import ExperimentResult, TrialResult


def pseudo_regret(result: TrialResult, agent: int, upto: int | None = None) -> float:
    """Cumulative pseudo-regret of one agent through round ``upto`` (1-based).

    Recomputed from the pulled arms and true means; matches the running sum
    stored in the trial's regret log.
    """
    t = result.pulls.shape[0] if upto is None else upto
    gaps = result.means.max() - result.means
    return float(gaps[result.pulls[:t, agent]].sum())


def regret_curve_from_pulls(result: TrialResult, agent: int) -> np.ndarray:
    """Round-by-round cumulative pseudo-regret rebuilt from the pull log."""
    gaps = result.means.max() - result.means
    return np.cumsum(gaps[result.pulls[:, agent]])


def comm_cost(result: TrialResult, upto: int | None = None) -> int:
    """Total broadcasts through round ``upto`` (one per agent per comm round)."""
    t = result.broadcasts.shape[0] if upto is None else upto
    return int(result.broadcasts[:t].sum())


@dataclass(frozen=True)
class RegretCurve:
    """Pointwise trial mean and sample standard deviation of regret curves."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.mean)


def aggregate(curves: np.ndarray) -> RegretCurve:
    """Aggregate a (trials, T) regret matrix into mean and sample std."""
    curves = np.atleast_2d(curves)
    mean = curves.mean(axis=0)
    if curves.shape[0] > 1:
        std = curves.std(axis=0, ddof=1)
    else:
        std = np.zeros_like(mean)
    return RegretCurve(mean=mean, std=std)


def summarize(result: ExperimentResult) -> RegretCurve:
    """Mean/std over trials of the across-agent average regret curve."""
    return aggregate(result.regret_matrix())
