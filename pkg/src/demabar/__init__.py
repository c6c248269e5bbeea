"""Robust decentralized multi-agent bandit simulator.

A round-synchronous simulator for cooperative multi-armed bandits on graphs
under adversarial reward corruption and Byzantine agents, built around an
epoch-based algorithm with count filtering and trimmed-mean aggregation.
"""

__version__ = "0.1.0"

from .agent import Agent, EpochMessage, epoch_length, lambda_value, trimmed_filter
from .config import ExperimentConfig, config_from_dict, parse_config
from .engine import ExperimentResult, TrialResult, run_experiment, run_trial
from .environment import BanditInstance, RngStream, sample_instance
from .metrics import RegretCurve, aggregate, comm_cost, pseudo_regret, summarize
from .topology import Topology, build_graph, neighborhood_stats

__all__ = [
    "Agent",
    "BanditInstance",
    "EpochMessage",
    "ExperimentConfig",
    "ExperimentResult",
    "RegretCurve",
    "RngStream",
    "Topology",
    "TrialResult",
    "aggregate",
    "build_graph",
    "comm_cost",
    "config_from_dict",
    "epoch_length",
    "lambda_value",
    "neighborhood_stats",
    "parse_config",
    "pseudo_regret",
    "run_experiment",
    "run_trial",
    "sample_instance",
    "summarize",
    "trimmed_filter",
]
