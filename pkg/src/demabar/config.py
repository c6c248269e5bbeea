"""Experiment configuration: schema, defaults, validation, YAML ingestion."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from .baselines import KNOWN_ALGORITHMS, PLUGIN_SLOTS


class ConfigError(ValueError):
    """Raised with the offending field named when a config is invalid."""


@dataclass(frozen=True)
class TopologyConfig:
    generator: str = "complete"
    nodes: int = 10
    p: float | None = None
    edges: list | None = None


@dataclass(frozen=True)
class InstanceConfig:
    arms: int = 10
    family: str = "gaussian"
    sigma: float = 0.01
    means: list | None = None
    mean_range: tuple = (0.1, 0.9)
    clip: bool = True


@dataclass(frozen=True)
class AlgorithmConfig:
    name: str = "demabar"
    alpha: float = 1.0 / 3.0
    w: int = 1
    lambda_rule: object = "experiment"  # "theory" | "experiment" | number
    ucb_coefficient: float = 1.5


@dataclass(frozen=True)
class ThreatConfig:
    mode: str = "none"  # "none" | "corruption" | "byzantine"
    budget: float = 0.0
    agents: list | None = None  # corrupted or Byzantine agent ids
    fraction: float | None = None  # alternative to an explicit agent list
    attack: str = "targeted"  # corruption: "targeted"; byzantine: "adaptive"|"gaussian"
    scope: str = "pulled"  # corruption: "pulled" | "all"
    trigger_reward_one: bool = False
    gaussian_scale: float = 0.001
    scale_is_std: bool = False


@dataclass(frozen=True)
class RunConfig:
    horizon: int = 20000
    trials: int = 50
    seed: int = 0
    record_every: int = 100


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    instance: InstanceConfig = field(default_factory=InstanceConfig)
    algorithm: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    threat: ThreatConfig = field(default_factory=ThreatConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "topology": TopologyConfig,
    "instance": InstanceConfig,
    "algorithm": AlgorithmConfig,
    "threat": ThreatConfig,
    "run": RunConfig,
}


def _build_section(name: str, cls, data: dict):
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"invalid '{name}' section: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from a plain mapping."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"section '{name}' must be a mapping")
        if name == "instance" and "mean_range" in raw:
            raw = dict(raw, mean_range=tuple(raw["mean_range"]))
        sections[name] = _build_section(name, cls, dict(raw))
    cfg = ExperimentConfig(**sections)
    validate(cfg)
    return cfg


def parse_config(path) -> ExperimentConfig:
    """Load and validate a YAML config file."""
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if data is None:
        data = {}
    return config_from_dict(data)


def validate(cfg: ExperimentConfig) -> None:
    """Reject invalid or internally inconsistent configs, naming the field."""
    algo = cfg.algorithm
    if algo.name not in KNOWN_ALGORITHMS + PLUGIN_SLOTS:
        raise ConfigError(f"algorithm.name: unknown algorithm {algo.name!r}")
    if algo.name in PLUGIN_SLOTS:
        raise ConfigError(
            f"algorithm.name: {algo.name!r} is a plugin slot with no bundled "
            "implementation"
        )
    if not (0.0 <= algo.alpha < 0.5):
        raise ConfigError(f"algorithm.alpha: must be in [0, 0.5), got {algo.alpha}")
    if algo.w < 0:
        raise ConfigError(f"algorithm.w: must be >= 0, got {algo.w}")
    if algo.lambda_rule not in ("theory", "experiment") and not isinstance(
        algo.lambda_rule, (int, float)
    ):
        raise ConfigError(
            f"algorithm.lambda_rule: expected 'theory', 'experiment' or a "
            f"number, got {algo.lambda_rule!r}"
        )

    topo = cfg.topology
    if topo.nodes < 1:
        raise ConfigError(f"topology.nodes: must be >= 1, got {topo.nodes}")
    if topo.generator == "erdos_renyi" and topo.p is None:
        raise ConfigError("topology.p: required for the erdos_renyi generator")
    if topo.generator == "explicit" and topo.edges is None:
        raise ConfigError("topology.edges: required for the explicit generator")

    inst = cfg.instance
    if inst.family not in ("gaussian", "bernoulli"):
        raise ConfigError(f"instance.family: unknown family {inst.family!r}")
    if inst.means is None and inst.arms < 2:
        raise ConfigError(f"instance.arms: must be >= 2, got {inst.arms}")

    threat = cfg.threat
    if threat.mode not in ("none", "corruption", "byzantine"):
        raise ConfigError(f"threat.mode: unknown mode {threat.mode!r}")
    if threat.mode == "corruption":
        if threat.budget < 0:
            raise ConfigError(f"threat.budget: must be >= 0, got {threat.budget}")
        if threat.attack != "targeted":
            raise ConfigError(f"threat.attack: unknown corruption attack {threat.attack!r}")
        if threat.scope not in ("pulled", "all"):
            raise ConfigError(f"threat.scope: must be 'pulled' or 'all', got {threat.scope!r}")
    if threat.mode == "byzantine":
        if threat.attack not in ("adaptive", "gaussian"):
            raise ConfigError(f"threat.attack: unknown Byzantine attack {threat.attack!r}")
        if threat.agents is None or len(threat.agents) == 0:
            raise ConfigError("threat.agents: Byzantine mode needs an agent list")
        if algo.name == "demabar" and algo.w != 1:
            raise ConfigError("algorithm.w: Byzantine mode requires w = 1")
    if threat.mode != "none" and threat.agents is not None and threat.fraction is not None:
        raise ConfigError("threat: give either 'agents' or 'fraction', not both")

    run = cfg.run
    if run.horizon < 1:
        raise ConfigError(f"run.horizon: must be >= 1, got {run.horizon}")
    if run.trials < 1:
        raise ConfigError(f"run.trials: must be >= 1, got {run.trials}")
    if run.record_every < 1:
        raise ConfigError(f"run.record_every: must be >= 1, got {run.record_every}")


def threat_agent_set(cfg: ExperimentConfig) -> frozenset:
    """Resolve the attacked/Byzantine agent ids from list or fraction."""
    threat = cfg.threat
    if threat.mode == "none":
        return frozenset()
    if threat.agents is not None:
        agents = frozenset(int(a) for a in threat.agents)
        bad = [a for a in agents if not (0 <= a < cfg.topology.nodes)]
        if bad:
            raise ConfigError(f"threat.agents: out of range ids {sorted(bad)}")
        return agents
    if threat.fraction is not None:
        count = round(threat.fraction * cfg.topology.nodes)
        return frozenset(range(count))
    # corruption with no agent spec attacks everyone
    return frozenset(range(cfg.topology.nodes))
