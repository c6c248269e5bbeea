"""Round-synchronous trial execution and multi-trial orchestration.

Each round runs in fixed phases: environment rewards, adversary corruption,
arm pulls, observation, then (inside a communication window) message
exchange with one-hop latency. Per-agent random substreams make the outcome
independent of the order agents are stepped within a phase, and per-trial
substreams make concurrent trial execution identical to sequential.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import adversary as adv
from .agent import Agent, epoch_length, lambda_value
from .baselines import UcbBank
from .config import ExperimentConfig, threat_agent_set
from .environment import RngStream, sample_instance, sample_reward_block
from .topology import Topology, build_graph, neighborhood_stats


@dataclass
class TrialResult:
    """Everything logged for one trial.

    ``cum_regret`` rows for Byzantine agents stay at zero; ``normal_agents``
    marks whose regret counts. ``gap_history[m-1][i]`` holds agent i's gap
    estimates after completing epoch m.
    """

    trial: int
    means: np.ndarray
    pulls: np.ndarray  # (T, V) int16
    cum_regret: np.ndarray  # (T, V) float64
    broadcasts: np.ndarray  # (T,) int32, per-round broadcast counts
    normal_agents: np.ndarray  # (V,) bool
    completed_epochs: int
    epoch_starts: list = field(default_factory=list)
    gap_history: list = field(default_factory=list)
    corruption_spent: float = 0.0

    @property
    def comm_cost(self) -> int:
        return int(self.broadcasts.sum())

    def mean_regret_curve(self) -> np.ndarray:
        """Cumulative regret averaged over the normal agents, per round."""
        return self.cum_regret[:, self.normal_agents].mean(axis=1)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list  # of TrialResult

    def regret_matrix(self) -> np.ndarray:
        """(trials, T) cumulative regret averaged across normal agents."""
        return np.stack([t.mean_regret_curve() for t in self.trials])


def deliver_messages(neighbor_lists, known, fresh, forge=None):
    """One hop of message flooding.

    Every agent sends its newly learned messages (``fresh``) to its direct
    neighbors; duplicates by origin are dropped on receipt. ``forge``, when
    given, maps (sender, recipient, message) to the message actually
    delivered, and forged senders send only their own (current) message.
    Returns the next round's ``fresh`` lists; ``known`` is updated in place.
    """
    agents_n = len(neighbor_lists)
    incoming = [[] for _ in range(agents_n)]
    for sender in range(agents_n):
        for recipient in neighbor_lists[sender]:
            if forge is not None:
                forged = forge(sender, recipient)
                if forged is not None:
                    incoming[recipient].append(forged)
                    continue
            incoming[recipient].extend(fresh[sender])
    next_fresh = [[] for _ in range(agents_n)]
    for i in range(agents_n):
        for msg in incoming[i]:
            if msg.origin not in known[i]:
                known[i][msg.origin] = msg
                next_fresh[i].append(msg)
    return next_fresh


def _build_topology(cfg: ExperimentConfig, streams: RngStream, trial: int) -> Topology:
    spec = {
        "generator": cfg.topology.generator,
        "nodes": cfg.topology.nodes,
        "p": cfg.topology.p,
        "edges": cfg.topology.edges,
    }
    rng = streams.generator(trial, "instance", 1)
    return build_graph(spec, rng)


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    """Execute one trial; fully determined by (config, trial index)."""
    streams = RngStream(cfg.run.seed)
    topology = _build_topology(cfg, streams, trial)
    inst = sample_instance(
        cfg.instance.arms,
        streams.generator(trial, "instance", 0),
        family=cfg.instance.family,
        sigma=cfg.instance.sigma,
        means=cfg.instance.means,
        mean_range=cfg.instance.mean_range,
        clip=cfg.instance.clip,
    )
    horizon = cfg.run.horizon
    rewards = sample_reward_block(
        inst, streams.generator(trial, "env"), horizon, topology.node_count
    )

    threat_agents = threat_agent_set(cfg)
    if cfg.threat.mode == "byzantine":
        byz_spec = adv.ByzantineSpec(
            byzantine_agents=threat_agents,
            attack=cfg.threat.attack,
            gaussian_scale=cfg.threat.gaussian_scale,
            scale_is_std=cfg.threat.scale_is_std,
        )
        if byz_spec.attack == "gaussian":
            byz_spec.biases = adv.draw_biases(
                topology.node_count, inst.arm_count, streams.generator(trial, "byzantine")
            )
        ledger = None
    elif cfg.threat.mode == "corruption":
        byz_spec = None
        ledger = adv.CorruptionLedger(budget=cfg.threat.budget, corrupted_agents=threat_agents)
    else:
        byz_spec = None
        ledger = None

    if cfg.algorithm.name == "ind_ucb":
        result = _run_ucb_trial(cfg, trial, topology, inst, rewards, ledger, byz_spec, streams)
    else:
        result = _run_epoch_trial(cfg, trial, topology, inst, rewards, ledger, byz_spec, streams)
    if ledger is not None:
        result.corruption_spent = ledger.spent
        assert ledger.spent <= ledger.budget + 1e-9
    return result


def _new_result(trial, inst, horizon, agents, byzantine) -> TrialResult:
    normal = np.ones(agents, dtype=bool)
    for b in byzantine:
        normal[b] = False
    return TrialResult(
        trial=trial,
        means=inst.means.copy(),
        pulls=np.zeros((horizon, agents), dtype=np.int16),
        cum_regret=np.zeros((horizon, agents)),
        broadcasts=np.zeros(horizon, dtype=np.int32),
        normal_agents=normal,
        completed_epochs=0,
    )


def _run_epoch_trial(cfg, trial, topology, inst, rewards, ledger, byz_spec, streams):
    """The epoch algorithm (cooperative, or its single-agent degenerate mode)."""
    algo = cfg.algorithm
    if algo.name == "ind_barbar":
        alpha, w = 0.0, 0
    else:
        alpha, w = algo.alpha, algo.w
    horizon = cfg.run.horizon
    agents_n = topology.node_count
    stats = neighborhood_stats(topology, w)
    lam = lambda_value(algo.lambda_rule, agents_n, horizon)
    byzantine = byz_spec.byzantine_agents if byz_spec else frozenset()

    agents = [
        Agent(agent_id=i, arm_count=inst.arm_count, alpha=alpha, lam=lam, stats=stats)
        for i in range(agents_n)
    ]
    agent_rngs = [streams.generator(trial, "agent", i) for i in range(agents_n)]
    byz_rngs = {b: streams.generator(trial, "byzantine", 1 + b) for b in sorted(byzantine)}
    neighbor_lists = [topology.neighbors(i) for i in range(agents_n)]

    result = _new_result(trial, inst, horizon, agents_n, byzantine)
    gaps = inst.gaps
    cum = np.zeros(agents_n)
    t = 0
    m = 0
    while t < horizon:
        m += 1
        n_m = epoch_length(lam, inst.arm_count, alpha, stats.v_min_w, m)
        for agent in agents:
            agent.begin_epoch(m, n_m)
            assert agent.epoch == m  # epoch synchrony
        result.epoch_starts.append(t)

        window = min(n_m, horizon - t)
        planned_arms = np.stack(
            [agents[i].sample_arms(agent_rngs[i], window) for i in range(agents_n)]
        )
        for b in sorted(byzantine):
            planned_arms[b] = byz_rngs[b].integers(inst.arm_count, size=window)
        for s in range(window):
            round_pulls = planned_arms[:, s]
            r = rewards[t]
            if ledger is not None:
                r = adv.targeted_attack(
                    inst, r, round_pulls, ledger,
                    scope=cfg.threat.scope,
                    trigger_reward_one=cfg.threat.trigger_reward_one,
                )
            for i in range(agents_n):
                agents[i].record_observation(int(round_pulls[i]), float(r[i, round_pulls[i]]))
            result.pulls[t] = round_pulls
            cum += np.where(result.normal_agents, gaps[round_pulls], 0.0)
            result.cum_regret[t] = cum
            t += 1
        if window < n_m:
            break  # horizon truncated the pull window: no communication, no filter

        # Communication window: w rounds, everyone pulls its fallback arm,
        # rewards are observed but not recorded. Messages flood one hop per
        # round with (origin) deduplication.
        known = [{i: agents[i].make_message()} for i in range(agents_n)]
        fresh = [list(known[i].values()) for i in range(agents_n)]
        comm_done = 0
        for _ in range(w):
            if t >= horizon:
                break
            round_pulls = np.array([agents[i].fallback_arm for i in range(agents_n)])
            for b in sorted(byzantine):
                round_pulls[b] = byz_rngs[b].integers(inst.arm_count)
            r = rewards[t]
            if ledger is not None:
                r = adv.targeted_attack(
                    inst, r, round_pulls, ledger,
                    scope=cfg.threat.scope,
                    trigger_reward_one=cfg.threat.trigger_reward_one,
                )
            result.pulls[t] = round_pulls
            cum += np.where(result.normal_agents, gaps[round_pulls], 0.0)
            result.cum_regret[t] = cum
            result.broadcasts[t] = agents_n

            forge = None
            if byzantine:
                def forge(sender, recipient, _m=m):
                    if sender not in byzantine:
                        return None
                    return adv.byzantine_message(
                        byz_spec,
                        agents[sender].make_message(),
                        recipient,
                        inst,
                        agents[sender].count_cap(_m),
                        byz_rngs[sender],
                    )
            fresh = deliver_messages(neighbor_lists, known, fresh, forge)
            t += 1
            comm_done += 1
        if comm_done < w:
            break  # truncated communication window: no filter for this epoch

        for i in range(agents_n):
            inbox = {
                origin: msg
                for origin, msg in known[i].items()
                if origin in stats.neighborhoods[i]
            }
            assert set(inbox) == stats.neighborhoods[i]
            estimates = agents[i].filter_epoch(inbox)
            agents[i].update_gaps(estimates)
        result.completed_epochs += 1
        result.gap_history.append(
            np.stack([agents[i].gap_estimates for i in range(agents_n)])
        )
    return result


def _run_ucb_trial(cfg, trial, topology, inst, rewards, ledger, byz_spec, streams):
    """Independent UCB1 per agent; no communication, so Byzantine messages
    are irrelevant and Byzantine agents just pull random arms."""
    horizon = cfg.run.horizon
    agents_n = topology.node_count
    byzantine = byz_spec.byzantine_agents if byz_spec else frozenset()
    byz_rngs = {b: streams.generator(trial, "byzantine", 1 + b) for b in sorted(byzantine)}
    bank = UcbBank(agents_n, inst.arm_count, cfg.algorithm.ucb_coefficient)

    result = _new_result(trial, inst, horizon, agents_n, byzantine)
    gaps = inst.gaps
    cum = np.zeros(agents_n)
    idx = np.arange(agents_n)
    for t in range(horizon):
        round_pulls = bank.select(t + 1)
        for b in sorted(byzantine):
            round_pulls[b] = byz_rngs[b].integers(inst.arm_count)
        r = rewards[t]
        if ledger is not None:
            r = adv.targeted_attack(
                inst, r, round_pulls, ledger,
                scope=cfg.threat.scope,
                trigger_reward_one=cfg.threat.trigger_reward_one,
            )
        bank.observe(round_pulls, r[idx, round_pulls])
        result.pulls[t] = round_pulls
        cum += np.where(result.normal_agents, gaps[round_pulls], 0.0)
        result.cum_regret[t] = cum
    return result


def _trial_worker(args):
    cfg, trial = args
    return run_trial(cfg, trial)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run all configured trials; results are identical for any jobs count."""
    indices = list(range(cfg.run.trials))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            trials = list(pool.map(_trial_worker, [(cfg, i) for i in indices]))
    else:
        trials = [run_trial(cfg, i) for i in indices]
    trials.sort(key=lambda tr: tr.trial)
    return ExperimentResult(config=cfg, trials=trials)
