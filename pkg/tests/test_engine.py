import numpy as np
import pytest

from demabar.agent import EpochMessage
from demabar.config import config_from_dict
from demabar.engine import deliver_messages, run_experiment, run_trial
from demabar.topology import from_edges, ring_graph


def base_config(**overrides):
    data = {
        "topology": {"generator": "complete", "nodes": 4},
        "instance": {"arms": 4},
        "algorithm": {"name": "demabar", "alpha": 1 / 3, "w": 1},
        "run": {"horizon": 3000, "trials": 2, "seed": 11},
    }
    for key, section in overrides.items():
        data.setdefault(key, {}).update(section)
    return config_from_dict(data)


def own_messages(n):
    return [
        {i: EpochMessage(origin=i, epoch=1, sums=np.zeros(1), counts=np.ones(1))}
        for i in range(n)
    ]


def neighbor_lists(topology):
    return [topology.neighbors(i) for i in range(topology.node_count)]


def test_one_hop_flooding_ring():
    topo = ring_graph(5)
    known = own_messages(5)
    fresh = [list(k.values()) for k in known]
    deliver_messages(neighbor_lists(topo), known, fresh)
    assert set(known[0]) == {4, 0, 1}


def test_two_hop_flooding_path():
    topo = from_edges(3, [(0, 1), (1, 2)])
    known = own_messages(3)
    fresh = [list(k.values()) for k in known]
    fresh = deliver_messages(neighbor_lists(topo), known, fresh)
    assert 2 not in known[0]
    deliver_messages(neighbor_lists(topo), known, fresh)
    assert set(known[0]) == {0, 1, 2}  # agent 2's message arrived via agent 1


def test_duplicate_delivery_deduplicated():
    # two disjoint paths from 0 to 3: message kept once
    topo = from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    known = own_messages(4)
    fresh = [list(k.values()) for k in known]
    fresh = deliver_messages(neighbor_lists(topo), known, fresh)
    fresh = deliver_messages(neighbor_lists(topo), known, fresh)
    assert list(known[3]).count(0) == 1
    assert set(known[3]) == {0, 1, 2, 3}


def test_trial_determinism():
    cfg = base_config()
    a = run_trial(cfg, 0)
    b = run_trial(cfg, 0)
    assert (a.pulls == b.pulls).all()
    assert (a.cum_regret == b.cum_regret).all()
    assert a.comm_cost == b.comm_cost


def test_trials_differ():
    cfg = base_config()
    a = run_trial(cfg, 0)
    b = run_trial(cfg, 1)
    assert not (a.pulls == b.pulls).all()


def test_broadcast_count_matches_epochs():
    cfg = base_config()
    tr = run_trial(cfg, 0)
    assert tr.comm_cost == 4 * tr.completed_epochs * 1  # V * M * w


def test_single_node_matches_ind_barbar():
    common = {
        "topology": {"generator": "explicit", "nodes": 1, "edges": []},
        "instance": {"arms": 3},
        "run": {"horizon": 2000, "trials": 1, "seed": 3},
    }
    demabar_cfg = config_from_dict(
        {**common, "algorithm": {"name": "demabar", "alpha": 0.0, "w": 0}}
    )
    barbar_cfg = config_from_dict({**common, "algorithm": {"name": "ind_barbar"}})
    a = run_trial(demabar_cfg, 0)
    b = run_trial(barbar_cfg, 0)
    assert (a.pulls == b.pulls).all()
    assert (a.cum_regret == b.cum_regret).all()


def test_zero_budget_corruption_is_bit_identical_to_clean():
    clean = base_config()
    corrupted = base_config(
        threat={"mode": "corruption", "budget": 0.0, "agents": [0, 1]}
    )
    a = run_trial(clean, 0)
    b = run_trial(corrupted, 0)
    assert (a.pulls == b.pulls).all()
    assert (a.cum_regret == b.cum_regret).all()
    assert b.corruption_spent == 0.0


def test_empty_corrupted_set_is_bit_identical_to_clean():
    clean = base_config()
    corrupted = base_config(threat={"mode": "corruption", "budget": 100.0, "agents": []})
    a = run_trial(clean, 0)
    b = run_trial(corrupted, 0)
    assert (a.pulls == b.pulls).all()


def test_corruption_spent_within_budget():
    cfg = base_config(threat={"mode": "corruption", "budget": 25.0})
    tr = run_trial(cfg, 0)
    assert 0 < tr.corruption_spent <= 25.0 + 1e-9


def test_byzantine_agents_excluded_from_regret():
    cfg = config_from_dict(
        {
            "topology": {"generator": "ring", "nodes": 6},
            "instance": {"arms": 3},
            "algorithm": {"name": "demabar", "alpha": 1 / 3, "w": 1},
            "threat": {"mode": "byzantine", "agents": [0, 3], "attack": "adaptive"},
            "run": {"horizon": 1500, "trials": 1, "seed": 5},
        }
    )
    tr = run_trial(cfg, 0)
    assert not tr.normal_agents[0] and not tr.normal_agents[3]
    assert (tr.cum_regret[:, 0] == 0).all()
    assert (tr.cum_regret[:, [1, 2, 4, 5]][-1] > 0).all()
    assert tr.corruption_spent == 0.0  # no ledger in Byzantine mode


def test_epoch_synchrony_and_truncation():
    cfg = base_config(run={"horizon": 500, "trials": 1, "seed": 2})
    tr = run_trial(cfg, 0)
    # rounds all filled, epoch starts strictly increasing
    assert tr.pulls.shape == (500, 4)
    assert tr.epoch_starts == sorted(set(tr.epoch_starts))
    # regret defined and non-decreasing for every round
    diffs = np.diff(tr.cum_regret, axis=0)
    assert (diffs >= -1e-12).all()


def test_run_experiment_aggregates_trials():
    cfg = base_config()
    result = run_experiment(cfg)
    assert len(result.trials) == 2
    matrix = result.regret_matrix()
    assert matrix.shape == (2, 3000)


def test_run_experiment_parallel_matches_sequential():
    cfg = base_config(run={"horizon": 800, "trials": 3, "seed": 9})
    seq = run_experiment(cfg, jobs=1)
    par = run_experiment(cfg, jobs=2)
    for a, b in zip(seq.trials, par.trials):
        assert a.trial == b.trial
        assert (a.pulls == b.pulls).all()
        assert (a.cum_regret == b.cum_regret).all()


def test_ucb_runs_under_corruption():
    cfg = base_config(
        algorithm={"name": "ind_ucb"},
        threat={"mode": "corruption", "budget": 10.0},
    )
    tr = run_trial(cfg, 0)
    assert tr.comm_cost == 0
    assert 0 < tr.corruption_spent <= 10.0 + 1e-9


def test_gaussian_byzantine_mode_runs():
    cfg = config_from_dict(
        {
            "topology": {"generator": "ring", "nodes": 6},
            "instance": {"arms": 3},
            "algorithm": {"name": "demabar", "alpha": 1 / 3, "w": 1},
            "threat": {"mode": "byzantine", "agents": [0], "attack": "gaussian"},
            "run": {"horizon": 1500, "trials": 1, "seed": 8},
        }
    )
    tr = run_trial(cfg, 0)
    assert tr.completed_epochs >= 1
