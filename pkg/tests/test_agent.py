import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demabar.agent import (
    Agent,
    EpochMessage,
    epoch_length,
    lambda_value,
    trimmed_filter,
)
from demabar.topology import complete_graph, from_edges, neighborhood_stats


def make_agent(agent_id=0, arms=2, alpha=0.0, lam=8.0, graph=None, w=0):
    topo = graph if graph is not None else from_edges(1, [])
    stats = neighborhood_stats(topo, w)
    return Agent(agent_id=agent_id, arm_count=arms, alpha=alpha, lam=lam, stats=stats)


def test_lambda_rules():
    assert lambda_value("theory", 10, 50_000) == pytest.approx(
        512 * math.log(2 * 10 * 50_000)
    )
    assert lambda_value("experiment", 10, 20_000) == pytest.approx(
        5 * math.log(4 * 100 * 20_000)
    )
    assert lambda_value(7.5, 10, 100) == 7.5


def test_begin_epoch_single_agent_hand_trace():
    # V=1, K=2, alpha=0, w=0, lambda=8, epoch 1: N_1=16, capped budget 8 per
    # arm, fallback arm 0 absorbs the leftover 8, uniform sampling.
    agent = make_agent(lam=8.0)
    n1 = epoch_length(8.0, 2, 0.0, 1, 1)
    assert n1 == 16
    agent.begin_epoch(1, n1)
    assert agent.fallback_arm == 0
    assert agent.planned.tolist() == [8.0, 8.0]
    assert agent.sampling.tolist() == [0.5, 0.5]


def test_epoch_length_formula():
    # complete graph of 10, alpha=0, lambda=84, K=10, m=1
    assert epoch_length(84.0, 10, 0.0, 10, 1) == 84


def test_epoch_length_grows_four_fold():
    lengths = [epoch_length(10.0, 5, 1 / 3, 4, m) for m in range(1, 6)]
    for a, b in zip(lengths, lengths[1:]):
        assert abs(b - 4 * a) <= 4  # up to ceiling effects


@settings(max_examples=200, deadline=None)
@given(
    m=st.integers(1, 8),
    alpha=st.sampled_from([0.0, 0.25, 1 / 3]),
    lam=st.floats(1.0, 500.0),
    arms=st.integers(2, 12),
    seed=st.integers(0, 10_000),
)
def test_budget_feasibility_property(m, alpha, lam, arms, seed):
    # For any reachable gap vector, planned pulls are non-negative and sum
    # exactly to the epoch length.
    rng = np.random.default_rng(seed)
    agent = make_agent(arms=arms, alpha=alpha, lam=lam, graph=complete_graph(4), w=1)
    for epoch in range(1, m + 1):
        n_m = epoch_length(lam, arms, alpha, agent.stats.v_min_w, epoch)
        agent.begin_epoch(epoch, n_m)
        assert (agent.planned >= 0).all()
        assert agent.planned.sum() == pytest.approx(n_m)
        assert agent.sampling.sum() == pytest.approx(1.0, abs=1e-12)
        # advance with synthetic filtered estimates
        agent.update_gaps(rng.uniform(0.0, 1.0, size=arms))
        assert (agent.gap_estimates >= 2.0 ** (-epoch)).all()


def test_sample_arms_degenerate():
    agent = make_agent()
    agent.begin_epoch(1, 16)
    agent.sampling = np.array([1.0, 0.0])
    arms = agent.sample_arms(np.random.default_rng(0), 1000)
    assert (arms == 0).all()


def test_sample_arms_frequency():
    agent = make_agent(lam=8.0)
    agent.begin_epoch(1, 16)  # p = (0.5, 0.5)
    arms = agent.sample_arms(np.random.default_rng(1), 100_000)
    assert abs((arms == 0).mean() - 0.5) < 0.01


def test_sample_arms_binomial_concentration():
    agent = make_agent(arms=4, lam=100.0)
    n1 = epoch_length(100.0, 4, 0.0, 1, 1)
    agent.begin_epoch(1, n1)
    arms = agent.sample_arms(np.random.default_rng(2), n1)
    counts = np.bincount(arms, minlength=4)
    for k in range(4):
        assert abs(counts[k] - agent.planned[k]) <= 4 * math.sqrt(agent.planned[k])


def test_record_observation():
    agent = make_agent()
    agent.begin_epoch(1, 16)
    agent.record_observation(1, 0.7)
    assert agent.reward_sums.tolist() == [0.0, 0.7]
    for _ in range(5):
        agent.record_observation(0, 1.0)
    assert agent.reward_sums[0] == 5.0
    with pytest.raises(ValueError):
        agent.record_observation(0, 1.2)


def msg(origin, avgs, counts):
    counts = np.asarray(counts, dtype=float)
    return EpochMessage(
        origin=origin, epoch=1, sums=np.asarray(avgs) * counts, counts=counts
    )


def test_filter_hand_trace():
    # |N_w(i)| = 5, alpha = 1/3, all count-eligible, per-neighbor averages
    # (0.9, 0.5, 0.4, 0.3, 0.1): f = floor((5 - 5/3)/2) = 1, trim 0.9 and
    # 0.1, estimate = (0.5 + 0.4 + 0.3)/3 = 0.4.
    sums = np.array([[0.9], [0.5], [0.4], [0.3], [0.1]]) * 10.0
    counts = np.full((5, 1), 10.0)
    est, resets = trimmed_filter(sums, counts, np.array([1.0]), 5, 1 / 3)
    assert est[0] == pytest.approx(0.4)
    assert not resets[0]


def test_filter_alpha_zero_plain_average():
    values = np.array([0.9, 0.5, 0.4, 0.3, 0.1])
    sums = values[:, None] * 10.0
    counts = np.full((5, 1), 10.0)
    est, _ = trimmed_filter(sums, counts, np.array([1.0]), 5, 0.0)
    assert est[0] == pytest.approx(values.mean())


def test_filter_self_only():
    est, _ = trimmed_filter(
        np.array([[7.0]]), np.array([[10.0]]), np.array([1.0]), 1, 0.0
    )
    assert est[0] == pytest.approx(0.7)
    # capped at 1
    est, _ = trimmed_filter(
        np.array([[15.0]]), np.array([[10.0]]), np.array([1.0]), 1, 0.0
    )
    assert est[0] == 1.0


def test_filter_count_removal_direction():
    # The under-sampled neighbor (count below threshold) is removed; the
    # well-sampled ones are kept.
    sums = np.array([[0.0], [5.0], [5.0], [5.0], [5.0]])
    counts = np.array([[1.0], [10.0], [10.0], [10.0], [10.0]])
    est, resets = trimmed_filter(sums, counts, np.array([5.0]), 5, 0.25)
    assert not resets[0]
    assert est[0] == pytest.approx(0.5)


def test_filter_reset_event():
    # Too many neighbors below the threshold: reset to the minimum count and
    # restore everyone.
    sums = np.array([[0.5], [0.6], [0.7], [0.8], [0.9]])
    counts = np.array([[1.0], [1.0], [1.0], [1.0], [10.0]])
    est, resets = trimmed_filter(sums, counts, np.array([5.0]), 5, 0.0)
    assert resets[0]
    avgs = sums[:, 0] / counts[:, 0]
    assert est[0] == pytest.approx(min(avgs.mean(), 1.0))


def test_filter_post_trim_size_floor():
    rng = np.random.default_rng(0)
    for n in range(3, 8):
        for alpha in (0.0, 0.25, 1 / 3):
            sums = rng.random((n, 1)) * 10
            counts = np.full((n, 1), 10.0)
            keep_floor = (1 - 2 * alpha) * n
            f = max(0, math.floor((n - keep_floor) / 2))
            assert n - 2 * f >= keep_floor - 1e-9


def brute_force_trim_bound(honest, adversarial, n, alpha):
    """Oracle: trimmed mean of any arrangement of honest + adversarial values."""
    values = np.sort(np.array(honest + adversarial))
    keep_floor = (1 - 2 * alpha) * n
    f = max(0, math.floor((len(values) - keep_floor) / 2))
    trimmed = values[f : len(values) - f]
    return trimmed.mean()


def test_trimmed_robustness_brute_force_small():
    # Up to f arbitrary values among honest values in [0.2, 0.8]: the
    # pre-cap trimmed mean stays inside the honest range. Exhaustive over
    # small neighborhoods; the acceptance suite runs the full sweep.
    honest_grid = [0.2, 0.5, 0.8]
    bad_grid = [-10.0, -1.0, 0.0, 1.0, 10.0]
    for n in (3, 5):
        for alpha in (0.25, 1 / 3):
            f = max(0, math.floor((n - (1 - 2 * alpha) * n) / 2))
            for bad_count in range(f + 1):
                for honest in itertools.product(honest_grid, repeat=n - bad_count):
                    for bad in itertools.product(bad_grid, repeat=bad_count):
                        est = brute_force_trim_bound(list(honest), list(bad), n, alpha)
                        assert 0.2 - 1e-9 <= est <= 0.8 + 1e-9


def test_update_gaps_hand_trace():
    agent = make_agent(lam=8.0)
    agent.begin_epoch(1, 16)
    agent.update_gaps(np.array([0.9, 0.4]))
    # r* = max(0.9 - 1/8, 0.4 - 1/8) = 0.775
    assert agent.gap_estimates.tolist() == [0.5, 0.5]
    assert agent._prev_scores.tolist() == [0.775, 0.275]


def test_update_gaps_symmetric():
    agent = make_agent(arms=3, lam=8.0)
    agent.begin_epoch(1, epoch_length(8.0, 3, 0.0, 1, 1))
    agent.update_gaps(np.array([0.6, 0.6, 0.6]))
    assert (agent.gap_estimates == 0.5).all()


def test_argmax_arm_is_valid_fallback():
    rng = np.random.default_rng(4)
    agent = make_agent(arms=5, lam=20.0)
    for m in range(1, 7):
        agent.begin_epoch(m, epoch_length(20.0, 5, 0.0, 1, m))
        filtered = rng.uniform(0, 1, size=5)
        agent.update_gaps(filtered)
        assert (agent.gap_estimates == 2.0 ** (-m)).any()


def test_fallback_tiebreak_best_previous_performer():
    agent = make_agent(arms=3, lam=8.0)
    agent.begin_epoch(1, epoch_length(8.0, 3, 0.0, 1, 1))
    assert agent.fallback_arm == 0  # epoch 1: lowest index
    # all arms tie at the gap floor, but arm 2 scored best last epoch
    agent.update_gaps(np.array([0.5, 0.5, 0.5001]))
    agent.gap_estimates = np.full(3, 0.5)
    agent.begin_epoch(2, epoch_length(8.0, 3, 0.0, 1, 2))
    assert agent.fallback_arm == 2


def test_count_thresholds_lemma_relation():
    # threshold n_{i,k} <= planned budget when the cap is not binding
    topo = complete_graph(6)
    agent = make_agent(agent_id=0, arms=4, alpha=0.25, lam=30.0, graph=topo, w=1)
    agent.begin_epoch(1, epoch_length(30.0, 4, 0.25, 6, 1))
    thresholds = agent.count_thresholds()
    capped = np.isclose(agent.planned, agent.count_cap(1))
    for k in range(4):
        if k != agent.fallback_arm and not capped[k]:
            assert thresholds[k] <= agent.planned[k] + 1e-9
