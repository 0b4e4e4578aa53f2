import json
import math

import numpy as np
import pytest

from qwalk.maze import build_maze, reveal_path
from qwalk.recovery import (
    RecoveryConfig,
    StrategyError,
    coupon_collector_rounds,
    recover,
    run_trials,
    summarize,
    trial_rng,
)


@pytest.fixture(scope="module")
def maze():
    return build_maze("chain", 5, 60, 21)


@pytest.mark.parametrize("strategy", ["superposed", "successive", "unknown_start", "classical"])
def test_recovers_true_path(maze, strategy):
    results = run_trials(maze, RecoveryConfig(strategy=strategy, trials=20, master_seed=2))
    truth = reveal_path(maze)
    for r in results:
        assert r.success
        assert r.path[1:] == truth[1:]
        if strategy in ("successive", "classical"):
            assert r.path[0] == "S"


def test_superposed_path_includes_start_name(maze):
    r = recover(maze, RecoveryConfig(strategy="superposed"), trial_rng(0, 0))
    assert r.path[0] == "S" and len(r.path) == maze.M + 1


def test_counts_are_consistent(maze):
    r = recover(maze, RecoveryConfig(strategy="successive"), trial_rng(4, 0))
    steps = 2 * round(math.pi * math.sqrt(maze.N / 2) / 2)
    assert r.total_unitary_applications == r.rounds * steps
    assert len(r.measurement_log) == r.rounds
    assert len(r.rounds_per_connection) == maze.M
    assert r.total_oracle_queries <= r.rounds


def test_classical_counts(maze):
    r = recover(maze, RecoveryConfig(strategy="classical"), trial_rng(1, 0))
    assert r.total_unitary_applications == 0
    assert r.total_oracle_queries == sum(r.rounds_per_connection)


def test_same_seed_same_results(maze):
    cfg = RecoveryConfig(strategy="unknown_start", trials=5, master_seed=9)
    a = [r.to_json() for r in run_trials(maze, cfg)]
    b = [r.to_json() for r in run_trials(maze, cfg)]
    assert a == b
    other = [r.to_json() for r in run_trials(maze, RecoveryConfig(strategy="unknown_start", trials=5, master_seed=10))]
    assert other != a


def test_streams_are_independent_of_trial_count(maze):
    cfg5 = RecoveryConfig(strategy="successive", trials=5, master_seed=3)
    cfg2 = RecoveryConfig(strategy="successive", trials=2, master_seed=3)
    assert [r.to_json() for r in run_trials(maze, cfg2)] == [r.to_json() for r in run_trials(maze, cfg5)[:2]]


def test_budget_exhaustion_reports_failure(maze):
    # zero steps never leaves the start edge
    cfg = RecoveryConfig(strategy="successive", max_rounds_per_stage=3, step_override=0)
    r = recover(maze, cfg, trial_rng(0, 0))
    assert not r.success
    assert r.rounds == 3


def test_config_validation():
    with pytest.raises(StrategyError):
        RecoveryConfig(strategy="grover")
    with pytest.raises(ValueError):
        RecoveryConfig(trials=0)
    with pytest.raises(ValueError):
        RecoveryConfig(step_override=3)


def test_ring_rejected():
    ring = build_maze("ring", 4, 20, 0)
    with pytest.raises(StrategyError):
        recover(ring, RecoveryConfig(strategy="successive"), trial_rng(0, 0))


def test_result_json(maze):
    r = recover(maze, RecoveryConfig(strategy="successive"), trial_rng(0, 0))
    doc = json.loads(r.to_json())
    assert set(doc) == {"path", "success", "total_unitary_applications", "total_oracle_queries",
                        "rounds_per_connection", "measurement_log"}
    assert set(doc["measurement_log"][0]["outcome"]) == {"star", "tail", "head", "direction"}


def test_summary(maze):
    s = summarize(run_trials(maze, RecoveryConfig(strategy="classical", trials=10)))
    assert s["trials"] == 10 and s["success_rate"] == 1.0
    assert s["mean_unitary_applications"] == 0.0


def test_coupon_collector_oracle():
    # uniform over m coupons: expected draws m * H_m
    m = 8
    rng = np.random.default_rng(0)
    draws = [coupon_collector_rounds(np.full(m, 1 / m), rng) for _ in range(4000)]
    harmonic = sum(1 / i for i in range(1, m + 1))
    assert np.mean(draws) == pytest.approx(m * harmonic, rel=0.04)
    # a blank remainder slows collection down proportionally
    rng = np.random.default_rng(0)
    half = [coupon_collector_rounds(np.full(m, 1 / (2 * m)), rng) for _ in range(4000)]
    assert np.mean(half) == pytest.approx(2 * m * harmonic, rel=0.05)
