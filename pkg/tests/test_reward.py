"""Reward checks against an independently written substitution oracle."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from caresim import AssistAction, ConfigError, RewardWeights, StatusVector, StepEvents, compute_reward

A0, A1, A2, A3 = AssistAction

# independent oracle: literal weighted-sum substitution, kept separate from
# the implementation on purpose
ASSIST_COST = {A0: 0, A1: -1, A2: -3, A3: -5}


def oracle_reward(state: StatusVector, events: StepEvents) -> float:
    return (
        -1 * state.forgetful
        + -1 * state.confused
        + -5 * state.angry
        + -1 * state.disengaged
        + -1 * events.delta_trial
        + (50 + ASSIST_COST[events.action_taken]) * int(events.subtask_completed)
        + -10 * int(events.subtask_skipped)
        + -1 * events.delta_timestep
        + 20 * int(events.task_completed)
    )


def make_events(completed=False, skipped=False, task=False, action=A0, deltas=1):
    return StepEvents(
        delta_trial=deltas,
        delta_timestep=deltas,
        subtask_completed=completed,
        subtask_skipped=skipped,
        task_completed=task,
        action_taken=action,
    )


def test_completion_step_with_supportive_assistance(weights):
    # -1 trial + (50 - 1) assist-on-completion + -1 timestep = 47
    events = make_events(completed=True, action=A1)
    assert compute_reward(StatusVector.zero(), events, weights) == 47


def test_assist_cost_not_charged_without_completion(weights):
    # -5 anger - 1 trial - 1 timestep = -7, the a3 cost is inside the completion term
    events = make_events(action=A3)
    assert compute_reward(StatusVector(0, 0, 1, 0), events, weights) == -7


def test_skip_step(weights):
    # three statuses (-3), trial (-1), skip (-10), timestep (-1) = -15
    events = make_events(skipped=True, action=A0)
    assert compute_reward(StatusVector(1, 1, 0, 1), events, weights) == -15


def test_zero_case(weights):
    events = make_events(deltas=0)
    assert compute_reward(StatusVector.zero(), events, weights) == 0


def test_task_completion_bonus(weights):
    events = make_events(completed=True, task=True, action=A2)
    # -1 - 1 + (50 - 3) + 20 = 65
    assert compute_reward(StatusVector.zero(), events, weights) == 65


def test_mutually_exclusive_flags_rejected(weights):
    with pytest.raises(ValueError):
        compute_reward(StatusVector.zero(), make_events(completed=True, skipped=True), weights)


def test_matches_oracle_on_randomized_inputs(weights):
    rng = random.Random(123)
    for _ in range(10000):
        state = StatusVector.from_index(rng.randrange(16))
        completed = rng.random() < 0.3
        skipped = (not completed) and rng.random() < 0.3
        events = make_events(
            completed=completed,
            skipped=skipped,
            task=rng.random() < 0.2,
            action=AssistAction(rng.randrange(4)),
        )
        assert compute_reward(state, events, weights) == oracle_reward(state, events)


@given(st.integers(min_value=0, max_value=15), st.integers(min_value=0, max_value=3))
def test_linearity_of_status_penalties(index, action_index):
    weights = RewardWeights.default()
    state = StatusVector.from_index(index)
    events = make_events(action=AssistAction(action_index))
    base = compute_reward(StatusVector.zero(), events, weights)
    total = compute_reward(state, events, weights)
    per_status = (weights.forgetful, weights.confused, weights.angry, weights.disengaged)
    contribution = sum(w * bit for w, bit in zip(per_status, state))
    assert total == base + contribution


def test_reward_non_increasing_as_statuses_turn_on(weights):
    events = make_events(action=A0)
    for index in range(16):
        state = StatusVector.from_index(index)
        for j in range(4):
            if state[j]:
                continue
            worse = list(state)
            worse[j] = 1
            assert compute_reward(StatusVector(*worse), events, weights) <= compute_reward(
                state, events, weights
            )


def test_assist_level_cost_differences_on_completion(weights):
    returns = {
        a: compute_reward(StatusVector.zero(), make_events(completed=True, action=a), weights)
        for a in AssistAction
    }
    assert returns[A0] - returns[A1] == 1
    assert returns[A1] - returns[A2] == 2
    assert returns[A2] - returns[A3] == 2


def test_weights_config_round_trip(tmp_path, weights):
    path = tmp_path / "weights.json"
    weights.to_file(path)
    assert RewardWeights.from_file(path) == weights


def test_weights_config_rejects_unknown_fields():
    doc = RewardWeights.default().to_dict()
    doc["bonus"] = 3
    with pytest.raises(ConfigError, match="unknown field"):
        RewardWeights.from_dict(doc)


def test_weights_config_requires_all_assist_levels():
    doc = RewardWeights.default().to_dict()
    del doc["assist"]["a3"]
    with pytest.raises(ConfigError, match="a3"):
        RewardWeights.from_dict(doc)
