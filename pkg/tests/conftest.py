from __future__ import annotations

import pytest

from caresim import RewardWeights, ScenarioSpec, TransitionModel


@pytest.fixture(scope="session")
def model() -> TransitionModel:
    return TransitionModel.default()


@pytest.fixture(scope="session")
def scenario() -> ScenarioSpec:
    return ScenarioSpec.default()


@pytest.fixture(scope="session")
def weights() -> RewardWeights:
    return RewardWeights.default()


@pytest.fixture(scope="session")
def tiny_scenario() -> ScenarioSpec:
    """One task, one subtask: the smallest possible episode."""
    return ScenarioSpec.from_dict(
        {"name": "tiny", "max_trial": 5, "tasks": [{"name": "only task", "subtasks": ["only step"]}]}
    )
