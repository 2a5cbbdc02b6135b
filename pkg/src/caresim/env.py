"""Episode environment tying together patient dynamics, scenario progression, and reward.

One step = one trial at the current subtask: the patient transitions
under the chosen assistance, the progression machine registers the
outcome, and if the trial exhausted the budget without completion the
forced-skip dynamics run within the same step. The post-skip state is the
step's successor for both the reward and any learner bootstrapping, so a
step is always a single (state, action, reward, next_state) tuple.

Random draws per step: 4 for the assisted transition, plus 4 more when a
forced skip fires. The rng is supplied at reset and owned by the episode;
independent episodes with independent rngs may run in parallel.
"""

from __future__ import annotations

import random
from typing import NamedTuple

from .reward import RewardWeights, compute_reward
from .scenario import ProgressState, ScenarioSpec, StepEvents, advance
from .states import AssistAction, StatusVector
from .transition import TransitionModel, step_skip, transition


class EnvStep(NamedTuple):
    next_state: StatusVector
    reward: float
    events: StepEvents
    progress: ProgressState
    done: bool


class CaregivingEnv:
    """Sequential single-episode environment with reset/step semantics."""

    def __init__(self, model: TransitionModel, scenario: ScenarioSpec, weights: RewardWeights):
        self.model = model
        self.scenario = scenario
        self.weights = weights
        self._rng: random.Random | None = None
        self.state = StatusVector.zero()
        self.progress = ProgressState()

    def reset(self, rng: random.Random) -> StatusVector:
        """Start a fresh episode at the all-clear state, driven by ``rng``."""
        self._rng = rng
        self.state = StatusVector.zero()
        self.progress = ProgressState()
        return self.state

    def step(self, action: AssistAction) -> EnvStep:
        if self._rng is None:
            raise RuntimeError("call reset() before step()")
        if self.progress.terminal:
            raise ValueError("step() called on a finished episode")

        post = transition(self.model, self.state, action, self._rng)
        progress, events = advance(self.progress, post, action, self.scenario)
        if events.subtask_skipped:
            post = step_skip(self.model, post, self._rng)
        reward = compute_reward(post, events, self.weights)

        self.state = post
        self.progress = progress
        return EnvStep(post, reward, events, progress, progress.terminal)
