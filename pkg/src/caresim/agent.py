"""Tabular Q-learning over the 16-state x 4-action space.

The Q-table persists across all epochs of a run; epochs are logging and
evaluation boundaries only. Exploration follows either a constant epsilon
or an exponential decay indexed by epoch. Forced subtask skips are
environment events, not actions: the skip penalty and post-skip state are
already folded into the step result the learner sees.

Random-draw accounting (for reproducibility):
  - select_action consumes exactly 2 draws per call (explore test, choice),
  - each environment step consumes 4 draws, or 8 when a skip fires,
  - with perception noise enabled, each observation costs 4 more draws.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .config import ConfigError
from .env import CaregivingEnv
from .reward import RewardWeights
from .scenario import ScenarioSpec
from .seeding import derive_seed, spawn_rng
from .states import ACTIONS, NUM_ACTIONS, NUM_STATES, AssistAction, StatusVector, flip_status_bits
from .transition import TransitionModel


@dataclass(frozen=True)
class ConstantEpsilon:
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must be in [0, 1], got {self.epsilon}")


def decay_rate_through(
    epsilon_target: float, epoch_target: int, eps_min: float = 0.03, eps_max: float = 1.0
) -> float:
    """Decay rate that makes the schedule pass through (epoch_target, epsilon_target)."""
    if not eps_min < epsilon_target < eps_max:
        raise ConfigError("target epsilon must lie strictly between eps_min and eps_max")
    if epoch_target <= 0:
        raise ConfigError("target epoch must be positive")
    return math.log((eps_max - eps_min) / (epsilon_target - eps_min)) / epoch_target


# Calibrated so exploration has fallen to 0.8 by epoch 300.
DEFAULT_DECAY_RATE = decay_rate_through(0.8, 300)


@dataclass(frozen=True)
class ExponentialDecayEpsilon:
    eps_min: float = 0.03
    eps_max: float = 1.0
    decay_rate: float = DEFAULT_DECAY_RATE

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps_min <= self.eps_max <= 1.0:
            raise ConfigError("need 0 <= eps_min <= eps_max <= 1")
        if self.decay_rate <= 0.0:
            raise ConfigError("decay_rate must be positive")


EpsilonSchedule = Union[ConstantEpsilon, ExponentialDecayEpsilon]


def epsilon_at(schedule: EpsilonSchedule, epoch: int) -> float:
    """Exploration probability for a given training epoch."""
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    if isinstance(schedule, ConstantEpsilon):
        return schedule.epsilon
    return schedule.eps_min + (schedule.eps_max - schedule.eps_min) * math.exp(
        -schedule.decay_rate * epoch
    )


class QTable:
    """16 x 4 action-value table, mutable during training."""

    __slots__ = ("values",)

    def __init__(self, values: Optional[list[list[float]]] = None):
        if values is None:
            values = [[0.0] * NUM_ACTIONS for _ in range(NUM_STATES)]
        if len(values) != NUM_STATES or any(len(row) != NUM_ACTIONS for row in values):
            raise ValueError("Q-table must be 16 x 4")
        self.values = values

    @classmethod
    def zeros(cls) -> "QTable":
        return cls()

    def copy(self) -> "QTable":
        return QTable([row[:] for row in self.values])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QTable) and self.values == other.values

    def to_file(self, path: str | Path) -> None:
        lines = ["state," + ",".join(a.code for a in ACTIONS)]
        for index, row in enumerate(self.values):
            lines.append(f"{index}," + ",".join(repr(v) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "QTable":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != "state," + ",".join(a.code for a in ACTIONS):
            raise ConfigError(f"unrecognized Q-table header in {path}")
        values = [[0.0] * NUM_ACTIONS for _ in range(NUM_STATES)]
        seen = set()
        for line in lines[1:]:
            cells = line.split(",")
            if len(cells) != 1 + NUM_ACTIONS:
                raise ConfigError(f"malformed Q-table row in {path}: {line!r}")
            index = int(cells[0])
            values[index] = [float(c) for c in cells[1:]]
            seen.add(index)
        if seen != set(range(NUM_STATES)):
            raise ConfigError(f"Q-table in {path} does not cover all 16 states")
        return cls(values)


def select_action(
    q: QTable, state: StatusVector, epsilon: float, rng: random.Random
) -> AssistAction:
    """Epsilon-greedy action choice; ties among maxima break uniformly at random.

    Always consumes exactly 2 rng draws.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    explore = rng.random() < epsilon
    u = rng.random()
    if explore:
        return ACTIONS[int(u * NUM_ACTIONS)]
    row = q.values[state.index]
    best = max(row)
    ties = [i for i in range(NUM_ACTIONS) if row[i] == best]
    return ACTIONS[ties[int(u * len(ties))]]


def q_update(
    q: QTable,
    state: StatusVector,
    action: AssistAction,
    reward: float,
    next_state: StatusVector,
    terminal: bool,
    alpha: float,
    gamma: float,
) -> None:
    """Standard one-step update; terminal steps bootstrap from zero."""
    row = q.values[state.index]
    target = reward if terminal else reward + gamma * max(q.values[next_state.index])
    row[action] += alpha * (target - row[action])


@dataclass(frozen=True)
class Policy:
    """Deterministic state -> action map over all 16 states."""

    actions: tuple[AssistAction, ...]

    def __post_init__(self) -> None:
        if len(self.actions) != NUM_STATES:
            raise ValueError("a policy must define an action for all 16 states")

    def __call__(self, state: StatusVector, rng: random.Random | None = None) -> AssistAction:
        return self.actions[state.index]

    @property
    def policy_id(self) -> str:
        """16-character action-index string; doubles as the policy's identity."""
        return "".join(str(int(a)) for a in self.actions)

    @classmethod
    def from_id(cls, policy_id: str) -> "Policy":
        if len(policy_id) != NUM_STATES or any(c not in "0123" for c in policy_id):
            raise ValueError(f"malformed policy id: {policy_id!r}")
        return cls(tuple(AssistAction(int(c)) for c in policy_id))

    def to_file(self, path: str | Path) -> None:
        lines = ["state,action"]
        for index, action in enumerate(self.actions):
            lines.append(f"{index},{action.code}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "Policy":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != "state,action":
            raise ConfigError(f"unrecognized policy header in {path}")
        actions: list[AssistAction | None] = [None] * NUM_STATES
        for line in lines[1:]:
            cells = line.split(",")
            if len(cells) != 2:
                raise ConfigError(f"malformed policy row in {path}: {line!r}")
            actions[int(cells[0])] = AssistAction.from_code(cells[1])
        if any(a is None for a in actions):
            raise ConfigError(f"policy in {path} does not cover all 16 states")
        return cls(tuple(actions))  # type: ignore[arg-type]


def extract_policy(q: QTable) -> Policy:
    """Greedy policy; ties break to the lowest action index (deterministic)."""
    actions = []
    for row in q.values:
        best = 0
        for i in range(1, NUM_ACTIONS):
            if row[i] > row[best]:
                best = i
        actions.append(ACTIONS[best])
    return Policy(tuple(actions))


@dataclass
class TrainingConfig:
    model: TransitionModel
    scenario: ScenarioSpec
    weights: RewardWeights
    schedule: EpsilonSchedule
    seed: int = 0
    alpha: float = 0.05
    gamma: float = 0.95
    epochs: int = 6000
    episodes_per_epoch: int = 30
    # policy snapshot taken at this (1-based) episode of each epoch
    snapshot_episode: int = 10
    # rollouts per snapshot evaluation; 0 disables the evaluation (policy is still logged)
    snapshot_rollouts: int = 40
    # greedy policies recorded after each of this many trailing episodes
    final_policy_window: int = 100
    # 0 trains on the true state; > 0 flips each observed bit with this probability
    perception_noise: float = 0.0

    def validate(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.epochs < 1 or self.episodes_per_epoch < 1:
            raise ConfigError("epochs and episodes_per_epoch must be >= 1")
        if not 1 <= self.snapshot_episode <= self.episodes_per_epoch:
            raise ConfigError("snapshot_episode must fall inside each epoch")
        if self.snapshot_rollouts < 0 or self.final_policy_window < 0:
            raise ConfigError("snapshot_rollouts and final_policy_window must be >= 0")
        if not 0.0 <= self.perception_noise <= 1.0:
            raise ConfigError("perception_noise must be in [0, 1]")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    epsilon: float
    policy_id: str
    mean_return: float | None


@dataclass
class TrainingLog:
    """Per-epoch snapshot records plus the greedy policies of the final episodes."""

    epochs: list[EpochRecord] = field(default_factory=list)
    final_policies: list[tuple[int, str]] = field(default_factory=list)

    def to_file(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["record", "epoch", "episode", "epsilon", "policy", "mean_return"])
            for rec in self.epochs:
                mean = "" if rec.mean_return is None else repr(rec.mean_return)
                writer.writerow(["snapshot", rec.epoch, "", repr(rec.epsilon), rec.policy_id, mean])
            for episode, policy_id in self.final_policies:
                writer.writerow(["final", "", episode, "", policy_id, ""])

    @classmethod
    def from_file(cls, path: str | Path) -> "TrainingLog":
        log = cls()
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["record", "epoch", "episode", "epsilon", "policy", "mean_return"]:
                raise ConfigError(f"unrecognized training log header in {path}")
            for row in reader:
                kind, epoch, episode, epsilon, policy_id, mean = row
                if kind == "snapshot":
                    log.epochs.append(
                        EpochRecord(int(epoch), float(epsilon), policy_id, float(mean) if mean else None)
                    )
                elif kind == "final":
                    log.final_policies.append((int(episode), policy_id))
                else:
                    raise ConfigError(f"unknown training log record type {kind!r} in {path}")
        return log


def _observe(state: StatusVector, noise: float, rng: random.Random) -> StatusVector:
    if noise == 0.0:
        return state
    return flip_status_bits(state, noise, rng)


def _run_training_episode(
    env: CaregivingEnv, q: QTable, epsilon: float, config: TrainingConfig, rng: random.Random
) -> float:
    state = env.reset(rng)
    obs = _observe(state, config.perception_noise, rng)
    episode_return = 0.0
    while True:
        action = select_action(q, obs, epsilon, rng)
        step = env.step(action)
        next_obs = _observe(step.next_state, config.perception_noise, rng)
        q_update(q, obs, action, step.reward, next_obs, step.done, config.alpha, config.gamma)
        episode_return += step.reward
        if step.done:
            return episode_return
        obs = next_obs


def train(config: TrainingConfig) -> tuple[QTable, TrainingLog]:
    """Run the full training protocol and return the learned table plus its log.

    Fully deterministic in (config, seed): the training stream is derived
    from the seed, and every snapshot evaluation uses its own derived
    per-epoch stream so evaluation settings never perturb training.
    """
    from .evaluation import evaluate_policy  # local import to avoid a module cycle

    config.validate()
    env = CaregivingEnv(config.model, config.scenario, config.weights)
    eval_env = CaregivingEnv(config.model, config.scenario, config.weights)
    q = QTable.zeros()
    rng = spawn_rng(config.seed, "train")
    log = TrainingLog()

    total_episodes = config.epochs * config.episodes_per_epoch
    final_window_start = max(0, total_episodes - config.final_policy_window)
    global_episode = 0

    for epoch in range(config.epochs):
        eps = epsilon_at(config.schedule, epoch)
        snapshot_policy: Policy | None = None
        for episode in range(config.episodes_per_epoch):
            _run_training_episode(env, q, eps, config, rng)
            if episode + 1 == config.snapshot_episode:
                snapshot_policy = extract_policy(q)
            if global_episode >= final_window_start:
                log.final_policies.append((global_episode, extract_policy(q).policy_id))
            global_episode += 1
        assert snapshot_policy is not None
        mean_return = None
        if config.snapshot_rollouts:
            report = evaluate_policy(
                snapshot_policy,
                eval_env,
                config.snapshot_rollouts,
                derive_seed(config.seed, "snapshot", epoch),
            )
            mean_return = report.mean_return
        log.epochs.append(EpochRecord(epoch, eps, snapshot_policy.policy_id, mean_return))
    return q, log
