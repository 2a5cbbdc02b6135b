"""Monte Carlo policy evaluation and the final-policy selection protocol.

Returns are undiscounted sums of immediate rewards from the starting state
to episode termination (discounting applies only inside the learner's
update). Every rollout gets its own rng derived from (base seed, rollout
index), so parallel and serial evaluation agree and two evaluations with
the same base seed are identical.
"""

from __future__ import annotations

import csv
import random
import statistics
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .agent import Policy, TrainingLog
from .env import CaregivingEnv
from .seeding import derive_seed, spawn_rng
from .states import ACTIONS, NUM_ACTIONS, AssistAction, StatusVector

Actor = Callable[[StatusVector, random.Random], AssistAction]


def random_actor(state: StatusVector, rng: random.Random) -> AssistAction:
    """Uniform action choice; consumes exactly 1 rng draw per step."""
    return ACTIONS[int(rng.random() * NUM_ACTIONS)]


def run_episode(actor: Actor, env: CaregivingEnv, rng: random.Random) -> float:
    """Play one episode to termination and return the undiscounted return."""
    state = env.reset(rng)
    total = 0.0
    while True:
        action = actor(state, rng)
        step = env.step(action)
        total += step.reward
        if step.done:
            return total
        state = step.next_state


@dataclass(frozen=True)
class EvaluationReport:
    policy_id: str
    num_rollouts: int
    mean_return: float
    std_return: float
    returns: tuple[float, ...]
    seed: int

    def to_dict(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "num_rollouts": self.num_rollouts,
            "mean_return": self.mean_return,
            "std_return": self.std_return,
            "seed": self.seed,
            "returns": list(self.returns),
        }

    def summary(self) -> str:
        return (
            f"policy {self.policy_id}: mean return {self.mean_return:.3f} "
            f"(std {self.std_return:.3f}, n={self.num_rollouts}, seed {self.seed})"
        )


def evaluate_policy(
    actor: Actor, env: CaregivingEnv, num_rollouts: int, base_seed: int
) -> EvaluationReport:
    """Estimate an actor's mean return over independently seeded rollouts."""
    if num_rollouts < 1:
        raise ValueError(f"num_rollouts must be >= 1, got {num_rollouts}")
    returns = tuple(
        run_episode(actor, env, spawn_rng(base_seed, "rollout", i)) for i in range(num_rollouts)
    )
    policy_id = getattr(actor, "policy_id", None) or "random"
    return EvaluationReport(
        policy_id=policy_id,
        num_rollouts=num_rollouts,
        mean_return=statistics.fmean(returns),
        std_return=statistics.pstdev(returns),
        returns=returns,
        seed=base_seed,
    )


def select_final_policy(
    log: TrainingLog,
    env: CaregivingEnv,
    rollouts: int = 10000,
    base_seed: int = 0,
    top_n: int = 5,
) -> tuple[Policy, list[EvaluationReport]]:
    """Pick the final policy from the most frequent late-training candidates.

    Counts policy frequency over the trailing-episode records, evaluates
    the top candidates (fewer if fewer are distinct), and returns the
    policy with the highest Monte Carlo mean. Candidate seeds derive from
    the policy id, so the outcome is invariant to log record order; mean
    ties break to the lowest policy id.
    """
    if not log.final_policies:
        raise ValueError("training log has no final-window policy records")
    counts = Counter(policy_id for _, policy_id in log.final_policies)
    candidates = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    reports = [
        evaluate_policy(
            Policy.from_id(policy_id), env, rollouts, derive_seed(base_seed, "candidate", policy_id)
        )
        for policy_id, _count in candidates
    ]
    best = min(reports, key=lambda r: (-r.mean_return, r.policy_id))
    return Policy.from_id(best.policy_id), reports


def export_learning_curve(path: str | Path, log: TrainingLog, strategy_label: str) -> None:
    """Write per-epoch snapshot means as CSV rows (epoch, strategy, mean_return)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "strategy", "mean_return"])
        for rec in log.epochs:
            mean = "" if rec.mean_return is None else repr(rec.mean_return)
            writer.writerow([rec.epoch, strategy_label, mean])


def export_report(path: str | Path, reports: Iterable[EvaluationReport]) -> None:
    """Write evaluation reports as a JSON document."""
    import json

    payload = [r.to_dict() for r in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
