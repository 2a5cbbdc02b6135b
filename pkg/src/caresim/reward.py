"""Immediate reward for one interaction step.

The reward is a weighted sum over the post-transition status vector, the
per-step trial/timestep increments, and the completion/skip flags. The
assistance cost is charged only on a completing step, scaled by the action
that produced the completion, which is what pushes the learner toward
minimal effective assistance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .config import ConfigError, load_json_document, load_packaged_document, reject_unknown_keys
from .scenario import StepEvents
from .states import ACTIONS, AssistAction, StatusVector

_WEIGHT_FIELDS = {
    "forgetful",
    "confused",
    "angry",
    "disengaged",
    "extra_trial",
    "subtask_complete",
    "subtask_skip",
    "extra_timestep",
    "task_complete",
    "assist",
}


def _default_assist_costs() -> Mapping[AssistAction, float]:
    return MappingProxyType(
        {
            AssistAction.NO_ASSISTANCE: 0.0,
            AssistAction.VERBAL_SUPPORTIVE: -1.0,
            AssistAction.VERBAL_NON_DIRECTIVE: -3.0,
            AssistAction.VERBAL_DIRECTIVE: -5.0,
        }
    )


@dataclass(frozen=True)
class RewardWeights:
    """Dimensionless reward units; defaults match the shipped calibration."""

    forgetful: float = -1.0
    confused: float = -1.0
    angry: float = -5.0
    disengaged: float = -1.0
    extra_trial: float = -1.0
    subtask_complete: float = 50.0
    subtask_skip: float = -10.0
    extra_timestep: float = -1.0
    task_complete: float = 20.0
    assist: Mapping[AssistAction, float] = field(default_factory=_default_assist_costs)

    def __post_init__(self) -> None:
        missing = [a.code for a in ACTIONS if a not in self.assist]
        if missing:
            raise ConfigError(f"assist costs missing for: {', '.join(missing)}")

    @classmethod
    def default(cls) -> "RewardWeights":
        return cls.from_dict(load_packaged_document("reward_weights.json"))

    @classmethod
    def from_file(cls, path: str | Path) -> "RewardWeights":
        return cls.from_dict(load_json_document(path))

    @classmethod
    def from_dict(cls, doc: dict) -> "RewardWeights":
        reject_unknown_keys(doc, _WEIGHT_FIELDS, "reward weights")
        try:
            assist_doc = doc.get("assist", {})
            assist = MappingProxyType(
                {AssistAction.from_code(code): float(v) for code, v in assist_doc.items()}
            )
            scalars = {
                name: float(doc[name])
                for name in _WEIGHT_FIELDS - {"assist"}
                if name in doc
            }
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed reward weights config: {exc!r}") from exc
        return cls(assist=assist, **scalars)

    def to_dict(self) -> dict:
        return {
            "forgetful": self.forgetful,
            "confused": self.confused,
            "angry": self.angry,
            "disengaged": self.disengaged,
            "extra_trial": self.extra_trial,
            "subtask_complete": self.subtask_complete,
            "subtask_skip": self.subtask_skip,
            "extra_timestep": self.extra_timestep,
            "task_complete": self.task_complete,
            "assist": {a.code: v for a, v in self.assist.items()},
        }

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def compute_reward(next_state: StatusVector, events: StepEvents, weights: RewardWeights) -> float:
    """Immediate reward for a step that landed in ``next_state`` with ``events``."""
    if events.subtask_completed and events.subtask_skipped:
        raise ValueError("a step cannot both complete and skip a subtask")
    r = (
        weights.forgetful * next_state.forgetful
        + weights.confused * next_state.confused
        + weights.angry * next_state.angry
        + weights.disengaged * next_state.disengaged
        + weights.extra_trial * events.delta_trial
        + weights.extra_timestep * events.delta_timestep
    )
    if events.subtask_completed:
        r += weights.subtask_complete + weights.assist[events.action_taken]
    if events.subtask_skipped:
        r += weights.subtask_skip
    if events.task_completed:
        r += weights.task_complete
    return r
