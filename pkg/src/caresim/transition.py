"""Probabilistic dynamics of the simulated person's four binary statuses.

Per-status transition probabilities come from three layered rules:

1. If the selected assistance overrides the target status, the override's
   persistence (current=1) or onset (current=0) probability applies.
   Supportive assistance overrides the emotional statuses (anger,
   disengagement); non-directive and directive assistance override the
   cognitive statuses (forgetfulness, confusion).
2. Otherwise a present status persists with its fixed persistence
   probability.
3. Otherwise the status turns on with its base onset probability plus the
   additive increments contributed by every other currently-present
   status, clamped to [0, 1].

Increments apply only to onset, never to persistence. A forced subtask
skip uses its own persistence rules (see step_skip) and never creates a
new impairment.

All sampling is Bernoulli per status, conditionally independent given the
current vector, and consumes exactly 4 rng draws in fixed status order so
replays stay aligned under model edits.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .config import (
    ConfigError,
    load_json_document,
    load_packaged_document,
    reject_unknown_keys,
    require_probability,
)
from .states import ACTIONS, NUM_STATES, STATUS_NAMES, AssistAction, StatusVector

_FORGETFUL, _CONFUSED, _ANGRY, _DISENGAGED = range(4)


@dataclass(frozen=True)
class AssistOverride:
    """Persistence/onset pair replacing the default rule for one status."""

    persist_prob: float
    onset_prob: float


@dataclass(frozen=True)
class SkipRules:
    """Post-skip persistence probabilities.

    The cognitive pair (forgetfulness, confusion) persists with
    ``cognitive_pair`` when both are present and ``cognitive_alone`` when
    only one is. Anger and disengagement each persist with their own flat
    probability. Absent statuses never turn on during a skip.
    """

    cognitive_pair: float = 0.5
    cognitive_alone: float = 0.2
    angry: float = 0.5
    disengaged: float = 0.5


@dataclass(frozen=True)
class TransitionModel:
    base_onset: tuple[float, float, float, float]
    persistence: tuple[float, float, float, float]
    # influence[src][dst]: onset increment for dst while src is present; diagonal unused
    influence: tuple[tuple[float, float, float, float], ...]
    assist_overrides: Mapping[AssistAction, Mapping[int, AssistOverride]]
    skip_rules: SkipRules
    # per (state index, action, status) probabilities, derived once from the rules
    _onset_table: tuple = field(init=False, repr=False, compare=False)
    _skip_table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._validate()
        onset = tuple(
            tuple(
                tuple(
                    _onset_rule(self, StatusVector.from_index(s), action, status)
                    for status in range(4)
                )
                for action in ACTIONS
            )
            for s in range(NUM_STATES)
        )
        skip = tuple(
            tuple(_skip_rule(self.skip_rules, StatusVector.from_index(s), status) for status in range(4))
            for s in range(NUM_STATES)
        )
        object.__setattr__(self, "_onset_table", onset)
        object.__setattr__(self, "_skip_table", skip)

    def _validate(self) -> None:
        for name, group in (("base_onset", self.base_onset), ("persistence", self.persistence)):
            if len(group) != 4:
                raise ConfigError(f"{name} must have 4 entries")
            for status, p in zip(STATUS_NAMES, group):
                require_probability(p, f"{name}.{status}")
        if len(self.influence) != 4 or any(len(row) != 4 for row in self.influence):
            raise ConfigError("influence must be a 4x4 matrix")
        for src, row in zip(STATUS_NAMES, self.influence):
            for dst, p in zip(STATUS_NAMES, row):
                if src != dst:
                    require_probability(p, f"influence.{src}.{dst}")
        for action, per_status in self.assist_overrides.items():
            for status, override in per_status.items():
                where = f"assist_overrides.{action.code}.{STATUS_NAMES[status]}"
                require_probability(override.persist_prob, where + ".persist")
                require_probability(override.onset_prob, where + ".onset")
        for name in ("cognitive_pair", "cognitive_alone", "angry", "disengaged"):
            require_probability(getattr(self.skip_rules, name), f"skip_persistence.{name}")

    @classmethod
    def default(cls) -> "TransitionModel":
        """The shipped calibration (see caresim/data/transition_model.json)."""
        return cls.from_dict(load_packaged_document("transition_model.json"))

    @classmethod
    def from_file(cls, path: str | Path) -> "TransitionModel":
        return cls.from_dict(load_json_document(path))

    @classmethod
    def from_dict(cls, doc: dict) -> "TransitionModel":
        reject_unknown_keys(
            doc,
            {"base_onset", "persistence", "influence", "assist_overrides", "skip_persistence"},
            "transition model",
        )
        try:
            base = tuple(float(doc["base_onset"][name]) for name in STATUS_NAMES)
            persistence = tuple(float(doc["persistence"][name]) for name in STATUS_NAMES)
            reject_unknown_keys(doc.get("influence", {}), set(STATUS_NAMES), "influence")
            reject_unknown_keys(doc.get("assist_overrides", {}), {"a0", "a1", "a2", "a3"}, "assist_overrides")
            influence_rows = []
            for src in STATUS_NAMES:
                row_doc = doc.get("influence", {}).get(src, {})
                reject_unknown_keys(row_doc, set(STATUS_NAMES) - {src}, f"influence.{src}")
                influence_rows.append(
                    tuple(float(row_doc.get(dst, 0.0)) if dst != src else 0.0 for dst in STATUS_NAMES)
                )
            overrides: dict[AssistAction, dict[int, AssistOverride]] = {}
            for code, per_status in doc.get("assist_overrides", {}).items():
                action = AssistAction.from_code(code)
                overrides[action] = {}
                reject_unknown_keys(per_status, set(STATUS_NAMES), f"assist_overrides.{code}")
                for status_name, pair in per_status.items():
                    reject_unknown_keys(pair, {"persist", "onset"}, f"assist_overrides.{code}.{status_name}")
                    overrides[action][STATUS_NAMES.index(status_name)] = AssistOverride(
                        persist_prob=float(pair["persist"]), onset_prob=float(pair["onset"])
                    )
            skip_doc = doc.get("skip_persistence", {})
            reject_unknown_keys(
                skip_doc, {"cognitive_pair", "cognitive_alone", "angry", "disengaged"}, "skip_persistence"
            )
            skip = SkipRules(**{k: float(v) for k, v in skip_doc.items()})
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed transition model config: {exc!r}") from exc
        return cls(
            base_onset=base,
            persistence=persistence,
            influence=tuple(influence_rows),
            assist_overrides=overrides,
            skip_rules=skip,
        )

    def to_dict(self) -> dict:
        return {
            "base_onset": dict(zip(STATUS_NAMES, self.base_onset)),
            "persistence": dict(zip(STATUS_NAMES, self.persistence)),
            "influence": {
                src: {dst: self.influence[i][j] for j, dst in enumerate(STATUS_NAMES) if j != i and self.influence[i][j]}
                for i, src in enumerate(STATUS_NAMES)
            },
            "assist_overrides": {
                action.code: {
                    STATUS_NAMES[status]: {"persist": o.persist_prob, "onset": o.onset_prob}
                    for status, o in per_status.items()
                }
                for action, per_status in self.assist_overrides.items()
            },
            "skip_persistence": {
                "cognitive_pair": self.skip_rules.cognitive_pair,
                "cognitive_alone": self.skip_rules.cognitive_alone,
                "angry": self.skip_rules.angry,
                "disengaged": self.skip_rules.disengaged,
            },
        }

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def _onset_rule(
    model: TransitionModel, current: StatusVector, assist: AssistAction, status: int
) -> float:
    """The layered probability rule; the source of truth for the tables."""
    override = model.assist_overrides.get(assist, {}).get(status)
    if override is not None:
        return override.persist_prob if current[status] else override.onset_prob
    if current[status]:
        return model.persistence[status]
    total = model.base_onset[status]
    for other in range(4):
        if other != status and current[other]:
            total += model.influence[other][status]
    return min(max(total, 0.0), 1.0)


def _skip_rule(rules: SkipRules, current: StatusVector, status: int) -> float:
    if not current[status]:
        return 0.0
    if status == _FORGETFUL:
        return rules.cognitive_pair if current.confused else rules.cognitive_alone
    if status == _CONFUSED:
        return rules.cognitive_pair if current.forgetful else rules.cognitive_alone
    if status == _ANGRY:
        return rules.angry
    return rules.disengaged


def onset_probability(
    model: TransitionModel, current: StatusVector, assist: AssistAction, target: str
) -> float:
    """P(target status is present at t+1 | current vector, assistance). Pure, no sampling."""
    try:
        status = STATUS_NAMES.index(target)
    except ValueError:
        raise ValueError(f"unknown status: {target!r} (expected one of {STATUS_NAMES})") from None
    return model._onset_table[current.index][assist][status]


def transition(
    model: TransitionModel, current: StatusVector, assist: AssistAction, rng: random.Random
) -> StatusVector:
    """Sample the next status vector. Consumes exactly 4 rng draws."""
    probs = model._onset_table[current.index][assist]
    return StatusVector(
        1 if rng.random() < probs[0] else 0,
        1 if rng.random() < probs[1] else 0,
        1 if rng.random() < probs[2] else 0,
        1 if rng.random() < probs[3] else 0,
    )


def step_skip(model: TransitionModel, current: StatusVector, rng: random.Random) -> StatusVector:
    """Sample the post-skip vector. Consumes exactly 4 rng draws."""
    probs = model._skip_table[current.index]
    return StatusVector(
        1 if rng.random() < probs[0] else 0,
        1 if rng.random() < probs[1] else 0,
        1 if rng.random() < probs[2] else 0,
        1 if rng.random() < probs[3] else 0,
    )
