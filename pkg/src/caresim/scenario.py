"""Scenario structure and the subtask progression state machine.

A scenario is an ordered list of tasks, each an ordered list of subtasks.
Every interaction step is one trial at the current subtask. A subtask
completes when the post-transition status vector is all clear after at
least one trial; if the trial counter reaches the scenario's max_trial
without completion, the subtask is force-skipped. Either way progression
moves to the next subtask, and the scenario terminates once every subtask
has been completed or skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from .config import ConfigError, load_json_document, load_packaged_document, reject_unknown_keys
from .states import AssistAction, StatusVector


@dataclass(frozen=True)
class TaskSpec:
    name: str
    subtasks: tuple[str, ...]


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    max_trial: int
    tasks: tuple[TaskSpec, ...]

    def __post_init__(self) -> None:
        if self.max_trial < 1:
            raise ConfigError(f"max_trial must be >= 1, got {self.max_trial}")
        if not self.tasks:
            raise ConfigError("scenario must contain at least one task")
        for task in self.tasks:
            if not task.subtasks:
                raise ConfigError(f"task {task.name!r} must contain at least one subtask")

    @property
    def total_subtasks(self) -> int:
        return sum(len(task.subtasks) for task in self.tasks)

    @property
    def max_episode_steps(self) -> int:
        """Hard upper bound on episode length: every subtask runs to a skip."""
        return self.max_trial * self.total_subtasks

    @classmethod
    def default(cls) -> "ScenarioSpec":
        """The shipped shopping scenario (6 + 2 subtasks, max_trial 5)."""
        return cls.from_dict(load_packaged_document("scenario_shopping.json"))

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioSpec":
        return cls.from_dict(load_json_document(path))

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioSpec":
        reject_unknown_keys(doc, {"name", "max_trial", "tasks"}, "scenario")
        try:
            name = str(doc["name"])
            max_trial = int(doc["max_trial"])
            tasks = []
            for task_doc in doc["tasks"]:
                reject_unknown_keys(task_doc, {"name", "subtasks"}, f"task {task_doc.get('name')!r}")
                tasks.append(
                    TaskSpec(name=str(task_doc["name"]), subtasks=tuple(str(s) for s in task_doc["subtasks"]))
                )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed scenario config: {exc!r}") from exc
        return cls(name=name, max_trial=max_trial, tasks=tuple(tasks))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_trial": self.max_trial,
            "tasks": [{"name": t.name, "subtasks": list(t.subtasks)} for t in self.tasks],
        }


def load_scenario(path: str | Path) -> ScenarioSpec:
    return ScenarioSpec.from_file(path)


@dataclass(frozen=True)
class ProgressState:
    """Live progression counters for one episode. A pure value: advance() returns a new one."""

    task_index: int = 0
    subtask_index: int = 0
    trial_count: int = 0
    timestep_count: int = 0
    subtask_started: bool = False
    skipped_subtasks: frozenset[tuple[int, int]] = frozenset()
    terminal: bool = False


@dataclass(frozen=True)
class StepEvents:
    """What happened on one interaction step, as consumed by the reward."""

    delta_trial: int
    delta_timestep: int
    subtask_completed: bool
    subtask_skipped: bool
    task_completed: bool
    action_taken: AssistAction


def is_terminal(progress: ProgressState) -> bool:
    """True once every subtask of every task has been completed or skipped."""
    return progress.terminal


def advance(
    progress: ProgressState,
    post_state: StatusVector,
    action: AssistAction,
    scenario: ScenarioSpec,
) -> tuple[ProgressState, StepEvents]:
    """Register one trial's outcome and move the progression machine.

    ``post_state`` is the status vector after this trial's transition and
    before any forced-skip dynamics. Completion (all statuses clear, the
    subtask has been attempted) is checked first; a skip fires only when
    the trial counter has reached max_trial without completion, so the two
    outcomes are mutually exclusive by construction.
    """
    if progress.terminal:
        raise ValueError("advance() called on terminal progress")

    trial = progress.trial_count + 1
    timestep = progress.timestep_count + 1

    completed = post_state.is_zero()
    skipped = not completed and trial >= scenario.max_trial

    task_index = progress.task_index
    subtask_index = progress.subtask_index
    skipped_set = progress.skipped_subtasks
    task_completed = False
    terminal = False
    started = True

    if completed or skipped:
        if skipped:
            skipped_set = skipped_set | {(task_index, subtask_index)}
        subtask_index += 1
        trial = 0
        started = False
        if subtask_index >= len(scenario.tasks[task_index].subtasks):
            task_completed = True
            task_index += 1
            subtask_index = 0
            if task_index >= len(scenario.tasks):
                terminal = True

    next_progress = ProgressState(
        task_index=task_index,
        subtask_index=subtask_index,
        trial_count=trial,
        timestep_count=timestep,
        subtask_started=started,
        skipped_subtasks=skipped_set,
        terminal=terminal,
    )
    events = StepEvents(
        delta_trial=1,
        delta_timestep=1,
        subtask_completed=completed,
        subtask_skipped=skipped,
        task_completed=task_completed,
        action_taken=action,
    )
    return next_progress, events


def progress_labels(progress: ProgressState, scenario: ScenarioSpec) -> tuple[str, str]:
    """(task name, subtask name) for a non-terminal progress value."""
    if progress.terminal:
        return ("(done)", "(done)")
    task = scenario.tasks[progress.task_index]
    return (task.name, task.subtasks[progress.subtask_index])
