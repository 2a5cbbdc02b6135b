"""Full two-agent interaction loop: narrate, perceive, decide, assist, transition.

Each timestep the simulated person behaves according to their true state,
the caregiver perceives a (possibly noisy) state from that behavior,
selects an assistance level with its policy, speaks, and the person
attempts the current subtask under that assistance. Everything is written
to a line-oriented UTF-8 transcript; with the template backend and a fixed
seed the transcript is byte-identical across runs.

Random draws per timestep: 4 for perception (when an rng-backed perceive
runs), 4 for the transition, plus 4 more on a forced skip.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .agent import Policy
from .behavior import InteractionContext, PromptVariant, narrate, perceive, render_assist
from .env import CaregivingEnv
from .reward import RewardWeights
from .scenario import ScenarioSpec, progress_labels
from .seeding import spawn_rng
from .states import StatusVector
from .transition import TransitionModel


@dataclass
class SessionResult:
    transcript: str
    total_return: float
    timesteps: int


def _bits(state: StatusVector) -> str:
    return f"[{state.forgetful},{state.confused},{state.angry},{state.disengaged}]"


def _one_line(text: str) -> str:
    return " / ".join(part.strip() for part in text.splitlines() if part.strip()) if text else ""


def run_session(
    policy: Policy,
    model: TransitionModel,
    scenario: ScenarioSpec,
    weights: RewardWeights,
    backend,
    seed: int = 0,
    noise: float = 0.0,
    use_perceived: bool = False,
    variant: PromptVariant = PromptVariant(),
    transcript_path: str | Path | None = None,
) -> SessionResult:
    env = CaregivingEnv(model, scenario, weights)
    rng = spawn_rng(seed, "session")
    state = env.reset(rng)
    ctx = InteractionContext(scenario_name=scenario.name)

    lines: list[str] = [
        f"Scenario: {scenario.name}",
        f"Policy: {policy.policy_id}",
        f"Prompt variant: guidance={variant.guidance} include_state={variant.include_state}",
        f"Perception noise: {noise:g}  decisions use: {'perceived' if use_perceived else 'true'} state",
        "",
    ]
    total = 0.0
    timestep = 0
    while True:
        timestep += 1
        task_name, subtask_name = progress_labels(env.progress, scenario)
        ctx.task_name = task_name
        ctx.subtask_name = subtask_name
        task_number = env.progress.task_index + 1
        subtask_number = env.progress.subtask_index + 1
        trial_number = env.progress.trial_count + 1

        behavior = narrate(state, ctx, backend)
        ctx.record("PLWD", _one_line(f"{behavior.nonverbal} | {behavior.verbal}"))
        perceived = perceive(behavior, backend, noise=noise, rng=rng)
        decision_state = perceived.state if use_perceived else state
        action = policy(decision_state)
        utterance = render_assist(
            action, ctx, variant, state if variant.include_state else None, backend
        )
        ctx.latest_assistance = utterance
        if utterance:
            ctx.record("Caregiver", _one_line(utterance))

        step = env.step(action)
        total += step.reward

        lines.extend(
            [
                f"=== Timestep {timestep} ===",
                f"TrueState: {_bits(state)}",
                f"PLWD: {_one_line(behavior.nonverbal)} | {_one_line(behavior.verbal)}",
                f"Perceived: {_bits(perceived.state)}",
                f"Action: {action.code} {action.label}",
                f"Robot: {_one_line(utterance)}",
                f"Reward: {step.reward:g}",
                f"Progress: task {task_number} subtask {subtask_number} trial {trial_number}"
                + (" [completed]" if step.events.subtask_completed else "")
                + (" [skipped]" if step.events.subtask_skipped else ""),
            ]
        )
        if step.done:
            break
        state = step.next_state

    lines.extend(["", "=== Episode complete ===", f"Return: {total:g}", f"Timesteps: {timestep}"])
    transcript = "\n".join(lines) + "\n"
    if transcript_path is not None:
        Path(transcript_path).write_text(transcript, encoding="utf-8")
    return SessionResult(transcript=transcript, total_return=total, timesteps=timestep)
