"""caresim: a seedable simulator of dementia-caregiving interactions.

A probabilistic model of a person living with dementia performing
multi-step daily tasks, a tabular Q-learning caregiver agent choosing
among four verbal assistance levels, the training and evaluation protocol
around it, and a pluggable text layer that renders states as behavior and
actions as caregiver speech.
"""

__version__ = "0.1.0"

from .agent import (
    ConstantEpsilon,
    EpsilonSchedule,
    ExponentialDecayEpsilon,
    Policy,
    QTable,
    TrainingConfig,
    TrainingLog,
    epsilon_at,
    extract_policy,
    q_update,
    select_action,
    train,
)
from .behavior import (
    BehaviorText,
    InteractionContext,
    PerceivedState,
    PerceiveError,
    PromptVariant,
    TemplateBackend,
    narrate,
    perceive,
    render_assist,
)
from .config import ConfigError
from .env import CaregivingEnv, EnvStep
from .evaluation import (
    EvaluationReport,
    evaluate_policy,
    random_actor,
    run_episode,
    select_final_policy,
)
from .llm import BackendError, BackendProtocolError, BackendTimeout, HttpBackend, HttpBackendConfig
from .reward import RewardWeights, compute_reward
from .scenario import (
    ProgressState,
    ScenarioSpec,
    StepEvents,
    TaskSpec,
    advance,
    is_terminal,
    load_scenario,
)
from .session import SessionResult, run_session
from .states import ACTIONS, STATUS_NAMES, AssistAction, StatusVector
from .transition import TransitionModel, onset_probability, step_skip, transition

__all__ = [
    "ACTIONS",
    "STATUS_NAMES",
    "AssistAction",
    "BackendError",
    "BackendProtocolError",
    "BackendTimeout",
    "BehaviorText",
    "CaregivingEnv",
    "ConfigError",
    "ConstantEpsilon",
    "EnvStep",
    "EpsilonSchedule",
    "EvaluationReport",
    "ExponentialDecayEpsilon",
    "HttpBackend",
    "HttpBackendConfig",
    "InteractionContext",
    "PerceiveError",
    "PerceivedState",
    "Policy",
    "ProgressState",
    "PromptVariant",
    "QTable",
    "RewardWeights",
    "ScenarioSpec",
    "SessionResult",
    "StatusVector",
    "StepEvents",
    "TaskSpec",
    "TemplateBackend",
    "TrainingConfig",
    "TrainingLog",
    "TransitionModel",
    "advance",
    "compute_reward",
    "epsilon_at",
    "evaluate_policy",
    "extract_policy",
    "is_terminal",
    "load_scenario",
    "narrate",
    "onset_probability",
    "perceive",
    "q_update",
    "random_actor",
    "render_assist",
    "run_episode",
    "run_session",
    "select_action",
    "select_final_policy",
    "step_skip",
    "train",
    "transition",
]
