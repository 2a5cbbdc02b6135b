"""Command-line entry point: train, evaluate, simulate.

Every command writes a run manifest (all resolved configuration, seed,
version, timestamps, output paths) before producing any other output, so
a run can be replayed exactly. Defaults reproduce the constant-epsilon
training setup, so a bare ``caresim train`` is the reference experiment.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .agent import (
    ConstantEpsilon,
    ExponentialDecayEpsilon,
    Policy,
    QTable,
    TrainingConfig,
    TrainingLog,
    extract_policy,
    train,
)
from .behavior import PerceiveError, PromptVariant, TemplateBackend
from .config import ConfigError
from .env import CaregivingEnv
from .evaluation import (
    evaluate_policy,
    export_learning_curve,
    export_report,
    random_actor,
    select_final_policy,
)
from .llm import BackendError, HttpBackend, HttpBackendConfig
from .reward import RewardWeights
from .scenario import ScenarioSpec
from .session import run_session
from .transition import TransitionModel


def _load_environment(args) -> tuple[TransitionModel, ScenarioSpec, RewardWeights]:
    model = TransitionModel.from_file(args.model) if args.model else TransitionModel.default()
    scenario = ScenarioSpec.from_file(args.scenario) if args.scenario else ScenarioSpec.default()
    weights = RewardWeights.from_file(args.weights) if args.weights else RewardWeights.default()
    return model, scenario, weights


def _add_environment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", help="scenario config JSON (default: shipped shopping scenario)")
    parser.add_argument("--model", help="transition model config JSON (default: shipped calibration)")
    parser.add_argument("--weights", help="reward weights config JSON (default: shipped weights)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="caresim_out", help="directory for run outputs")


def _write_manifest(out_dir: Path, command: str, resolved: dict, outputs: dict[str, str]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": resolved,
        "outputs": outputs,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _schedule_from_args(args):
    if args.schedule == "constant":
        return ConstantEpsilon(args.epsilon)
    kwargs = {"eps_min": args.eps_min, "eps_max": args.eps_max}
    if args.decay_rate is not None:
        kwargs["decay_rate"] = args.decay_rate
    return ExponentialDecayEpsilon(**kwargs)


def cmd_train(args) -> int:
    model, scenario, weights = _load_environment(args)
    schedule = _schedule_from_args(args)
    config = TrainingConfig(
        model=model,
        scenario=scenario,
        weights=weights,
        schedule=schedule,
        seed=args.seed,
        alpha=args.alpha,
        gamma=args.gamma,
        epochs=args.epochs,
        episodes_per_epoch=args.episodes,
        snapshot_episode=args.snapshot_episode,
        snapshot_rollouts=args.snapshot_rollouts,
        final_policy_window=args.final_window,
        perception_noise=args.perception_noise,
    )
    config.validate()

    out_dir = Path(args.out_dir)
    outputs = {
        "qtable": str(out_dir / "qtable.csv"),
        "policy": str(out_dir / "policy.csv"),
        "training_log": str(out_dir / "training_log.csv"),
        "learning_curve": str(out_dir / "learning_curve.csv"),
    }
    resolved = {
        "schedule": args.schedule,
        "epsilon": args.epsilon if args.schedule == "constant" else None,
        "eps_min": None if args.schedule == "constant" else schedule.eps_min,
        "eps_max": None if args.schedule == "constant" else schedule.eps_max,
        "decay_rate": None if args.schedule == "constant" else schedule.decay_rate,
        "alpha": config.alpha,
        "gamma": config.gamma,
        "epochs": config.epochs,
        "episodes_per_epoch": config.episodes_per_epoch,
        "snapshot_episode": config.snapshot_episode,
        "snapshot_rollouts": config.snapshot_rollouts,
        "final_policy_window": config.final_policy_window,
        "perception_noise": config.perception_noise,
        "seed": config.seed,
        "transition_model": model.to_dict(),
        "scenario": scenario.to_dict(),
        "reward_weights": weights.to_dict(),
    }
    _write_manifest(out_dir, "train", resolved, outputs)

    q, log = train(config)
    policy = extract_policy(q)
    q.to_file(outputs["qtable"])
    policy.to_file(outputs["policy"])
    log.to_file(outputs["training_log"])
    strategy = "constant-epsilon" if args.schedule == "constant" else "decaying-epsilon"
    export_learning_curve(outputs["learning_curve"], log, strategy)

    # exit 0 only if everything written round-trips
    QTable.from_file(outputs["qtable"])
    Policy.from_file(outputs["policy"])
    TrainingLog.from_file(outputs["training_log"])

    final = log.epochs[-1]
    if final.mean_return is not None:
        print(f"final snapshot policy {final.policy_id}: mean return {final.mean_return:.3f}")
    else:
        print(f"final snapshot policy {final.policy_id} (snapshot evaluation disabled)")
    print(f"artifacts written to {out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    model, scenario, weights = _load_environment(args)
    env = CaregivingEnv(model, scenario, weights)
    out_dir = Path(args.out_dir)

    if args.select_final:
        if not args.log:
            raise ConfigError("--select-final requires --log")
        rollouts = args.rollouts if args.rollouts is not None else 10000
        resolved = {
            "mode": "select-final",
            "log": args.log,
            "rollouts": rollouts,
            "seed": args.seed,
            "scenario": scenario.to_dict(),
        }
        outputs = {"report": str(out_dir / "evaluation_report.json"),
                   "final_policy": str(out_dir / "final_policy.csv")}
        _write_manifest(out_dir, "evaluate", resolved, outputs)
        log = TrainingLog.from_file(args.log)
        best, reports = select_final_policy(log, env, rollouts=rollouts, base_seed=args.seed)
        for report in reports:
            print(report.summary())
        print(f"selected final policy: {best.policy_id}")
        best.to_file(outputs["final_policy"])
        export_report(outputs["report"], reports)
        return 0

    rollouts = args.rollouts if args.rollouts is not None else 40
    if args.baseline == "random":
        actor = random_actor
        mode = "baseline-random"
    else:
        if not args.policy:
            raise ConfigError("provide --policy FILE or --baseline random")
        actor = Policy.from_file(args.policy)
        mode = "policy"
    resolved = {
        "mode": mode,
        "policy": args.policy,
        "rollouts": rollouts,
        "seed": args.seed,
        "scenario": scenario.to_dict(),
    }
    outputs = {"report": str(out_dir / "evaluation_report.json")}
    _write_manifest(out_dir, "evaluate", resolved, outputs)
    report = evaluate_policy(actor, env, rollouts, args.seed)
    print(report.summary())
    export_report(outputs["report"], [report])
    return 0


def cmd_simulate(args) -> int:
    model, scenario, weights = _load_environment(args)
    policy = Policy.from_file(args.policy)
    variant = PromptVariant(guidance=args.guidance, include_state=args.include_state)

    if args.backend == "http":
        http_config = HttpBackendConfig(
            base_url=args.base_url or "",
            model=args.llm_model or "",
            temperature=args.temperature,
            timeout_ms=args.timeout_ms,
            max_retries=args.max_retries,
        )
        if not http_config.base_url or not http_config.model:
            raise ConfigError("--backend http requires --base-url and --llm-model")
        backend = HttpBackend(http_config)
    else:
        backend = TemplateBackend()

    out_dir = Path(args.out_dir)
    transcript_path = Path(args.transcript) if args.transcript else out_dir / "transcript.txt"
    resolved = {
        "policy": args.policy,
        "backend": args.backend,
        "noise": args.noise,
        "use_perceived": args.use_perceived,
        "guidance": args.guidance,
        "include_state": args.include_state,
        "seed": args.seed,
        "scenario": scenario.to_dict(),
    }
    _write_manifest(out_dir, "simulate", resolved, {"transcript": str(transcript_path)})

    result = run_session(
        policy,
        model,
        scenario,
        weights,
        backend,
        seed=args.seed,
        noise=args.noise,
        use_perceived=args.use_perceived,
        variant=variant,
        transcript_path=transcript_path,
    )
    print(f"episode return {result.total_return:g} over {result.timesteps} timesteps")
    print(f"transcript written to {transcript_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caresim",
        description="Simulated dementia-caregiving interactions with a learning caregiver agent",
    )
    parser.add_argument("--version", action="version", version=f"caresim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the caregiver agent")
    _add_environment_flags(p_train)
    p_train.add_argument("--schedule", choices=("constant", "decay"), default="constant")
    p_train.add_argument("--epsilon", type=float, default=0.1, help="constant exploration rate")
    p_train.add_argument("--eps-min", type=float, default=0.03)
    p_train.add_argument("--eps-max", type=float, default=1.0)
    p_train.add_argument("--decay-rate", type=float, default=None,
                         help="decay rate (default: calibrated so epsilon reaches 0.8 at epoch 300)")
    p_train.add_argument("--alpha", type=float, default=0.05)
    p_train.add_argument("--gamma", type=float, default=0.95)
    p_train.add_argument("--epochs", type=int, default=6000)
    p_train.add_argument("--episodes", type=int, default=30)
    p_train.add_argument("--snapshot-episode", type=int, default=10)
    p_train.add_argument("--snapshot-rollouts", type=int, default=40,
                         help="rollouts per epoch snapshot evaluation (0 disables)")
    p_train.add_argument("--final-window", type=int, default=100)
    p_train.add_argument("--perception-noise", type=float, default=0.0,
                         help="train on noisily observed states instead of true states")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="evaluate a policy or baseline")
    _add_environment_flags(p_eval)
    p_eval.add_argument("--policy", help="policy file to evaluate")
    p_eval.add_argument("--baseline", choices=("random",), help="evaluate a baseline actor instead")
    p_eval.add_argument("--rollouts", type=int, default=None,
                        help="rollout count (default 40; 10000 for --select-final)")
    p_eval.add_argument("--select-final", action="store_true",
                        help="select the best late-training policy from a training log")
    p_eval.add_argument("--log", help="training log for --select-final")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="run one full interaction episode with transcript")
    _add_environment_flags(p_sim)
    p_sim.add_argument("--policy", required=True)
    p_sim.add_argument("--backend", choices=("template", "http"), default="template")
    p_sim.add_argument("--noise", type=float, default=0.0, help="perception bit-flip probability")
    p_sim.add_argument("--use-perceived", action="store_true",
                       help="route decisions through the perceived state")
    p_sim.add_argument("--guidance", choices=("brief", "detailed"), default="brief")
    p_sim.add_argument("--include-state", action="store_true",
                       help="include the true state in assistance prompts")
    p_sim.add_argument("--transcript", help="transcript path (default: OUT_DIR/transcript.txt)")
    p_sim.add_argument("--base-url", help="chat-completions endpoint base URL (http backend)")
    p_sim.add_argument("--llm-model", help="model name for the http backend")
    p_sim.add_argument("--temperature", type=float, default=0.7)
    p_sim.add_argument("--timeout-ms", type=int, default=30000)
    p_sim.add_argument("--max-retries", type=int, default=2)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, BackendError, PerceiveError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
