"""Command-line entry point: simulate, train, evaluate, gradcheck.

Every command is a pure function of (config file, flags, seeds): outputs
are CSV/JSON files with stable formatting and no timestamps, so reruns
are byte-identical. Exit codes: 0 success, 1 runtime failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import marl, nets
from .config import (
    DOMAIN_POLICY,
    ScenarioConfig,
    World,
    build_world,
    canonical_json,
    config_to_dict,
    load_config,
    seed_int,
    workload_digest,
)
from .core import ConfigError
from .data import ParseError
from .environment import ClusterEnv
from .policies import BASELINES, RandomLegal, run_episode

SUMMARY_COLUMNS = [
    "scenario", "utility_usd", "u1_gpu_profit", "u2_idle_cost", "u3_carbon_cost",
    "u4_migration_cost", "u5_retrieval_cost", "gpu_hours",
    "cost_efficiency_usd_per_gpu_hour", "carbon_efficiency_g_per_gpu_hour",
    "jobs_finished", "jobs_failed", "migrations", "workload_digest",
]


def _write_manifest(out: Path, command: str, cfg: ScenarioConfig, extra: dict) -> None:
    doc = {"command": command, "config": config_to_dict(cfg), **extra}
    (out / "run_manifest.json").write_text(canonical_json(doc), encoding="utf-8")


def _load(args) -> tuple[ScenarioConfig, World]:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    world = build_world(cfg, Path(args.config).parent)
    return cfg, world


def _out_dir(args, cfg: ScenarioConfig, command: str) -> Path:
    out = Path(args.out) if args.out else Path("runs") / cfg.name / command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_summary_row(path: Path, row: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerow(
            [repr(row[c]) if isinstance(row[c], float) else row[c]
             for c in SUMMARY_COLUMNS]
        )


def cmd_simulate(args) -> int:
    if args.policy not in BASELINES:
        print(
            f"error: unknown policy {args.policy!r}; "
            f"choose from {sorted(BASELINES)}",
            file=sys.stderr,
        )
        return 2
    cfg, world = _load(args)
    out = _out_dir(args, cfg, f"simulate_{args.policy}")
    jobs = world.jobs_for(0)
    env = ClusterEnv(world, jobs, k_max=0)
    if args.policy == "random":
        policy = RandomLegal(seed_int(cfg.seed, DOMAIN_POLICY, 0))
    else:
        policy = BASELINES[args.policy]()
    run_episode(env, policy)
    led = env.ledger
    led.write_events_csv(out / "events.csv")
    env.write_utilization_csv(out / "utilization.csv")
    row = {
        "scenario": args.policy,
        "utility_usd": led.utility(),
        "u1_gpu_profit": led.u1_gpu_profit,
        "u2_idle_cost": led.u2_idle_cost,
        "u3_carbon_cost": led.u3_carbon_cost,
        "u4_migration_cost": led.u4_migration_cost,
        "u5_retrieval_cost": led.u5_retrieval_cost,
        "gpu_hours": led.gpu_hours,
        "cost_efficiency_usd_per_gpu_hour": led.cost_efficiency_usd_per_gpu_hour(),
        "carbon_efficiency_g_per_gpu_hour": led.carbon_efficiency_g_per_gpu_hour(),
        "jobs_finished": env.counters["finished"],
        "jobs_failed": env.counters["failed"],
        "migrations": env.counters["migrated"],
        "workload_digest": workload_digest(jobs),
    }
    _write_summary_row(out / "summary.csv", row)
    _write_manifest(out, "simulate", cfg, {"policy": args.policy, "seed": cfg.seed})
    print(f"utility {led.utility():.6f} USD; outputs in {out}")
    return 0


def cmd_train(args) -> int:
    cfg, world = _load(args)
    out = _out_dir(args, cfg, f"train_{args.algo}")
    parallel = args.parallel if args.parallel else cfg.training.n_envs
    result = marl.train(
        world,
        cfg.training,
        args.algo,
        out,
        master_seed=cfg.seed,
        epochs=args.epochs,
        parallel=parallel,
        resume=args.resume,
    )
    _write_manifest(
        out, "train", cfg,
        {"algo": args.algo, "seed": cfg.seed, "epochs_run": result["epochs_run"]},
    )
    print(f"trained {result['epochs_run']} epochs; log at {result['log_path']}")
    return 0


def cmd_evaluate(args) -> int:
    cfg, world = _load(args)
    out = _out_dir(args, cfg, "evaluate")
    policies = {
        "local": BASELINES["local"](),
        "price_greedy": BASELINES["price_greedy"](),
        "carbon_greedy": BASELINES["carbon_greedy"](),
    }
    for algo in ("madqn", "masac"):
        spec = _find_checkpoints(args.checkpoints, algo, world.n_dcs)
        if spec is None:
            print(f"note: no {algo} checkpoints found; scenario skipped")
            continue
        policies[algo] = marl.SpecPolicy(spec, world.scales)
    rows = marl.evaluate(world, policies, cfg.training.eval_envs, out_dir=out)
    _write_manifest(
        out, "evaluate", cfg,
        {"seed": cfg.seed, "scenarios": [r["scenario"] for r in rows]},
    )
    for row in rows:
        print(f"{row['scenario']}: utility {row['utility_usd']:.6f} USD")
    return 0


def _find_checkpoints(base, algo: str, n_agents: int):
    if base is None:
        return None
    root = Path(base)
    for cand in (root / algo, root / algo / "checkpoints", root):
        probe = "agent0_actor.npz" if algo == "masac" else "agent0_q1.npz"
        if (cand / probe).exists():
            try:
                return marl.load_policy_from_checkpoints(cand, n_agents, algo)
            except FileNotFoundError:
                continue
    return None


def cmd_gradcheck(args) -> int:
    report = nets.check_gradients(seed=args.seed or 0, trials=args.trials, tol=args.tol)
    print(
        f"gradient check: {report['trials']} trials, "
        f"max relative error {report['max_rel_err']:.3e}, "
        f"threshold {report['tol']:.1e}: "
        f"{'PASS' if report['passed'] else 'FAIL'}"
    )
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosched",
        description="Geo-distributed GPU job scheduling: simulate, train, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="scenario JSON")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", default=None, help="output directory")

    p_sim = sub.add_parser("simulate", help="run one baseline episode")
    common(p_sim)
    p_sim.add_argument("--policy", required=True, help="baseline policy name")
    p_sim.set_defaults(func=cmd_simulate)

    p_train = sub.add_parser("train", help="train agents")
    common(p_train)
    p_train.add_argument("--algo", choices=("masac", "madqn"), default="masac")
    p_train.add_argument("--epochs", type=int, default=None, help="epoch override")
    p_train.add_argument("--parallel", type=int, default=None,
                         help="collection processes (default: env count)")
    p_train.add_argument("--resume", action="store_true",
                         help="continue from trainer state in --out")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="compare all scenarios")
    common(p_eval)
    p_eval.add_argument("--checkpoints", default=None,
                        help="directory holding masac/ and madqn/ checkpoints")
    p_eval.set_defaults(func=cmd_evaluate)

    p_grad = sub.add_parser("gradcheck", help="verify gradients numerically")
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--trials", type=int, default=100)
    p_grad.add_argument("--tol", type=float, default=1e-4)
    p_grad.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
