"""Command-line entry point.

One binary with subcommands: gen-data, train-reward, train-policy,
evaluate, compare, verify, serve. Configuration comes from a simple
`key = value` text file with command-line flags taking precedence; every
command that writes results also writes a RunManifest beside each output.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .engine import ParseError, parse_program, parse_query
from .logic_feedback import LogicRewardConfig, logic_reward, verify_chain_cached
from .manifest import utc_now, write_manifest
from .policy import (
    Action,
    InstanceContext,
    PolicyParams,
    answer_action,
    apply_clause,
    replay_actions_to_chain,
    sample_response,
)
from .preference import AnnotatorConfig, sample_pairs
from .reward_model import (
    TrainHyper,
    pairwise_accuracy,
    save_checkpoint,
    train_reward_model,
)
from .seeds import derive_seed
from .taskgen import GenConfig, TaskInstance, generate_dataset, read_dataset, write_dataset
from .trainer import (
    DATASET_MIX,
    REWARD_BLEND,
    RLHF,
    RLLF,
    BlendConfig,
    TrainConfig,
    evaluate_policy,
    train_policy,
)

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we want exit(1)
        raise UsageError(message)


def parse_config_file(path: str | Path) -> dict:
    """`key = value` lines; '#' and '%' start comments; values are typed."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].split("%", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"{path}:{lineno}: empty key")
        out[key] = _coerce(value)
    return out


def _coerce(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def _setting(args, config: dict, key: str, default):
    """Flag beats config file beats default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _gen_config(args, config: dict) -> GenConfig:
    return GenConfig(
        n_predicates=_setting(args, config, "n_predicates", 6),
        max_rule_body=_setting(args, config, "max_rule_body", 2),
        rule_depth=_setting(args, config, "rule_depth", 2),
        negation_rate=_setting(args, config, "negation_rate", 0.15),
        n_constants=_setting(args, config, "n_constants", 3),
        balance=_setting(args, config, "balance", 0.5),
    )


def _annotator_config(args, config: dict) -> AnnotatorConfig:
    return AnnotatorConfig(
        bias=_setting(args, config, "bias", 0.0),
        noise=_setting(args, config, "noise", 0.0),
        seed=_setting(args, config, "annotator_seed", 0),
    )


def _train_configs(args, config: dict) -> tuple[TrainConfig, AnnotatorConfig]:
    hyper = TrainHyper(
        learning_rate=_setting(args, config, "reward_lr", 0.2),
        epochs=_setting(args, config, "reward_epochs", 40),
        batch_size=_setting(args, config, "reward_batch_size", 64),
        l2=_setting(args, config, "reward_l2", 1e-4),
    )
    train_config = TrainConfig(
        iterations=_setting(args, config, "iterations", 200),
        rollouts_per_iter=_setting(args, config, "rollouts_per_iter", 64),
        policy_lr=_setting(args, config, "policy_lr", 0.1),
        baseline=_setting(args, config, "baseline", "batch_mean"),
        max_steps=_setting(args, config, "max_steps", 16),
        seed=_setting(args, config, "seed", 0),
        reward_hyper=hyper,
        eval_every=_setting(args, config, "eval_every", 10),
        group_size=_setting(args, config, "group_size", 4),
        pairs_per_iter=_setting(args, config, "pairs_per_iter", 64),
        target_records=_setting(args, config, "target_records", 512),
    )
    return train_config, _annotator_config(args, config)


def _load_instances(path: str) -> dict[str, TaskInstance]:
    return {inst.id: inst for inst in read_dataset(path)}


def cmd_gen_data(args, config: dict) -> int:
    started = utc_now()
    gcfg = _gen_config(args, config)
    n = _setting(args, config, "n", None)
    seed = _setting(args, config, "seed", 0)
    if n is None:
        raise UsageError("gen-data requires --n (or 'n' in the config file)")
    instances = generate_dataset(gcfg, int(n), int(seed))
    write_dataset(args.out, instances)
    write_manifest(
        args.out,
        "gen-data",
        {"gen": gcfg.__dict__, "n": int(n), "seed": int(seed)},
        int(seed),
        inputs=[args.config] if args.config else [],
        outputs=[args.out],
        started_at=started,
    )
    print(f"wrote {len(instances)} instances to {args.out}")
    return 0


def _read_pairs_file(path: str, instances: dict[str, TaskInstance], max_steps: int):
    """Queue-file pairs rebuilt into SegmentPair objects via transcripts."""
    from .preference import SegmentPair

    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            instance = instances.get(obj["instance_id"])
            if instance is None:
                raise UsageError(f"pair {obj['pair_id']} references unknown instance {obj['instance_id']}")
            sigma1 = _transcript_to_response(obj["sigma1"], instance, max_steps)
            sigma2 = _transcript_to_response(obj["sigma2"], instance, max_steps)
            pairs.append(SegmentPair(obj["pair_id"], sigma1, sigma2, instance.id))
    return pairs


def _actions_from_steps(steps: Sequence[dict]) -> list[Action]:
    actions: list[Action] = []
    for step in steps:
        if step["action"] == "apply_clause":
            actions.append(apply_clause(int(step["clause_index"])))
        elif step["action"] == "answer":
            actions.append(answer_action(step["answer"]))
        else:
            raise UsageError(f"unknown action {step['action']!r} in transcript")
    return actions


def _normalized_steps(obj: dict) -> list[dict]:
    """Transcript steps with the final answer present and value-filled."""
    steps = [dict(s) for s in obj["steps"]]
    if not steps or steps[-1]["action"] != "answer":
        steps.append({"action": "answer", "answer": obj["answer"]})
    for step in steps:
        if step["action"] == "answer" and "answer" not in step:
            step["answer"] = obj["answer"]
    return steps


def _transcript_to_response(obj: dict, instance: TaskInstance, max_steps: int):
    """Rebuild a Response by replaying the transcript's action sequence."""
    from .policy import _Derivation, Response, State

    actions = _actions_from_steps(_normalized_steps(obj))
    ctx = InstanceContext(instance, max_steps)
    der = _Derivation(ctx)
    recorded: list[tuple[State, Action]] = []
    for t, action in enumerate(actions):
        recorded.append((der.state(instance.id, t), action))
        if action.kind == "answer":
            break
        der.apply(t, action.clause_index)
    return Response(instance.id, recorded, obj.get("raw_text", ""), max_steps)


def cmd_train_reward(args, config: dict) -> int:
    started = utc_now()
    instances = _load_instances(args.instances)
    max_steps = _setting(args, config, "max_steps", 16)
    pairs = _read_pairs_file(args.pairs, instances, max_steps)
    by_id = {p.pair_id: p for p in pairs}
    from .preference import load_records

    records = []
    for rec in load_records(args.records):
        pair = by_id.get(rec.pair_id)
        if pair is None:
            raise UsageError(f"record references unknown pair {rec.pair_id}")
        records.append((pair, rec.mu))
    hyper = TrainHyper(
        learning_rate=_setting(args, config, "reward_lr", 0.2),
        epochs=_setting(args, config, "reward_epochs", 40),
        batch_size=_setting(args, config, "reward_batch_size", 64),
        l2=_setting(args, config, "reward_l2", 1e-4),
        seed=_setting(args, config, "seed", 0),
    )
    result = train_reward_model(records, hyper, instances)
    save_checkpoint(args.out, result, hyper)
    accuracy = pairwise_accuracy(result.params, records, instances)
    write_manifest(
        args.out,
        "train-reward",
        {"hyper": hyper.__dict__, "n_records": len(records)},
        hyper.seed,
        inputs=[p for p in (args.pairs, args.records, args.instances, args.config) if p],
        outputs=[args.out],
        started_at=started,
    )
    print(f"trained on {len(records)} records; train pairwise accuracy {accuracy:.3f}")
    return 0


def cmd_train_policy(args, config: dict) -> int:
    started = utc_now()
    mode = args.mode
    if mode == RLLF and args.lambda_ is None and "lambda" not in config:
        raise UsageError("--mode rllf requires --lambda")
    train_config, annotator = _train_configs(args, config)
    blend: Optional[BlendConfig] = None
    if mode == RLLF:
        lam = args.lambda_ if args.lambda_ is not None else config.get("lambda")
        blend_mode = _setting(args, config, "blend_mode", DATASET_MIX)
        blend = BlendConfig(float(lam), blend_mode)
    train_set = read_dataset(args.train)
    eval_set = read_dataset(args.eval)
    report = train_policy(train_set, eval_set, train_config, blend, annotator)
    report.save(args.out)
    csv_path = Path(args.out).with_suffix(".metrics.csv")
    csv_path.write_text(report.metrics_csv(), encoding="utf-8")
    outputs = [args.out, str(csv_path)]
    if args.export_pairs:
        n_export = int(_setting(args, config, "export_n", 32))
        _export_pairs(args.export_pairs, report, train_set, train_config, n_export)
        outputs.append(args.export_pairs)
    write_manifest(
        args.out,
        "train-policy",
        report.config,
        train_config.seed,
        inputs=[p for p in (args.train, args.eval, args.config) if p],
        outputs=outputs,
        started_at=started,
    )
    print(
        f"{mode} run finished: final logical accuracy "
        f"{report.final_logical_accuracy:.3f} -> {args.out}"
    )
    return 0


def _export_pairs(
    path: str,
    report,
    train_set: list[TaskInstance],
    train_config: TrainConfig,
    n_pairs: int,
) -> None:
    """Roll out the final policy and dump rendered pairs for annotation."""
    policy = report.final_policy
    seed = derive_seed(train_config.seed, "export")
    groups: dict[str, list] = {}
    contexts = {inst.id: InstanceContext(inst, train_config.max_steps) for inst in train_set}
    instances = {inst.id: inst for inst in train_set}
    n_groups = max(2, n_pairs // 2)
    import random as _random

    rng = _random.Random(seed)
    for g in range(n_groups):
        inst = train_set[rng.randrange(len(train_set))]
        for k in range(train_config.group_size):
            r = sample_response(
                policy, inst, derive_seed(seed, f"{g}:{k}"), train_config.max_steps, contexts[inst.id]
            )
            groups.setdefault(inst.id, []).append(r)
    pairs = sample_pairs(groups, n_pairs, derive_seed(seed, "pairs"))
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            inst = instances[pair.instance_ref]
            fh.write(
                json.dumps(
                    {
                        "pair_id": pair.pair_id,
                        "instance_id": inst.id,
                        "program_text": inst.program_text,
                        "query_text": inst.query_text,
                        "sigma1": pair.sigma1.to_json(inst.query_text),
                        "sigma2": pair.sigma2.to_json(inst.query_text),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def cmd_evaluate(args, config: dict) -> int:
    started = utc_now()
    eval_set = read_dataset(args.eval)
    payload = json.loads(Path(args.policy).read_text(encoding="utf-8"))
    if "final_policy_weights" in payload:
        weights = payload["final_policy_weights"]
    elif "weights" in payload:
        weights = payload["weights"]
    else:
        raise UsageError(f"{args.policy} holds neither a train report nor a policy checkpoint")
    policy = PolicyParams(np.asarray(weights, dtype=float))
    annotator = _annotator_config(args, config)
    max_steps = _setting(args, config, "max_steps", 16)
    metrics = evaluate_policy(policy, eval_set, annotator, max_steps)
    Path(args.out).write_text(
        json.dumps(metrics.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    write_manifest(
        args.out,
        "evaluate",
        {"annotator": annotator.__dict__, "max_steps": max_steps},
        None,
        inputs=[p for p in (args.policy, args.eval, args.config) if p],
        outputs=[args.out],
        started_at=started,
    )
    print(json.dumps(metrics.to_json(), sort_keys=True))
    return 0


def cmd_compare(args, config: dict) -> int:
    started = utc_now()
    train_set = read_dataset(args.train)
    eval_set = read_dataset(args.eval)
    base_config, annotator = _train_configs(args, config)
    seeds = [int(s) for s in str(_setting(args, config, "seeds", "1,2,3,4,5")).split(",")]
    lambdas = [float(x) for x in str(_setting(args, config, "lambdas", "0,0.25,0.5,0.75,1")).split(",")]
    blend_mode = _setting(args, config, "blend_mode", DATASET_MIX)

    rows: list[dict] = []
    arms: list[tuple[str, Optional[BlendConfig]]] = [(RLHF, None)]
    arms += [(f"{RLLF}(lambda={lam:g})", BlendConfig(lam, blend_mode)) for lam in lambdas]
    for arm_name, blend in arms:
        for seed in seeds:
            run_config = replace(base_config, seed=seed)
            report = train_policy(train_set, eval_set, run_config, blend, annotator)
            final_logic = [v for v in report.series["mean_logic_reward"] if v is not None][-1]
            rows.append(
                {
                    "arm": arm_name,
                    "seed": seed,
                    "logical_accuracy": report.final_logical_accuracy,
                    "mean_logic_reward": final_logic,
                    "simulated_satisfaction": report.series["simulated_satisfaction"][-1],
                }
            )
    lines = ["arm,seed,logical_accuracy,mean_logic_reward,simulated_satisfaction"]
    for row in rows:
        lines.append(
            f"{row['arm']},{row['seed']},{row['logical_accuracy']:.6f},"
            f"{row['mean_logic_reward']:.6f},{row['simulated_satisfaction']:.6f}"
        )
    for arm_name, _ in arms:
        arm_rows = [r for r in rows if r["arm"] == arm_name]
        mean_acc = sum(r["logical_accuracy"] for r in arm_rows) / len(arm_rows)
        lines.append(f"{arm_name},mean,{mean_acc:.6f},,")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_manifest(
        args.out,
        "compare",
        {"seeds": seeds, "lambdas": lambdas, "blend_mode": blend_mode, "train": base_config.to_json()},
        base_config.seed,
        inputs=[p for p in (args.train, args.eval, args.config) if p],
        outputs=[args.out],
        started_at=started,
    )
    print(f"wrote comparison table ({len(rows)} runs) to {args.out}")
    return 0


def cmd_verify(args, config: dict) -> int:
    started = utc_now()
    if not args.program and not args.instances:
        raise UsageError("verify requires --program or --instances")
    shared_program = None
    if args.program:
        shared_program = parse_program(Path(args.program).read_text(encoding="utf-8"))
    instances = _load_instances(args.instances) if args.instances else {}
    max_steps = _setting(args, config, "max_steps", 16)
    logic_config = LogicRewardConfig()

    reports = []
    with open(args.transcripts, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            reports.append(
                _verify_line(line, lineno, shared_program, instances, max_steps, logic_config)
            )
    out_text = "\n".join(json.dumps(r, sort_keys=True) for r in reports) + "\n"
    if args.out:
        Path(args.out).write_text(out_text, encoding="utf-8")
        write_manifest(
            args.out,
            "verify",
            {"max_steps": max_steps},
            None,
            inputs=[p for p in (args.program, args.instances, args.transcripts, args.config) if p],
            outputs=[args.out],
            started_at=started,
        )
    else:
        sys.stdout.write(out_text)
    n_valid = sum(1 for r in reports if r.get("parse_ok") and r.get("fully_valid"))
    print(f"verified {len(reports)} transcripts: {n_valid} fully valid")
    return 0


def _verify_line(
    line: str,
    lineno: int,
    shared_program,
    instances: dict[str, TaskInstance],
    max_steps: int,
    logic_config: LogicRewardConfig,
) -> dict:
    base = {"line": lineno, "parse_ok": False, "logic_reward": logic_config.parse_failure_reward}
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        base["diagnostic"] = f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        return base
    instance_id = obj.get("instance_id", "")
    base["instance_id"] = instance_id
    try:
        if instance_id in instances:
            instance = instances[instance_id]
        elif shared_program is not None:
            query = parse_query(obj["query"])
            from .engine import solve

            verdict = solve(shared_program, query)
            instance = TaskInstance(
                id=instance_id or f"transcript-{lineno}",
                program=shared_program,
                query=query,
                gold=verdict.value,
                meta={},
            )
        else:
            base["diagnostic"] = f"unknown instance {instance_id!r} and no --program given"
            return base

        actions = _actions_from_steps(_normalized_steps(obj))
        ctx = InstanceContext(instance, max_steps)
        chain, positions = replay_actions_to_chain(instance, actions, max_steps, ctx)
        # cross-check transcript goals against the replayed derivation; a
        # mismatching goal is kept so verification flags the step
        for action_idx, chain_idx in enumerate(positions):
            if chain_idx is None:
                continue
            goal_text = obj["steps"][action_idx].get("goal", "") if action_idx < len(obj["steps"]) else ""
            if goal_text:
                parsed_goal = parse_query(goal_text)
                if parsed_goal != chain.steps[chain_idx].goal:
                    chain.steps[chain_idx].goal = parsed_goal
        report = verify_chain_cached(instance, chain, ctx)
        reward = logic_reward(report, parse_ok=True, config=logic_config)
        return {
            "line": lineno,
            "instance_id": instance.id,
            "parse_ok": True,
            "logic_reward": reward,
            "valid_steps": report.valid_steps,
            "total_steps": report.total_steps,
            "answer_consistent": report.answer_consistent,
            "first_invalid_index": report.first_invalid_index,
            "fully_valid": report.valid_steps == report.total_steps and report.answer_consistent,
            "warnings": report.warnings,
        }
    except ParseError as exc:
        base["diagnostic"] = f"SyntaxError: {exc}"
        return base
    except (KeyError, ValueError, UsageError) as exc:
        base["diagnostic"] = f"malformed transcript: {exc}"
        return base


def cmd_serve(args, config: dict) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(
        queue_path=args.pairs,
        store_path=args.store,
        display_seed=_setting(args, config, "display_seed", 0),
    )
    host = _setting(args, config, "host", "127.0.0.1")
    port = int(_setting(args, config, "port", 8000))
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="logicrl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("gen-data", help="generate a task dataset")
    common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True)
    for field_name in ("n_predicates", "max_rule_body", "rule_depth", "n_constants"):
        p.add_argument(f"--{field_name.replace('_', '-')}", dest=field_name, type=int, default=None)
    p.add_argument("--negation-rate", dest="negation_rate", type=float, default=None)
    p.add_argument("--balance", type=float, default=None)

    p = sub.add_parser("train-reward", help="train the reward model from stored records")
    common(p)
    p.add_argument("--pairs", required=True, help="pair queue file with transcripts")
    p.add_argument("--records", required=True, help="preference record store")
    p.add_argument("--instances", required=True, help="task dataset the pairs reference")
    p.add_argument("--out", required=True)
    p.add_argument("--reward-lr", dest="reward_lr", type=float, default=None)
    p.add_argument("--reward-epochs", dest="reward_epochs", type=int, default=None)
    p.add_argument("--reward-batch-size", dest="reward_batch_size", type=int, default=None)
    p.add_argument("--reward-l2", dest="reward_l2", type=float, default=None)

    p = sub.add_parser("train-policy", help="run RLHF or RLLF training")
    common(p)
    p.add_argument("--mode", choices=(RLHF, RLLF), required=True)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--blend-mode", dest="blend_mode", choices=(DATASET_MIX, REWARD_BLEND), default=None)
    p.add_argument("--train", required=True)
    p.add_argument("--eval", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--export-pairs", dest="export_pairs", default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--rollouts-per-iter", dest="rollouts_per_iter", type=int, default=None)
    p.add_argument("--policy-lr", dest="policy_lr", type=float, default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    p.add_argument("--eval-every", dest="eval_every", type=int, default=None)
    p.add_argument("--pairs-per-iter", dest="pairs_per_iter", type=int, default=None)
    p.add_argument("--group-size", dest="group_size", type=int, default=None)
    p.add_argument("--target-records", dest="target_records", type=int, default=None)
    p.add_argument("--bias", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--annotator-seed", dest="annotator_seed", type=int, default=None)

    p = sub.add_parser("evaluate", help="evaluate a trained policy on a dataset")
    common(p)
    p.add_argument("--policy", required=True, help="train report or policy checkpoint")
    p.add_argument("--eval", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bias", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)

    p = sub.add_parser("compare", help="RLHF baseline vs an RLLF lambda sweep")
    common(p)
    p.add_argument("--train", required=True)
    p.add_argument("--eval", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", default=None, help="comma-separated, default 1,2,3,4,5")
    p.add_argument("--lambdas", default=None, help="comma-separated, default 0,0.25,0.5,0.75,1")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--rollouts-per-iter", dest="rollouts_per_iter", type=int, default=None)
    p.add_argument("--eval-every", dest="eval_every", type=int, default=None)
    p.add_argument("--policy-lr", dest="policy_lr", type=float, default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    p.add_argument("--pairs-per-iter", dest="pairs_per_iter", type=int, default=None)
    p.add_argument("--group-size", dest="group_size", type=int, default=None)
    p.add_argument("--target-records", dest="target_records", type=int, default=None)
    p.add_argument("--bias", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--annotator-seed", dest="annotator_seed", type=int, default=None)

    p = sub.add_parser("verify", help="verify transcript chains against a program")
    common(p)
    p.add_argument("--program", default=None, help="rule-base file applied to all transcripts")
    p.add_argument("--instances", default=None, help="task dataset for per-instance lookup")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=None)

    p = sub.add_parser("serve", help="start the annotation service")
    common(p)
    p.add_argument("--pairs", required=True, help="pair queue file")
    p.add_argument("--store", required=True, help="preference store to append labels to")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--display-seed", dest="display_seed", type=int, default=None)

    return parser


_HANDLERS = {
    "gen-data": cmd_gen_data,
    "train-reward": cmd_train_reward,
    "train-policy": cmd_train_policy,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "verify": cmd_verify,
    "serve": cmd_serve,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = parse_config_file(args.config) if getattr(args, "config", None) else {}
        return _HANDLERS[args.command](args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError, OSError, ParseError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
