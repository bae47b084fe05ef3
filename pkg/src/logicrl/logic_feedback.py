"""Logic-teacher feedback: chain verification turned into scalar rewards
and into deterministic preference labels.

The reward is a convex combination of answer correctness and chain-step
validity. A zero-step chain counts as vacuously valid only when its answer
is consistent: under the closed world a bare correct "not_entailed" needs
no derivation and earns the full reward, while a bare wrong claim earns
nothing. Unparseable segments earn the configured floor instead of
raising, so malformed output remains a trainable signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .engine import ChainReport, verify_chain
from .policy import InstanceContext, Response, response_to_chain
from .preference import LOGIC_TEACHER, PreferenceRecord, SegmentPair
from .taskgen import TaskInstance


class MissingInstance(KeyError):
    pass


@dataclass(frozen=True)
class LogicRewardConfig:
    w_answer: float = 0.5
    w_chain: float = 0.5
    parse_failure_reward: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.w_answer <= 1.0 or not 0.0 <= self.w_chain <= 1.0:
            raise ValueError("weights must be in [0, 1]")
        if abs(self.w_answer + self.w_chain - 1.0) > 1e-9:
            raise ValueError("w_answer + w_chain must equal 1")


def logic_reward(
    report: Optional[ChainReport],
    parse_ok: bool,
    config: LogicRewardConfig = LogicRewardConfig(),
) -> float:
    """Scalar teacher reward in [0, 1] for one verified chain."""
    if not parse_ok or report is None:
        return config.parse_failure_reward
    answer_term = 1.0 if report.answer_consistent else 0.0
    if report.total_steps == 0:
        # A zero-step chain is vacuously valid only when its claim holds: a
        # bare correct "not_entailed" needs no derivation under the closed
        # world, but a bare wrong claim earns nothing.
        chain_term = answer_term
    else:
        chain_term = report.valid_steps / report.total_steps
    return config.w_answer * answer_term + config.w_chain * chain_term


def response_logic_reward(
    response: Response,
    instance: TaskInstance,
    config: LogicRewardConfig = LogicRewardConfig(),
    ctx: Optional[InstanceContext] = None,
) -> float:
    """Convenience path: response -> chain -> verification -> reward."""
    ctx = ctx or InstanceContext(instance, response.max_steps)
    chain = response_to_chain(response, instance, ctx)
    report = verify_chain_cached(instance, chain, ctx)
    return logic_reward(report, parse_ok=True, config=config)


def verify_chain_cached(
    instance: TaskInstance,
    chain,
    ctx: Optional[InstanceContext] = None,
) -> ChainReport:
    """verify_chain backed by the instance's verdict cache."""
    ctx = ctx or InstanceContext(instance)

    def cached_solve(program, query, depth_limit):
        return ctx.verdict(query, depth_limit)

    return verify_chain(
        instance.program, ctx.query, chain, ctx.depth_limit, _solve=cached_solve
    )


def label_pair_by_logic(
    pair: SegmentPair,
    instance: TaskInstance,
    config: LogicRewardConfig = LogicRewardConfig(),
    ctx: Optional[InstanceContext] = None,
) -> PreferenceRecord:
    """Deterministic teacher label: higher logic reward wins, ties split."""
    ctx = ctx or InstanceContext(instance)
    r1 = response_logic_reward(pair.sigma1, instance, config, ctx)
    r2 = response_logic_reward(pair.sigma2, instance, config, ctx)
    if r1 > r2:
        mu = (1.0, 0.0)
    elif r1 < r2:
        mu = (0.0, 1.0)
    else:
        mu = (0.5, 0.5)
    return PreferenceRecord(pair_id=pair.pair_id, mu=mu, source=LOGIC_TEACHER)


def generate_logic_preference_dataset(
    pairs: Sequence[SegmentPair],
    instances: Mapping[str, TaskInstance],
    config: LogicRewardConfig = LogicRewardConfig(),
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> list[PreferenceRecord]:
    """Teacher labels for every pair, order-aligned with the input."""
    out: list[PreferenceRecord] = []
    for pair in pairs:
        instance = instances.get(pair.instance_ref)
        if instance is None:
            raise MissingInstance(
                f"pair {pair.pair_id} references unknown instance {pair.instance_ref}"
            )
        ctx = contexts.get(pair.instance_ref) if contexts else None
        out.append(label_pair_by_logic(pair, instance, config, ctx))
    return out
