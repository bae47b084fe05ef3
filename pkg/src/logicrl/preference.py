"""Pairwise preference records: sampling, simulated annotation, persistence.

A preference record stores the judged pair id, the preference distribution
mu over the two segments, and the judgment source. mu components always
sum to 1; single annotators only ever emit (1,0), (0,1), or (0.5,0.5).

The simulated annotator scores a segment as a bias-weighted blend of
quality (the logic reward of its chain) and appeal (brevity plus an
affirmative-answer bonus). The bias knob beta is the controlled failure
mode the training comparison studies: at beta 0 the annotator is an honest
judge, at beta 1 it only cares about looking good.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .engine import ENTAILED
from .policy import InstanceContext, Response
from .seeds import derive_seed
from .taskgen import TaskInstance

HUMAN = "human"
SIMULATED = "simulated"
LOGIC_TEACHER = "logic_teacher"

SIGMA1 = "sigma1"
SIGMA2 = "sigma2"
TIE = "tie"


class InsufficientResponses(Exception):
    """A response group is too small to sample the requested pairs."""


class UnknownPair(KeyError):
    pass


class DuplicateLabel(Exception):
    pass


@dataclass(frozen=True)
class AnnotatorConfig:
    bias: float = 0.0
    noise: float = 0.0
    seed: int = 0
    appeal_brevity: float = 0.6
    appeal_affirmative: float = 0.4

    def __post_init__(self) -> None:
        if not 0.0 <= self.bias <= 1.0:
            raise ValueError("bias must be in [0, 1]")
        if not 0.0 <= self.noise <= 0.5:
            raise ValueError("noise must be in [0, 0.5]")


@dataclass
class SegmentPair:
    pair_id: str
    sigma1: Response
    sigma2: Response
    instance_ref: str

    def __post_init__(self) -> None:
        if self.sigma1.instance_ref != self.sigma2.instance_ref:
            raise ValueError("both segments must reference the same instance")


@dataclass
class PreferenceRecord:
    pair_id: str
    mu: tuple[float, float]
    source: str
    annotator_config: Optional[dict] = None
    timestamp: Optional[str] = None

    def __post_init__(self) -> None:
        m1, m2 = self.mu
        if m1 < 0 or m2 < 0 or abs(m1 + m2 - 1.0) > 1e-9:
            raise ValueError("mu components must be non-negative and sum to 1")

    def to_json(self) -> dict:
        obj: dict = {"pair_id": self.pair_id, "mu": list(self.mu), "source": self.source}
        if self.annotator_config is not None:
            obj["annotator_config"] = self.annotator_config
        if self.timestamp is not None:
            obj["timestamp"] = self.timestamp
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "PreferenceRecord":
        return cls(
            pair_id=obj["pair_id"],
            mu=(float(obj["mu"][0]), float(obj["mu"][1])),
            source=obj["source"],
            annotator_config=obj.get("annotator_config"),
            timestamp=obj.get("timestamp"),
        )


def sample_pairs(
    groups: Mapping[str, Sequence[Response]],
    n_pairs: int,
    seed: int,
) -> list[SegmentPair]:
    """Sample distinct unordered within-instance pairs, uniformly.

    `groups` maps instance id to that instance's responses. The universe is
    every unordered index pair within a group; n_pairs of them are drawn
    without replacement.
    """
    universe: list[tuple[str, int, int]] = []
    for instance_id in groups:
        members = groups[instance_id]
        if len(members) < 2:
            raise InsufficientResponses(
                f"instance {instance_id} has {len(members)} responses; need >= 2"
            )
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                universe.append((instance_id, i, j))
    if n_pairs > len(universe):
        raise InsufficientResponses(
            f"requested {n_pairs} pairs but only {len(universe)} distinct pairs exist"
        )
    rng = random.Random(seed)
    chosen = rng.sample(universe, n_pairs)
    pairs = []
    for instance_id, i, j in chosen:
        pair_id = f"p{derive_seed(seed, f'{instance_id}:{i}:{j}'):012x}"
        pairs.append(SegmentPair(pair_id, groups[instance_id][i], groups[instance_id][j], instance_id))
    return pairs


def appeal_score(response: Response, config: AnnotatorConfig) -> float:
    """Brevity plus affirmative-answer bonus, in [0, 1]."""
    brevity = 1.0 - len(response) / max(response.max_steps, 1)
    affirmative = 1.0 if response.answer == ENTAILED else 0.0
    return config.appeal_brevity * brevity + config.appeal_affirmative * affirmative


def quality_score(
    response: Response,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> float:
    """Correctness of the segment per the logic teacher, in [0, 1]."""
    from .logic_feedback import LogicRewardConfig, response_logic_reward

    return response_logic_reward(response, instance, LogicRewardConfig(), ctx)


def simulate_annotation(
    pair: SegmentPair,
    config: AnnotatorConfig,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> PreferenceRecord:
    """One simulated human judgment; deterministic in (config.seed, pair_id)."""
    scores = []
    for sigma in (pair.sigma1, pair.sigma2):
        q = quality_score(sigma, instance, ctx)
        a = appeal_score(sigma, config)
        scores.append((1.0 - config.bias) * q + config.bias * a)
    if scores[0] > scores[1]:
        mu = (1.0, 0.0)
    elif scores[0] < scores[1]:
        mu = (0.0, 1.0)
    else:
        mu = (0.5, 0.5)
    rng = random.Random(derive_seed(config.seed, pair.pair_id))
    if rng.random() < config.noise:
        mu = (mu[1], mu[0])
    return PreferenceRecord(
        pair_id=pair.pair_id,
        mu=mu,
        source=SIMULATED,
        annotator_config={"bias": config.bias, "noise": config.noise, "seed": config.seed},
    )


def ingest_human_label(
    pair_id: str,
    choice: str,
    pending: Mapping[str, SegmentPair],
    labeled: set[str],
    timestamp: Optional[str] = None,
) -> PreferenceRecord:
    """Turn a human choice into a record; rejects unknown and repeat labels."""
    if pair_id not in pending:
        raise UnknownPair(pair_id)
    if pair_id in labeled:
        raise DuplicateLabel(pair_id)
    if choice == SIGMA1:
        mu = (1.0, 0.0)
    elif choice == SIGMA2:
        mu = (0.0, 1.0)
    elif choice == TIE:
        mu = (0.5, 0.5)
    else:
        raise ValueError(f"choice must be one of {SIGMA1}, {SIGMA2}, {TIE}")
    return PreferenceRecord(pair_id=pair_id, mu=mu, source=HUMAN, timestamp=timestamp)


def append_records(store_path: str | Path, records: Iterable[PreferenceRecord]) -> int:
    """Append records to the line-delimited store; returns the count written."""
    path = Path(store_path)
    count = 0
    with path.open("a", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
            count += 1
    return count


def load_records(store_path: str | Path) -> list[PreferenceRecord]:
    """All records in append order."""
    out: list[PreferenceRecord] = []
    with Path(store_path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(PreferenceRecord.from_json(json.loads(line)))
    return out
