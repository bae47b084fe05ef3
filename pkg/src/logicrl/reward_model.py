"""Bradley-Terry reward predictor over segment step features.

A segment's return is the sum of per-step rewards, each linear in the
shared feature map. The preferred-segment probability is the logistic
function of the return difference, and training minimizes the standard
negative log-likelihood of the observed preference distributions (plus an
optional l2 penalty). The raw likelihood-style objective, which rises
rather than falls as predictions improve and is therefore useless as a
minimization target, is kept behind a debug helper for inspection.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .policy import FEATURE_DIM, InstanceContext, Response
from .preference import SegmentPair
from .taskgen import TaskInstance

Record = tuple[SegmentPair, tuple[float, float]]


class EmptyDataset(Exception):
    pass


class DivergenceDetected(Exception):
    pass


@dataclass
class RewardParams:
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (FEATURE_DIM,):
            raise ValueError(f"weights must have shape ({FEATURE_DIM},)")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @staticmethod
    def zeros() -> "RewardParams":
        return RewardParams(np.zeros(FEATURE_DIM))


@dataclass(frozen=True)
class TrainHyper:
    learning_rate: float = 0.2
    epochs: int = 40
    batch_size: int = 64
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


def _context_for(
    instance: TaskInstance,
    contexts: Optional[Mapping[str, InstanceContext]],
) -> InstanceContext:
    if contexts is not None and instance.id in contexts:
        return contexts[instance.id]
    return InstanceContext(instance)


def segment_return(
    params: RewardParams,
    sigma: Response,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> float:
    """Sum over steps of weights . featurize(state, action)."""
    ctx = ctx or InstanceContext(instance, sigma.max_steps)
    return float(ctx.segment_features(sigma) @ params.weights)


def preference_probability(
    params: RewardParams,
    pair: SegmentPair,
    instance: TaskInstance,
    ctx: Optional[InstanceContext] = None,
) -> float:
    """P[sigma1 preferred over sigma2], overflow-free."""
    r1 = segment_return(params, pair.sigma1, instance, ctx)
    r2 = segment_return(params, pair.sigma2, instance, ctx)
    return float(_sigmoid(np.asarray(r1 - r2)))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    # log(sigma(x)) = -log(1 + exp(-x)), stable on both tails
    return -np.logaddexp(0.0, -x)


class _Design:
    """Featurized records: per-record segment-feature difference and mu."""

    def __init__(
        self,
        records: Sequence[Record],
        instances: Mapping[str, TaskInstance],
        contexts: Optional[Mapping[str, InstanceContext]] = None,
    ):
        if not records:
            raise EmptyDataset("no preference records")
        diffs = []
        mu1 = []
        for pair, mu in records:
            instance = instances[pair.instance_ref]
            ctx = _context_for(instance, contexts)
            f1 = ctx.segment_features(pair.sigma1)
            f2 = ctx.segment_features(pair.sigma2)
            diffs.append(f1 - f2)
            mu1.append(mu[0])
        self.diff = np.stack(diffs)  # (n, D): Phi(sigma1) - Phi(sigma2)
        self.mu1 = np.asarray(mu1)

    def loss(self, weights: np.ndarray, l2: float, idx: Optional[np.ndarray] = None) -> float:
        diff = self.diff if idx is None else self.diff[idx]
        mu1 = self.mu1 if idx is None else self.mu1[idx]
        with np.errstate(over="ignore", invalid="ignore"):
            d = diff @ weights
            nll = -(mu1 * _log_sigmoid(d) + (1.0 - mu1) * _log_sigmoid(-d)).sum()
            return float(nll + l2 * weights @ weights)

    def gradient(self, weights: np.ndarray, l2: float, idx: Optional[np.ndarray] = None) -> np.ndarray:
        diff = self.diff if idx is None else self.diff[idx]
        mu1 = self.mu1 if idx is None else self.mu1[idx]
        p1 = _sigmoid(diff @ weights)
        return (p1 - mu1) @ diff + 2.0 * l2 * weights


def bt_loss(
    params: RewardParams,
    records: Sequence[Record],
    instances: Mapping[str, TaskInstance],
    l2: float = 0.0,
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> float:
    """Negative log-likelihood of the preferences plus l2 penalty."""
    return _Design(records, instances, contexts).loss(params.weights, l2)


def bt_loss_gradient(
    params: RewardParams,
    records: Sequence[Record],
    instances: Mapping[str, TaskInstance],
    l2: float = 0.0,
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> np.ndarray:
    """Exact derivative of bt_loss in the weights."""
    return _Design(records, instances, contexts).gradient(params.weights, l2)


def bt_literal_objective(
    params: RewardParams,
    records: Sequence[Record],
    instances: Mapping[str, TaskInstance],
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> float:
    """Debug only: sum of mu-weighted raw preference probabilities.

    This is the likelihood-style quantity without logarithm or negation;
    minimizing it would reward being wrong, so nothing trains on it.
    """
    design = _Design(records, instances, contexts)
    d = design.diff @ params.weights
    p1 = _sigmoid(d)
    return float((design.mu1 * p1 + (1.0 - design.mu1) * (1.0 - p1)).sum())


@dataclass
class RewardTrainResult:
    params: RewardParams
    loss_trace: list[float] = field(default_factory=list)


def train_reward_model(
    records: Sequence[Record],
    hyper: TrainHyper,
    instances: Mapping[str, TaskInstance],
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> RewardTrainResult:
    """Mini-batch gradient descent from zero init, seeded shuffling.

    The loss trace holds the full-dataset loss after each epoch.
    """
    design = _Design(records, instances, contexts)
    n = len(design.mu1)
    weights = np.zeros(FEATURE_DIM)
    rng = random.Random(hyper.seed)
    trace: list[float] = []
    order = list(range(n))
    for _ in range(hyper.epochs):
        rng.shuffle(order)
        for start in range(0, n, hyper.batch_size):
            idx = np.asarray(order[start : start + hyper.batch_size])
            # mean-scaled batch gradient so the step size is batch-size free
            step = design.gradient(weights, 0.0, idx) / len(idx) + 2.0 * hyper.l2 * weights
            weights = weights - hyper.learning_rate * step
        epoch_loss = design.loss(weights, hyper.l2)
        if not np.isfinite(epoch_loss):
            raise DivergenceDetected(f"loss became {epoch_loss} during training")
        trace.append(epoch_loss)
    return RewardTrainResult(RewardParams(weights), trace)


def pairwise_accuracy(
    params: RewardParams,
    records: Sequence[Record],
    instances: Mapping[str, TaskInstance],
    contexts: Optional[Mapping[str, InstanceContext]] = None,
) -> float:
    """Fraction of strict records whose higher return matches the label.

    Ties in mu are excluded from the denominator; ties in the predicted
    returns count as predicting sigma1.
    """
    strict = [(pair, mu) for pair, mu in records if mu[0] != mu[1]]
    if not strict:
        raise EmptyDataset("no strict preference records")
    design = _Design(strict, instances, contexts)
    d = design.diff @ params.weights
    predicted_sigma1 = d >= 0.0
    label_sigma1 = design.mu1 > 0.5
    return float((predicted_sigma1 == label_sigma1).mean())


def save_checkpoint(
    path: str | Path,
    result: RewardTrainResult,
    hyper: TrainHyper,
) -> None:
    payload = {
        "weights": [float(w) for w in result.params.weights],
        "feature_dim": FEATURE_DIM,
        "hyper": {
            "learning_rate": hyper.learning_rate,
            "epochs": hyper.epochs,
            "batch_size": hyper.batch_size,
            "l2": hyper.l2,
            "seed": hyper.seed,
        },
        "loss_trace": [float(x) for x in result.loss_trace],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_checkpoint(path: str | Path) -> tuple[RewardParams, dict]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("feature_dim") != FEATURE_DIM:
        raise ValueError(
            f"checkpoint feature_dim {obj.get('feature_dim')} does not match {FEATURE_DIM}"
        )
    return RewardParams(np.asarray(obj["weights"], dtype=float)), obj
