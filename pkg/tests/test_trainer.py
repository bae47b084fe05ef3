import json

import numpy as np
import pytest

import logicrl.trainer as trainer_module
from logicrl.engine import ENTAILED, NOT_ENTAILED
from logicrl.logic_feedback import LogicRewardConfig
from logicrl.policy import (
    FEATURE_DIM,
    FEATURE_NAMES,
    InstanceContext,
    PolicyParams,
    Response,
    State,
    answer_action,
    sample_response,
)
from logicrl.preference import AnnotatorConfig, PreferenceRecord
from logicrl.reward_model import EmptyDataset, RewardParams, TrainHyper, segment_return
from logicrl.trainer import (
    BATCH_MEAN,
    DATASET_MIX,
    NO_BASELINE,
    REWARD_BLEND,
    BlendConfig,
    MismatchedBatch,
    TrainConfig,
    blended_reward,
    evaluate_policy,
    mix_preference_datasets,
    reinforce_update,
    train_policy,
)
from logicrl.taskgen import GenConfig, TaskInstance, generate_dataset, generate_instance
from logicrl.engine import parse_program, parse_query


def _records(source: str, n: int) -> list[PreferenceRecord]:
    return [PreferenceRecord(f"{source}{i}", (1.0, 0.0), source) for i in range(n)]


def test_mix_lambda_zero_only_human():
    mixed = mix_preference_datasets(_records("human", 30), _records("logic_teacher", 30), 0.0, 20, 1)
    assert len(mixed) == 20
    assert all(r.source == "human" for r in mixed)


def test_mix_lambda_one_only_logic():
    mixed = mix_preference_datasets(_records("human", 30), _records("logic_teacher", 30), 1.0, 20, 1)
    assert all(r.source == "logic_teacher" for r in mixed)


def test_mix_half_exact_counts():
    mixed = mix_preference_datasets(_records("h", 200), _records("l", 200), 0.5, 100, 3)
    assert len(mixed) == 100
    assert sum(1 for r in mixed if r.source == "l") == 50
    assert sum(1 for r in mixed if r.source == "h") == 50


def test_mix_with_replacement_when_short():
    mixed = mix_preference_datasets(_records("h", 3), _records("l", 2), 0.5, 40, 5)
    assert len(mixed) == 40


def test_mix_deterministic():
    a = mix_preference_datasets(_records("h", 50), _records("l", 50), 0.3, 30, 7)
    b = mix_preference_datasets(_records("h", 50), _records("l", 50), 0.3, 30, 7)
    assert [r.pair_id for r in a] == [r.pair_id for r in b]


def test_mix_empty_sources_error():
    with pytest.raises(EmptyDataset):
        mix_preference_datasets([], [], 0.5, 10, 0)
    with pytest.raises(EmptyDataset):
        mix_preference_datasets(_records("h", 5), [], 0.5, 10, 0)


@pytest.fixture(scope="module")
def instance():
    return generate_instance(GenConfig(), 42)


def test_blended_reward_boundaries(instance):
    params = RewardParams(np.random.default_rng(0).normal(size=FEATURE_DIM) * 0.3)
    response = sample_response(PolicyParams.zeros(), instance, 5)
    config = LogicRewardConfig()
    from logicrl.logic_feedback import response_logic_reward
    from logicrl.reward_model import _sigmoid

    at_one = blended_reward(params, config, response, instance, 1.0)
    assert at_one == pytest.approx(response_logic_reward(response, instance, config))
    at_zero = blended_reward(params, config, response, instance, 0.0)
    squashed = float(_sigmoid(np.asarray(segment_return(params, response, instance))))
    assert at_zero == pytest.approx(squashed)


def test_blended_reward_hand_value(instance):
    # squashed 0.8, logic 0.4, lambda 0.5 -> 0.6 (checked at the formula level)
    assert 0.5 * 0.8 + 0.5 * 0.4 == pytest.approx(0.6)


def test_reinforce_equal_rewards_identity(instance):
    params = PolicyParams(np.random.default_rng(1).normal(size=FEATURE_DIM) * 0.2)
    responses = [sample_response(params, instance, s) for s in range(4)]
    updated = reinforce_update(
        params, responses, [0.7] * 4, BATCH_MEAN, 0.5, {instance.id: instance}
    )
    assert np.allclose(updated.weights, params.weights)


def test_reinforce_matches_surrogate_finite_differences(instance):
    from logicrl.policy import response_log_prob

    rng = np.random.default_rng(2)
    params = PolicyParams(rng.normal(size=FEATURE_DIM) * 0.3)
    responses = [sample_response(params, instance, 100 + s) for s in range(3)]
    rewards = [0.9, 0.1, 0.5]
    b = float(np.mean(rewards))
    lr = 0.25
    updated = reinforce_update(
        params, responses, rewards, BATCH_MEAN, lr, {instance.id: instance}
    )
    direction = (updated.weights - params.weights) / lr

    def surrogate(weights: np.ndarray) -> float:
        p = PolicyParams(weights)
        return sum(
            (r - b) * response_log_prob(p, resp, instance)
            for resp, r in zip(responses, rewards)
        )

    eps = 1e-6
    for i in rng.choice(FEATURE_DIM, size=8, replace=False):
        up = params.weights.copy()
        up[i] += eps
        down = params.weights.copy()
        down[i] -= eps
        fd = (surrogate(up) - surrogate(down)) / (2 * eps)
        assert abs(direction[i] - fd) <= 1e-5 * max(1.0, abs(fd) + abs(direction[i]))


def test_reinforce_mismatched_batch(instance):
    params = PolicyParams.zeros()
    responses = [sample_response(params, instance, 1)]
    with pytest.raises(MismatchedBatch):
        reinforce_update(params, responses, [1.0, 2.0], BATCH_MEAN, 0.1, {instance.id: instance})
    with pytest.raises(MismatchedBatch):
        reinforce_update(params, [], [], BATCH_MEAN, 0.1, {instance.id: instance})


def test_two_armed_bandit_converges():
    # single-state bandit: answering entailed pays 1, not_entailed pays 0
    program = parse_program("goal.")
    bandit = TaskInstance("bandit", program, parse_query("goal"), ENTAILED, {})
    ctx = InstanceContext(bandit, max_steps=1)
    params = PolicyParams.zeros()
    from logicrl.seeds import derive_seed

    for update in range(2000):
        responses = [
            sample_response(params, bandit, derive_seed(7, f"{update}:{k}"), 1, ctx)
            for k in range(4)
        ]
        rewards = [1.0 if r.answer == ENTAILED else 0.0 for r in responses]
        params = reinforce_update(
            params, responses, rewards, BATCH_MEAN, 0.2, {bandit.id: bandit}, {bandit.id: ctx}
        )
    state = State(bandit.id, (bandit.query,), 0)
    from logicrl.policy import action_probabilities

    probs = action_probabilities(params, state, ctx.candidates(True), bandit, max_steps=1)
    assert probs[0] >= 0.95  # candidates(True) = [entailed, not_entailed]


@pytest.fixture(scope="module")
def small_sets():
    train = generate_dataset(GenConfig(), 16, 100)
    evals = generate_dataset(GenConfig(), 30, 200)
    return train, evals


def _small_config(seed=3, iterations=6):
    return TrainConfig(
        iterations=iterations,
        rollouts_per_iter=16,
        eval_every=3,
        seed=seed,
        reward_hyper=TrainHyper(epochs=8),
        pairs_per_iter=8,
        target_records=64,
        max_steps=8,
    )


def test_lambda_zero_matches_baseline_exactly(small_sets):
    train, evals = small_sets
    annotator = AnnotatorConfig(bias=0.4, noise=0.1, seed=5)
    base = train_policy(train, evals, _small_config(), None, annotator)
    mix0 = train_policy(train, evals, _small_config(), BlendConfig(0.0, DATASET_MIX), annotator)
    assert json.dumps(base.series, sort_keys=True) == json.dumps(mix0.series, sort_keys=True)
    assert np.array_equal(base.final_policy.weights, mix0.final_policy.weights)


def test_training_reproducible(small_sets):
    train, evals = small_sets
    annotator = AnnotatorConfig(bias=0.8, noise=0.05, seed=9)
    blend = BlendConfig(0.5, DATASET_MIX)
    a = train_policy(train, evals, _small_config(), blend, annotator)
    b = train_policy(train, evals, _small_config(), blend, annotator)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)


def test_reward_blend_mode_runs(small_sets):
    train, evals = small_sets
    annotator = AnnotatorConfig(bias=0.5, noise=0.0, seed=2)
    report = train_policy(train, evals, _small_config(), BlendConfig(0.5, REWARD_BLEND), annotator)
    assert len(report.series["mean_predicted_reward"]) == 6


def test_series_lengths_match_iterations(small_sets):
    train, evals = small_sets
    report = train_policy(
        train, evals, _small_config(), None, AnnotatorConfig(bias=0.2, noise=0.0, seed=1)
    )
    for key, series in report.series.items():
        assert len(series) == 6, key
    # eval points only where scheduled, plus the final iteration
    acc = report.series["logical_accuracy"]
    assert acc[2] is not None and acc[5] is not None
    assert acc[0] is None and acc[1] is None


def test_metrics_bounded(small_sets):
    train, evals = small_sets
    report = train_policy(
        train, evals, _small_config(seed=8), None, AnnotatorConfig(bias=0.9, noise=0.2, seed=3)
    )
    for key in ("mean_logic_reward", "simulated_satisfaction"):
        assert all(0.0 <= v <= 1.0 for v in report.series[key])
    assert all(v is None or 0.0 <= v <= 1.0 for v in report.series["logical_accuracy"])


def test_evaluate_policy_oracle_and_inverted(small_sets, monkeypatch):
    _, evals = small_sets
    annotator = AnnotatorConfig()

    def oracle_response(params, instance, max_steps=16, ctx=None):
        state = State(instance.id, (instance.query,), 0)
        return Response(instance.id, [(state, answer_action(instance.gold))], "", max_steps)

    monkeypatch.setattr(trainer_module, "greedy_response", oracle_response)
    metrics = evaluate_policy(PolicyParams.zeros(), evals, annotator)
    assert metrics.logical_accuracy == 1.0

    def inverted_response(params, instance, max_steps=16, ctx=None):
        wrong = NOT_ENTAILED if instance.gold == ENTAILED else ENTAILED
        state = State(instance.id, (instance.query,), 0)
        return Response(instance.id, [(state, answer_action(wrong))], "", max_steps)

    monkeypatch.setattr(trainer_module, "greedy_response", inverted_response)
    metrics = evaluate_policy(PolicyParams.zeros(), evals, annotator)
    assert metrics.logical_accuracy == 0.0


def test_always_entailed_policy_near_half_accuracy():
    evals = generate_dataset(GenConfig(), 200, 200)
    weights = np.zeros(FEATURE_DIM)
    weights[FEATURE_NAMES.index("kind_answer")] = 50.0
    weights[FEATURE_NAMES.index("empty_x_answer_entailed")] = 10.0
    weights[FEATURE_NAMES.index("stuck_x_answer_entailed")] = 10.0
    weights[FEATURE_NAMES.index("open_x_answer_entailed")] = 10.0
    metrics = evaluate_policy(PolicyParams(weights), evals, AnnotatorConfig())
    assert abs(metrics.logical_accuracy - 0.5) <= 0.05


def test_empty_sets_rejected(small_sets):
    train, evals = small_sets
    with pytest.raises(EmptyDataset):
        evaluate_policy(PolicyParams.zeros(), [], AnnotatorConfig())
    with pytest.raises(EmptyDataset):
        train_policy([], evals, _small_config(), None, AnnotatorConfig())


def test_no_baseline_differs_from_batch_mean(small_sets, instance):
    params = PolicyParams(np.random.default_rng(3).normal(size=FEATURE_DIM) * 0.2)
    responses = [sample_response(params, instance, s) for s in range(4)]
    rewards = [0.9, 0.2, 0.4, 0.6]
    with_baseline = reinforce_update(
        params, responses, rewards, BATCH_MEAN, 0.3, {instance.id: instance}
    )
    without = reinforce_update(
        params, responses, rewards, NO_BASELINE, 0.3, {instance.id: instance}
    )
    assert not np.allclose(with_baseline.weights, without.weights)


def test_metrics_csv_shape(small_sets):
    train, evals = small_sets
    report = train_policy(
        train, evals, _small_config(), None, AnnotatorConfig(bias=0.1, noise=0.0, seed=4)
    )
    csv = report.metrics_csv()
    lines = csv.strip().split("\n")
    assert lines[0].startswith("iteration,")
    assert len(lines) == 7  # header + 6 iterations
