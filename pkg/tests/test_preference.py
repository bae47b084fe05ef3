import numpy as np
import pytest

from logicrl.engine import ENTAILED, NOT_ENTAILED
from logicrl.policy import (
    FEATURE_DIM,
    PolicyParams,
    Response,
    State,
    answer_action,
    sample_response,
)
from logicrl.preference import (
    HUMAN,
    SIGMA1,
    SIGMA2,
    TIE,
    AnnotatorConfig,
    DuplicateLabel,
    InsufficientResponses,
    PreferenceRecord,
    SegmentPair,
    UnknownPair,
    append_records,
    appeal_score,
    ingest_human_label,
    load_records,
    sample_pairs,
    simulate_annotation,
)
from logicrl.taskgen import GenConfig, generate_instance


@pytest.fixture(scope="module")
def instance():
    return generate_instance(GenConfig(), 42)


def _responses(instance, n, seed0=0):
    params = PolicyParams.zeros()
    return [sample_response(params, instance, seed0 + i) for i in range(n)]


def _bare(instance, answer):
    state = State(instance.id, (instance.query,), 0)
    return Response(instance.id, [(state, answer_action(answer))], "", 16)


def test_sample_pairs_forced_choice(instance):
    groups = {instance.id: _responses(instance, 2)}
    pairs = sample_pairs(groups, 1, 0)
    assert len(pairs) == 1
    assert pairs[0].instance_ref == instance.id


def test_sample_pairs_deterministic(instance):
    groups = {instance.id: _responses(instance, 5)}
    a = sample_pairs(groups, 6, 99)
    b = sample_pairs(groups, 6, 99)
    assert [p.pair_id for p in a] == [p.pair_id for p in b]


def test_sample_pairs_exhausts_universe(instance):
    groups = {instance.id: _responses(instance, 5)}
    pairs = sample_pairs(groups, 10, 3)
    assert len({p.pair_id for p in pairs}) == 10  # all C(5,2) pairs


def test_sample_pairs_too_small_group(instance):
    with pytest.raises(InsufficientResponses):
        sample_pairs({instance.id: _responses(instance, 1)}, 1, 0)
    with pytest.raises(InsufficientResponses):
        sample_pairs({instance.id: _responses(instance, 3)}, 4, 0)


def test_pure_quality_annotator_prefers_correct(instance):
    good = _bare(instance, instance.gold)
    wrong = _bare(instance, ENTAILED if instance.gold == NOT_ENTAILED else NOT_ENTAILED)
    pair = SegmentPair("pq1", good, wrong, instance.id)
    record = simulate_annotation(pair, AnnotatorConfig(bias=0.0, noise=0.0, seed=1), instance)
    assert record.mu == (1.0, 0.0)
    assert record.source == "simulated"


def test_pure_appeal_annotator_prefers_short_affirmative(instance):
    # sigma1: longer, not_entailed; sigma2: one-step entailed
    params = PolicyParams(np.zeros(FEATURE_DIM))
    long_ne = None
    for seed in range(200):
        r = sample_response(params, instance, seed)
        if len(r) >= 3 and r.answer == NOT_ENTAILED:
            long_ne = r
            break
    assert long_ne is not None
    short_e = _bare(instance, ENTAILED)
    pair = SegmentPair("pa1", long_ne, short_e, instance.id)
    record = simulate_annotation(pair, AnnotatorConfig(bias=1.0, noise=0.0, seed=1), instance)
    assert record.mu == (0.0, 1.0)


def test_annotation_deterministic_given_seed(instance):
    responses = _responses(instance, 4)
    pair = SegmentPair("pd1", responses[0], responses[1], instance.id)
    config = AnnotatorConfig(bias=0.5, noise=0.1, seed=123)
    first = simulate_annotation(pair, config, instance)
    for _ in range(5):
        assert simulate_annotation(pair, config, instance).mu == first.mu


def test_identical_segments_tie(instance):
    r = _responses(instance, 1)[0]
    pair = SegmentPair("pt1", r, r, instance.id)
    record = simulate_annotation(pair, AnnotatorConfig(bias=0.3, noise=0.0, seed=0), instance)
    assert record.mu == (0.5, 0.5)


def test_appeal_score_range(instance):
    config = AnnotatorConfig()
    for r in _responses(instance, 10):
        assert 0.0 <= appeal_score(r, config) <= 1.0


def test_ingest_human_label_choices(instance):
    responses = _responses(instance, 2)
    pending = {"x1": SegmentPair("x1", responses[0], responses[1], instance.id)}
    labeled: set[str] = set()
    rec = ingest_human_label("x1", SIGMA1, pending, labeled)
    assert rec.mu == (1.0, 0.0) and rec.source == HUMAN
    rec = ingest_human_label("x1", TIE, pending, labeled)
    assert rec.mu == (0.5, 0.5)
    rec = ingest_human_label("x1", SIGMA2, pending, labeled)
    assert rec.mu == (0.0, 1.0)


def test_ingest_unknown_and_duplicate(instance):
    responses = _responses(instance, 2)
    pending = {"x1": SegmentPair("x1", responses[0], responses[1], instance.id)}
    with pytest.raises(UnknownPair):
        ingest_human_label("nope", SIGMA1, pending, set())
    with pytest.raises(DuplicateLabel):
        ingest_human_label("x1", SIGMA1, pending, {"x1"})


def test_mu_validation():
    with pytest.raises(ValueError):
        PreferenceRecord("p", (0.7, 0.7), HUMAN)
    with pytest.raises(ValueError):
        PreferenceRecord("p", (-0.5, 1.5), HUMAN)


def test_store_round_trip(tmp_path):
    store = tmp_path / "prefs.jsonl"
    records = [
        PreferenceRecord("a", (1.0, 0.0), HUMAN),
        PreferenceRecord("b", (0.5, 0.5), "logic_teacher"),
        PreferenceRecord("c", (0.0, 1.0), "simulated", annotator_config={"bias": 0.2}),
    ]
    assert append_records(store, records) == 3
    loaded = load_records(store)
    assert [r.to_json() for r in loaded] == [r.to_json() for r in records]


def test_store_appends_accumulate(tmp_path):
    store = tmp_path / "prefs.jsonl"
    append_records(store, [PreferenceRecord("a", (1.0, 0.0), HUMAN)] * 2)
    append_records(store, [PreferenceRecord("b", (0.0, 1.0), HUMAN)] * 3)
    assert len(load_records(store)) == 5


def test_mu_always_sums_to_one(instance):
    responses = _responses(instance, 6)
    groups = {instance.id: responses}
    pairs = sample_pairs(groups, 8, 5)
    config = AnnotatorConfig(bias=0.7, noise=0.2, seed=4)
    for pair in pairs:
        record = simulate_annotation(pair, config, instance)
        assert abs(sum(record.mu) - 1.0) < 1e-12


def test_quality_preferred_when_unbiased(instance):
    # with bias 0 and noise 0 the preferred side always has weakly greater
    # logic reward
    from logicrl.preference import quality_score

    responses = _responses(instance, 6)
    pairs = sample_pairs({instance.id: responses}, 10, 8)
    config = AnnotatorConfig(bias=0.0, noise=0.0, seed=0)
    for pair in pairs:
        record = simulate_annotation(pair, config, instance)
        q1 = quality_score(pair.sigma1, instance)
        q2 = quality_score(pair.sigma2, instance)
        if record.mu == (1.0, 0.0):
            assert q1 >= q2
        elif record.mu == (0.0, 1.0):
            assert q2 >= q1
        else:
            assert q1 == q2
