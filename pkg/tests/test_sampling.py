import pytest

from texrel.concepts import (
    ColorsHypothesis,
    GridScene,
    ObjectSpec,
    PlacedObject,
    Preposition,
    RelationHypothesis,
    TaskType,
    TextureColorsHypothesis,
    hypothesis_from_tuple,
    meaning_distance,
    tuple_of,
)
from texrel.rng import Stream, mix
from texrel.sampling import (
    SPLITS,
    SamplingError,
    SplitKind,
    TaskSpec,
    add_distractors,
    evaluate_scene,
    instantiate_positive,
    make_holdout_partition,
    make_tight_negative,
    sample_hypothesis,
)

SEED = 321


def spec_of(task, arity=2, **kw):
    return TaskSpec(task=task, arity=arity, **kw)


ALL_SPECS = [
    spec_of(TaskType.COL, 1),
    spec_of(TaskType.COL, 3),
    spec_of(TaskType.TEX, 2),
    spec_of(TaskType.TEXCOL, 1),
    spec_of(TaskType.TEXCOL, 3),
    spec_of(TaskType.REL, 2),
]


def test_holdout_partition_contract():
    spec = spec_of(TaskType.COL)
    part = make_holdout_partition(spec, 2, SEED)
    assert len(part.holdout_items) == 2
    assert len(part.train_items) == 7
    assert not set(part.train_items) & set(part.holdout_items)
    assert part == make_holdout_partition(spec, 2, SEED)
    assert part != make_holdout_partition(spec, 2, SEED + 1)


def test_holdout_partition_range_errors():
    spec = spec_of(TaskType.COL)
    with pytest.raises(SamplingError):
        make_holdout_partition(spec, 9, SEED)
    with pytest.raises(SamplingError):
        make_holdout_partition(spec, 0, SEED)


def test_holdout_pairs_kind():
    part = make_holdout_partition(spec_of(TaskType.REL), 2, SEED)
    assert part.kind == "pairs"
    assert len(part.train_items) == 79
    assert all(isinstance(i, tuple) for i in part.holdout_items)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.task.short_name}{s.arity}")
@pytest.mark.parametrize("split", [SplitKind.TRAIN, SplitKind.TEST_NEW])
def test_sample_hypothesis_split_rules(spec, split):
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, split.value))
    train_set = set(part.train_items)
    for _ in range(200):
        h = sample_hypothesis(spec, part, split, stream)
        if isinstance(h, ColorsHypothesis):
            items = list(h.colors)
        elif isinstance(h, RelationHypothesis):
            items = [
                (h.first.color, h.first.texture),
                (h.second.color, h.second.texture),
            ]
        elif isinstance(h, TextureColorsHypothesis):
            items = [(p.color, p.texture) for p in h.pairs]
        else:
            items = list(h.textures)
        if split.uses_holdout:
            assert any(part.is_holdout(i) for i in items)
        else:
            assert all(i in train_set for i in items)


def test_col1_train_census():
    """10k draws see every train color and never a holdout color."""
    spec = spec_of(TaskType.COL, 1)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 17))
    seen = set()
    for _ in range(10_000):
        h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
        seen.add(h.colors[0])
    assert seen == set(part.train_items)


def test_instantiate_positive_satisfies_hypothesis():
    stream = Stream(mix(SEED, 5))
    for spec in ALL_SPECS:
        part = make_holdout_partition(spec, 2, SEED)
        for _ in range(200):
            h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
            scene = instantiate_positive(h, spec, stream)
            assert evaluate_scene(h, scene)
            assert len(scene.objects) == spec.num_objects


def test_instantiate_rel_geometry():
    spec = spec_of(TaskType.REL)
    stream = Stream(mix(SEED, 6))
    above = RelationHypothesis(ObjectSpec(0, 0), Preposition.ABOVE, ObjectSpec(1, 1))
    right = RelationHypothesis(ObjectSpec(0, 0), Preposition.RIGHT_OF, ObjectSpec(1, 1))
    for _ in range(100):
        scene = instantiate_positive(above, spec, stream)
        a, b = scene.objects
        assert a.col == b.col and a.row < b.row
        scene = instantiate_positive(right, spec, stream)
        a, b = scene.objects
        assert a.row == b.row and a.col > b.col


def test_colors_instantiation_example():
    spec = spec_of(TaskType.COL, 2)
    stream = Stream(mix(SEED, 7))
    h = ColorsHypothesis((1, 5))
    scene = instantiate_positive(h, spec, stream)
    assert {o.spec.color for o in scene.objects} == {1, 5}


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.task.short_name}{s.arity}")
@pytest.mark.parametrize("split", list(SPLITS), ids=lambda s: s.label)
def test_tight_negative_distance_exactly_one(spec, split):
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 8, split.value))
    for _ in range(100):
        h = sample_hypothesis(spec, part, split, stream)
        neg, idx = make_tight_negative(h, spec, part, split, stream)
        base = tuple_of(h)
        assert meaning_distance(base, neg) == 1
        assert base.values[idx] != neg.values[idx]
        assert 0 <= idx < len(base.values)


def test_negative_scene_is_false_and_tight():
    stream = Stream(mix(SEED, 9))
    for spec in ALL_SPECS:
        part = make_holdout_partition(spec, 2, SEED)
        for _ in range(300):
            h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
            neg, _ = make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)
            scene = instantiate_positive(hypothesis_from_tuple(neg), spec, stream)
            assert not evaluate_scene(h, scene)
            assert evaluate_scene(hypothesis_from_tuple(neg), scene)


def test_col3_negative_keeps_two_ground_truth_colors():
    spec = spec_of(TaskType.COL, 3)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 10))
    for _ in range(200):
        h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
        neg, _ = make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)
        assert len(set(neg.values) & set(h.colors)) == 2
        assert len(set(neg.values)) == 3


def test_texcol3_negative_preserves_five_of_six():
    spec = spec_of(TaskType.TEXCOL, 3)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 11))
    for _ in range(200):
        h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
        neg, idx = make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)
        base = tuple_of(h)
        same = sum(a == b for a, b in zip(base.values, neg.values))
        assert same == 5
        # the changed pair is a brand-new pair, so pair overlap is exactly 2
        h_pairs = set(h.pairs)
        neg_pairs = set(hypothesis_from_tuple(neg).pairs)
        assert len(h_pairs & neg_pairs) == 2


def test_rel_prep_flip():
    spec = spec_of(TaskType.REL)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 12))
    h = RelationHypothesis(ObjectSpec(0, 0), Preposition.ABOVE, ObjectSpec(1, 1))
    seen_prep_flip = False
    for _ in range(200):
        neg, idx = make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)
        if idx == 2:
            seen_prep_flip = True
            assert neg.values[2] == int(Preposition.RIGHT_OF)
    assert seen_prep_flip


def test_negative_needs_an_alternative():
    spec = TaskSpec(task=TaskType.COL, arity=2, num_colors=3, num_textures=2, grid_size=3)
    part = make_holdout_partition(spec, 1, SEED)
    # train pool has exactly 2 colors and the hypothesis uses both
    stream = Stream(mix(SEED, 13))
    h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
    with pytest.raises(SamplingError):
        make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)


def test_distractors_avoid_hypothesis_items():
    spec = spec_of(TaskType.COL, 2)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 14))
    h = ColorsHypothesis((1, 5))
    scene = instantiate_positive(h, spec, stream)
    with_d = add_distractors(scene, h, spec, part, SplitKind.TRAIN, 2, stream)
    assert len(with_d.objects) == 4
    for obj in with_d.objects[2:]:
        assert obj.spec.color not in (1, 5)


def test_distractor_pool_union_on_new_splits():
    spec = spec_of(TaskType.COL, 1)
    part = make_holdout_partition(spec, 3, SEED)
    stream = Stream(mix(SEED, 15))
    h = ColorsHypothesis((part.train_items[0],))
    seen = set()
    for _ in range(500):
        scene = instantiate_positive(h, spec, stream)
        with_d = add_distractors(scene, h, spec, part, SplitKind.TEST_NEW, 2, stream)
        seen.update(o.spec.color for o in with_d.objects[1:])
    assert set(part.holdout_items) <= seen


def test_distractors_count_zero_identity():
    spec = spec_of(TaskType.REL)
    part = make_holdout_partition(spec, 2, SEED)
    stream = Stream(mix(SEED, 16))
    h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
    scene = instantiate_positive(h, spec, stream)
    assert add_distractors(scene, h, spec, part, SplitKind.TRAIN, 0, stream) is scene


def test_distractor_neutrality():
    stream = Stream(mix(SEED, 17))
    for spec in ALL_SPECS:
        part = make_holdout_partition(spec, 2, SEED)
        for _ in range(100):
            h = sample_hypothesis(spec, part, SplitKind.TRAIN, stream)
            neg, _ = make_tight_negative(h, spec, part, SplitKind.TRAIN, stream)
            for base_h in (h, hypothesis_from_tuple(neg)):
                scene = instantiate_positive(base_h, spec, stream)
                verdict = evaluate_scene(h, scene)
                with_d = add_distractors(scene, h, spec, part, SplitKind.TRAIN, 2, stream)
                assert evaluate_scene(h, with_d) == verdict


def test_evaluate_scene_rel_semantics():
    h = RelationHypothesis(ObjectSpec(0, 0), Preposition.ABOVE, ObjectSpec(1, 1))
    a = PlacedObject(ObjectSpec(0, 0), 1, 2)
    b = PlacedObject(ObjectSpec(1, 1), 3, 3)
    assert not evaluate_scene(h, GridScene(5, (a, b)))  # columns differ
    b_same_col = PlacedObject(ObjectSpec(1, 1), 3, 2)
    assert evaluate_scene(h, GridScene(5, (a, b_same_col)))
    # right-of requires the first object strictly to the right, same row
    h2 = RelationHypothesis(ObjectSpec(0, 0), Preposition.RIGHT_OF, ObjectSpec(1, 1))
    p = PlacedObject(ObjectSpec(0, 0), 2, 4)
    q = PlacedObject(ObjectSpec(1, 1), 2, 1)
    assert evaluate_scene(h2, GridScene(5, (p, q)))
    p_left = PlacedObject(ObjectSpec(0, 0), 2, 0)
    assert not evaluate_scene(h2, GridScene(5, (p_left, q)))


def test_sampling_determinism():
    spec = spec_of(TaskType.TEXCOL, 2)
    part = make_holdout_partition(spec, 2, SEED)
    for split in SPLITS:
        s1 = Stream(mix(1, split.value, 0))
        s2 = Stream(mix(1, split.value, 0))
        h1 = sample_hypothesis(spec, part, split, s1)
        h2 = sample_hypothesis(spec, part, split, s2)
        assert h1 == h2
        assert instantiate_positive(h1, spec, s1) == instantiate_positive(h2, spec, s2)


def test_task_spec_validation():
    with pytest.raises(ValueError):
        TaskSpec(task=TaskType.REL, arity=3)
    with pytest.raises(ValueError):
        TaskSpec(task=TaskType.COL, arity=0)
    with pytest.raises(ValueError):
        TaskSpec(task=TaskType.COL, arity=9, grid_size=3)
