import itertools

import pytest
from hypothesis import given, strategies as st

from texrel.concepts import (
    AttributeTuple,
    ColorsHypothesis,
    GridScene,
    ObjectSpec,
    PlacedObject,
    Preposition,
    RelationHypothesis,
    TaskType,
    TextureColorsHypothesis,
    TexturesHypothesis,
    annotate,
    hypothesis_from_tuple,
    meaning_distance,
    meaning_space_size,
    parse_annotation,
    tuple_of,
    tuple_symbols,
)


def test_tuple_of_relation():
    h = RelationHypothesis(ObjectSpec(0, 6), Preposition.ABOVE, ObjectSpec(1, 6))
    assert tuple_of(h) == AttributeTuple(TaskType.REL, (0, 6, 0, 1, 6))


def test_tuple_of_colors_sorts():
    assert tuple_of(ColorsHypothesis((5, 1))).values == (1, 5)


def test_tuple_of_single_pair():
    assert tuple_of(TextureColorsHypothesis((ObjectSpec(4, 1),))).values == (4, 1)


def test_tuple_of_texcol_sorts_pairs():
    h = TextureColorsHypothesis((ObjectSpec(5, 7), ObjectSpec(4, 1)))
    assert tuple_of(h).values == (4, 1, 5, 7)


@pytest.mark.parametrize(
    "h,english,tree",
    [
        (
            ColorsHypothesis((1, 5)),
            "has-colors color1 color5",
            ("has-colors", ("color1", "color5")),
        ),
        (
            TexturesHypothesis((2, 4)),
            "has-shapes shape2 shape4",
            ("has-shapes", ("shape2", "shape4")),
        ),
        (
            TextureColorsHypothesis((ObjectSpec(4, 1), ObjectSpec(5, 7))),
            "has-shapecolors color4 shape1 color5 shape7",
            ("has-shapecolors", (("color4", "shape1"), ("color5", "shape7"))),
        ),
        (
            RelationHypothesis(ObjectSpec(0, 6), Preposition.ABOVE, ObjectSpec(1, 6)),
            "color0 shape6 above color1 shape6",
            ("above", (("color0", "shape6"), ("color1", "shape6"))),
        ),
        (
            RelationHypothesis(ObjectSpec(2, 3), Preposition.RIGHT_OF, ObjectSpec(4, 5)),
            "color2 shape3 right-of color4 shape5",
            ("right-of", (("color2", "shape3"), ("color4", "shape5"))),
        ),
    ],
)
def test_annotate_conventions(h, english, tree):
    got_english, got_tree = annotate(h)
    assert got_english == english
    assert got_tree == tree


colors_hyps = st.sets(st.integers(0, 8), min_size=1, max_size=3).map(
    lambda s: ColorsHypothesis(tuple(s))
)
textures_hyps = st.sets(st.integers(0, 8), min_size=1, max_size=3).map(
    lambda s: TexturesHypothesis(tuple(s))
)
specs = st.tuples(st.integers(0, 8), st.integers(0, 8)).map(lambda p: ObjectSpec(*p))
texcol_hyps = st.sets(specs, min_size=1, max_size=3).map(
    lambda s: TextureColorsHypothesis(tuple(s))
)
rel_hyps = st.tuples(specs, st.sampled_from(list(Preposition)), specs).map(
    lambda t: RelationHypothesis(t[0], t[1], t[2])
)
any_hyp = st.one_of(colors_hyps, textures_hyps, texcol_hyps, rel_hyps)


@given(any_hyp)
def test_annotation_roundtrip(h):
    english, _ = annotate(h)
    assert parse_annotation(english) == tuple_of(h)


@given(any_hyp)
def test_hypothesis_tuple_roundtrip(h):
    assert hypothesis_from_tuple(tuple_of(h)) == h


def _enumerate_hypotheses(task, num_values=4, arity=2):
    if task is TaskType.COL:
        return [ColorsHypothesis(c) for c in itertools.combinations(range(num_values), arity)]
    if task is TaskType.TEX:
        return [TexturesHypothesis(c) for c in itertools.combinations(range(num_values), arity)]
    pairs = [ObjectSpec(c, t) for c in range(num_values) for t in range(num_values)]
    if task is TaskType.TEXCOL:
        return [
            TextureColorsHypothesis(c) for c in itertools.combinations(pairs, arity)
        ]
    return [
        RelationHypothesis(a, p, b)
        for a in pairs
        for p in Preposition
        for b in pairs
    ]


@pytest.mark.parametrize("task", list(TaskType))
def test_tuple_of_injective(task):
    hyps = _enumerate_hypotheses(task, num_values=3 if task is TaskType.REL else 5)
    tuples = {tuple_of(h).values for h in hyps}
    assert len(tuples) == len(hyps)


@pytest.mark.parametrize("task", list(TaskType))
def test_meaning_distance_metric_axioms(task):
    hyps = _enumerate_hypotheses(task, num_values=3, arity=2)
    tuples = [tuple_of(h) for h in hyps]
    for a in tuples:
        assert meaning_distance(a, a) == 0
    for a, b in itertools.combinations(tuples, 2):
        d = meaning_distance(a, b)
        assert d > 0
        assert d == meaning_distance(b, a)
    # triangle inequality on a subsample to keep runtime bounded
    for a, b, c in itertools.islice(itertools.combinations(tuples, 3), 3000):
        assert meaning_distance(a, c) <= meaning_distance(a, b) + meaning_distance(b, c)


def test_meaning_distance_examples():
    a = AttributeTuple(TaskType.REL, (0, 6, 0, 1, 6))
    b = AttributeTuple(TaskType.REL, (0, 6, 0, 1, 7))
    assert meaning_distance(a, a) == 0
    assert meaning_distance(a, b) == 1
    c1 = tuple_of(ColorsHypothesis((1, 5)))
    c2 = tuple_of(ColorsHypothesis((2, 7)))
    assert meaning_distance(c1, c2) == 2


def test_meaning_distance_task_mismatch():
    a = AttributeTuple(TaskType.COL, (1, 5))
    b = AttributeTuple(TaskType.TEX, (1, 5))
    with pytest.raises(ValueError):
        meaning_distance(a, b)
    with pytest.raises(ValueError):
        meaning_distance(a, AttributeTuple(TaskType.COL, (1, 5, 7)))


def test_meaning_space_size_table():
    assert meaning_space_size(1, 3) == (3, 3)
    assert meaning_space_size(1, 10) == (10, 10)
    assert meaning_space_size(2, 10) == (100, 20)
    assert meaning_space_size(3, 10) == (1000, 30)
    assert meaning_space_size(4, 10) == (10000, 40)
    assert meaning_space_size(5, 10) == (100000, 50)


def test_meaning_space_size_errors():
    with pytest.raises(ValueError):
        meaning_space_size(0, 10)
    with pytest.raises(ValueError):
        meaning_space_size(3, 0)
    with pytest.raises(OverflowError):
        meaning_space_size(100, 10)


def test_tuple_symbols_multiset():
    rel = tuple_of(
        RelationHypothesis(ObjectSpec(0, 6), Preposition.ABOVE, ObjectSpec(1, 6))
    )
    assert tuple_symbols(rel) == ("above", "color0", "shape6", "color1", "shape6")
    col = tuple_of(ColorsHypothesis((1, 5)))
    assert tuple_symbols(col) == ("has-colors", "color1", "color5")


def test_hypothesis_validation():
    with pytest.raises(ValueError):
        ColorsHypothesis((1, 1))
    with pytest.raises(ValueError):
        TextureColorsHypothesis((ObjectSpec(1, 2), ObjectSpec(1, 2)))
    with pytest.raises(ValueError):
        ColorsHypothesis(())
    # equal specs are legal for relations
    RelationHypothesis(ObjectSpec(1, 2), Preposition.ABOVE, ObjectSpec(1, 2))


def test_grid_scene_validation():
    obj = PlacedObject(ObjectSpec(0, 0), 1, 1)
    with pytest.raises(ValueError):
        GridScene(5, (obj, obj))
    with pytest.raises(ValueError):
        GridScene(2, (PlacedObject(ObjectSpec(0, 0), 2, 0),))
    GridScene(5, (obj,))
