"""Hypothesis sampling, tight negatives, distractors, holdout partitions,
and the symbolic ground-truth labeler.

All draws go through an explicit Stream so generation is a pure function
of (master_seed, split, example_index).  Draw order here is the reference
semantics that the compiled kernel reproduces byte-for-byte.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .concepts import (
    AttributeTuple,
    ColorsHypothesis,
    GridScene,
    Hypothesis,
    ObjectSpec,
    PlacedObject,
    Preposition,
    RelationHypothesis,
    TaskType,
    TextureColorsHypothesis,
    TexturesHypothesis,
    tuple_of,
)
from .rng import Stream, mix

_MAX_DRAWS = 100_000


class SamplingError(RuntimeError):
    """A constraint cannot be satisfied (space too small, grid full, ...)."""


class SplitKind(enum.IntEnum):
    TRAIN = 0
    VAL_SAME = 1
    TEST_SAME = 2
    VAL_NEW = 3
    TEST_NEW = 4

    @property
    def label(self) -> str:
        return ("train", "val_same", "test_same", "val_new", "test_new")[self.value]

    @property
    def uses_holdout(self) -> bool:
        """val_new/test_new draw hypotheses containing held-out items and
        distractors from the union pool."""
        return self in (SplitKind.VAL_NEW, SplitKind.TEST_NEW)

    @classmethod
    def from_label(cls, label: str) -> "SplitKind":
        for s in cls:
            if s.label == label.lower():
                return s
        raise ValueError(f"unknown split {label!r}")


SPLITS = tuple(SplitKind)


@dataclass(frozen=True)
class TaskSpec:
    """One task family instance and the attribute spaces it draws from."""

    task: TaskType
    arity: int = 2
    num_colors: int = 9
    num_textures: int = 9
    num_distractors: int = 2
    grid_size: int = 5

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        if self.task is TaskType.REL and self.arity != 2:
            raise ValueError("Rel has a fixed arity of 2 objects")
        if self.num_colors < 2 or self.num_textures < 2:
            raise ValueError("need at least 2 colors and 2 textures")
        if self.num_colors > 255 or self.num_textures > 255:
            raise ValueError("attribute spaces are limited to 255 values")
        if self.num_distractors < 0:
            raise ValueError("num_distractors must be >= 0")
        if self.num_objects + self.num_distractors > self.grid_size**2:
            raise ValueError("grid too small for objects plus distractors")

    @property
    def num_objects(self) -> int:
        return 2 if self.task is TaskType.REL else self.arity

    @property
    def num_attrs(self) -> int:
        if self.task is TaskType.REL:
            return 5
        if self.task is TaskType.TEXCOL:
            return 2 * self.arity
        return self.arity

    def item_space(self) -> list:
        """Holdout item space: colors, textures, or (color, texture) pairs."""
        if self.task is TaskType.COL:
            return list(range(self.num_colors))
        if self.task is TaskType.TEX:
            return list(range(self.num_textures))
        return [(c, t) for c in range(self.num_colors) for t in range(self.num_textures)]


@dataclass(frozen=True)
class HoldoutPartition:
    """Disjoint train/holdout item sets covering the task's item space."""

    kind: str  # "colors" | "textures" | "pairs"
    train_items: tuple
    holdout_items: tuple
    _holdout_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.holdout_items or not self.train_items:
            raise ValueError("both partitions must be non-empty")
        if set(self.train_items) & set(self.holdout_items):
            raise ValueError("partitions must be disjoint")
        object.__setattr__(self, "_holdout_set", frozenset(self.holdout_items))

    def pool(self, split: SplitKind) -> tuple:
        """Items a hypothesis/negative/distractor may use on this split,
        in sorted order (the kernels rely on this ordering)."""
        if split.uses_holdout:
            return tuple(sorted(self.train_items + self.holdout_items))
        return self.train_items

    def is_holdout(self, item) -> bool:
        return item in self._holdout_set


def make_holdout_partition(spec: TaskSpec, holdout_count: int, seed: int) -> HoldoutPartition:
    """Uniformly set aside `holdout_count` items of the task's item space."""
    space = spec.item_space()
    if not 1 <= holdout_count < len(space):
        raise SamplingError(
            f"holdout_count {holdout_count} out of range for {len(space)} items"
        )
    stream = Stream(mix(seed))
    stream.shuffle(space)
    holdout = sorted(space[:holdout_count])
    train = sorted(space[holdout_count:])
    kind = {"col": "colors", "tex": "textures"}.get(spec.task.short_name, "pairs")
    return HoldoutPartition(kind, tuple(train), tuple(holdout))


def _draw_distinct(pool: tuple, k: int, stream: Stream) -> list:
    """k distinct items from pool, by rejection on repeats."""
    if len(pool) < k:
        raise SamplingError(f"cannot draw {k} distinct items from pool of {len(pool)}")
    chosen: list = []
    draws = 0
    while len(chosen) < k:
        item = pool[stream.below(len(pool))]
        if item not in chosen:
            chosen.append(item)
        draws += 1
        if draws > _MAX_DRAWS:
            raise SamplingError("distinct-item sampling exhausted")
    return chosen


def sample_hypothesis(
    spec: TaskSpec, part: HoldoutPartition, split: SplitKind, stream: Stream
) -> Hypothesis:
    """Draw a hypothesis legal for the split: train-family splits use only
    train items, _new splits must include at least one held-out item."""
    pool = part.pool(split)
    for _ in range(_MAX_DRAWS):
        if spec.task is TaskType.REL:
            pair1 = pool[stream.below(len(pool))]
            pair2 = pool[stream.below(len(pool))]
            prep = Preposition(stream.below(2))
            items = [pair1, pair2]
            h: Hypothesis = RelationHypothesis(ObjectSpec(*pair1), prep, ObjectSpec(*pair2))
        else:
            items = _draw_distinct(pool, spec.arity, stream)
            if spec.task is TaskType.COL:
                h = ColorsHypothesis(tuple(items))
            elif spec.task is TaskType.TEX:
                h = TexturesHypothesis(tuple(items))
            else:
                h = TextureColorsHypothesis(tuple(ObjectSpec(*p) for p in items))
        if not split.uses_holdout or any(part.is_holdout(i) for i in items):
            return h
    raise SamplingError("could not sample a hypothesis containing a holdout item")


def _hypothesis_specs(h: Hypothesis, spec: TaskSpec, stream: Stream) -> list[ObjectSpec]:
    """Object specs realizing h, in canonical order; unconstrained
    attributes (texture for Col, color for Tex) drawn uniformly."""
    if isinstance(h, ColorsHypothesis):
        return [ObjectSpec(c, stream.below(spec.num_textures)) for c in h.colors]
    if isinstance(h, TexturesHypothesis):
        return [ObjectSpec(stream.below(spec.num_colors), t) for t in h.textures]
    if isinstance(h, TextureColorsHypothesis):
        return list(h.pairs)
    return [h.first, h.second]


def _place_free(occupied: set, grid: int, stream: Stream) -> tuple[int, int]:
    if len(occupied) >= grid * grid:
        raise SamplingError("grid is full")
    for _ in range(_MAX_DRAWS):
        cell = stream.below(grid * grid)
        rc = (cell // grid, cell % grid)
        if rc not in occupied:
            occupied.add(rc)
            return rc
    raise SamplingError("cell placement exhausted")


def instantiate_positive(h: Hypothesis, spec: TaskSpec, stream: Stream) -> GridScene:
    """A scene for which evaluate_scene(h, scene) is True.

    Rel: first sits above (same column, smaller row) or right-of (same row,
    larger column) second; other tasks place objects in distinct uniform
    cells.
    """
    grid = spec.grid_size
    specs = _hypothesis_specs(h, spec, stream)
    placed: list[PlacedObject] = []
    occupied: set[tuple[int, int]] = set()
    if isinstance(h, RelationHypothesis):
        if grid < 2:
            raise SamplingError("grid too small for a relation")
        lane = stream.below(grid)
        a = stream.below(grid)
        b = stream.below(grid)
        while b == a:
            b = stream.below(grid)
        lo, hi = min(a, b), max(a, b)
        if h.prep is Preposition.ABOVE:
            cells = [(lo, lane), (hi, lane)]
        else:
            cells = [(lane, hi), (lane, lo)]
        for s, rc in zip(specs, cells):
            occupied.add(rc)
            placed.append(PlacedObject(s, *rc))
    else:
        for s in specs:
            placed.append(PlacedObject(s, *_place_free(occupied, grid, stream)))
    return GridScene(grid, tuple(placed))


def _negative_slot_candidates(
    h: Hypothesis, spec: TaskSpec, part: HoldoutPartition, split: SplitKind
) -> list[list[int]]:
    """Per-slot legal replacement values for a tight negative.

    A replacement excludes every hypothesis value of the same attribute
    kind, and for pair tasks the flipped (color, texture) pair must itself
    belong to the split's item pool.
    """
    pool = set(part.pool(split))
    if isinstance(h, ColorsHypothesis):
        cands = [c for c in sorted(pool) if c not in h.colors]
        return [list(cands) for _ in h.colors]
    if isinstance(h, TexturesHypothesis):
        cands = [t for t in sorted(pool) if t not in h.textures]
        return [list(cands) for _ in h.textures]
    if isinstance(h, TextureColorsHypothesis):
        used_c = {p.color for p in h.pairs}
        used_t = {p.texture for p in h.pairs}
        slots = []
        for p in h.pairs:
            slots.append(
                [c for c in range(spec.num_colors) if c not in used_c and (c, p.texture) in pool]
            )
            slots.append(
                [t for t in range(spec.num_textures) if t not in used_t and (p.color, t) in pool]
            )
        return slots
    used_c = {h.first.color, h.second.color}
    used_t = {h.first.texture, h.second.texture}
    return [
        [c for c in range(spec.num_colors) if c not in used_c and (c, h.first.texture) in pool],
        [t for t in range(spec.num_textures) if t not in used_t and (h.first.color, t) in pool],
        [int(Preposition.RIGHT_OF if h.prep is Preposition.ABOVE else Preposition.ABOVE)],
        [c for c in range(spec.num_colors) if c not in used_c and (c, h.second.texture) in pool],
        [t for t in range(spec.num_textures) if t not in used_t and (h.second.color, t) in pool],
    ]


def make_tight_negative(
    h: Hypothesis,
    spec: TaskSpec,
    part: HoldoutPartition,
    split: SplitKind,
    stream: Stream,
) -> tuple[AttributeTuple, int]:
    """Negative tuple at meaning distance exactly 1: one attribute slot is
    replaced, the value stays in that slot (no re-canonicalization)."""
    slots = _negative_slot_candidates(h, spec, part, split)
    feasible = [i for i, cands in enumerate(slots) if cands]
    if not feasible:
        raise SamplingError("no attribute admits a tight-negative replacement")
    idx = feasible[stream.below(len(feasible))]
    value = slots[idx][stream.below(len(slots[idx]))]
    values = list(tuple_of(h).values)
    values[idx] = value
    return AttributeTuple(tuple_of(h).task, tuple(values)), idx


def _distractor_specs(
    h: Hypothesis, spec: TaskSpec, part: HoldoutPartition, split: SplitKind
) -> list[ObjectSpec]:
    """Candidate distractor specs: never matching any hypothesis item, and
    drawn from the split's pool (union pool on _new splits)."""
    pool = part.pool(split)
    if isinstance(h, ColorsHypothesis):
        colors = [c for c in pool if c not in h.colors]
        return [ObjectSpec(c, t) for c in colors for t in range(spec.num_textures)]
    if isinstance(h, TexturesHypothesis):
        textures = [t for t in pool if t not in h.textures]
        return [ObjectSpec(c, t) for c in range(spec.num_colors) for t in textures]
    if isinstance(h, TextureColorsHypothesis):
        used = set(h.pairs)
    else:
        used = {h.first, h.second}
    return [ObjectSpec(*p) for p in pool if ObjectSpec(*p) not in used]


def add_distractors(
    scene: GridScene,
    h: Hypothesis,
    spec: TaskSpec,
    part: HoldoutPartition,
    split: SplitKind,
    count: int,
    stream: Stream,
) -> GridScene:
    """Add `count` objects that cannot flip the scene's label."""
    if count == 0:
        return scene
    if len(scene.objects) + count > scene.grid_size**2:
        raise SamplingError("grid too small for distractors")
    cands = _distractor_specs(h, spec, part, split)
    if not cands:
        raise SamplingError("empty distractor pool")
    occupied = {(o.row, o.col) for o in scene.objects}
    placed = list(scene.objects)
    for _ in range(count):
        s = cands[stream.below(len(cands))]
        placed.append(PlacedObject(s, *_place_free(occupied, scene.grid_size, stream)))
    return GridScene(scene.grid_size, tuple(placed))


def evaluate_scene(h: Hypothesis, scene: GridScene) -> bool:
    """Symbolic ground truth: does the scene exemplify the hypothesis?"""
    if isinstance(h, ColorsHypothesis):
        present = {o.spec.color for o in scene.objects}
        return all(c in present for c in h.colors)
    if isinstance(h, TexturesHypothesis):
        present = {o.spec.texture for o in scene.objects}
        return all(t in present for t in h.textures)
    if isinstance(h, TextureColorsHypothesis):
        specs = {o.spec for o in scene.objects}
        return all(p in specs for p in h.pairs)
    for p in scene.objects:
        if p.spec != h.first:
            continue
        for q in scene.objects:
            if q is p or q.spec != h.second:
                continue
            if h.prep is Preposition.ABOVE:
                if p.col == q.col and p.row < q.row:
                    return True
            elif p.row == q.row and p.col > q.col:
                return True
    return False
