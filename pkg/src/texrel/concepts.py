"""Concept domain model: grid scenes, hypotheses, canonical attribute
tuples, annotations, and meaning-space arithmetic.

Tasks come in four families: Col n (a set of colors must appear), Tex n
(a set of textures), TexCol n (a set of (color, texture) pairs), and Rel
(one object positioned above / right-of another).  Every hypothesis
canonicalizes to a fixed-arity integer tuple; annotations and distances
are defined on those tuples.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

U64_MAX = (1 << 64) - 1


class Preposition(enum.IntEnum):
    ABOVE = 0
    RIGHT_OF = 1

    @property
    def word(self) -> str:
        return "above" if self is Preposition.ABOVE else "right-of"

    @classmethod
    def from_word(cls, word: str) -> "Preposition":
        for p in cls:
            if p.word == word:
                return p
        raise ValueError(f"unknown preposition {word!r}")


class TaskType(enum.IntEnum):
    """Task family; values are the on-disk task codes."""

    COL = 0
    TEX = 1
    TEXCOL = 2
    REL = 3

    @property
    def short_name(self) -> str:
        return ("col", "tex", "texcol", "rel")[self.value]

    @classmethod
    def from_name(cls, name: str) -> "TaskType":
        for t in cls:
            if t.short_name == name.lower():
                return t
        raise ValueError(f"unknown task type {name!r}")


@dataclass(frozen=True, order=True)
class ObjectSpec:
    """What an object looks like: palette index and texture index."""

    color: int
    texture: int

    def __post_init__(self):
        if self.color < 0 or self.texture < 0:
            raise ValueError("object attributes must be non-negative")


@dataclass(frozen=True)
class PlacedObject:
    spec: ObjectSpec
    row: int
    col: int


@dataclass(frozen=True)
class GridScene:
    """Symbolic scene: objects on a grid_size x grid_size board, at most
    one object per cell."""

    grid_size: int
    objects: tuple[PlacedObject, ...]

    def __post_init__(self):
        cells = set()
        for obj in self.objects:
            if not (0 <= obj.row < self.grid_size and 0 <= obj.col < self.grid_size):
                raise ValueError(f"object at ({obj.row},{obj.col}) outside grid")
            cells.add((obj.row, obj.col))
        if len(cells) != len(self.objects):
            raise ValueError("objects must occupy distinct cells")


@dataclass(frozen=True)
class ColorsHypothesis:
    """Col n: scene must contain an object of every listed color."""

    colors: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.colors)) != len(self.colors) or not self.colors:
            raise ValueError("colors must be distinct and non-empty")
        object.__setattr__(self, "colors", tuple(sorted(self.colors)))


@dataclass(frozen=True)
class TexturesHypothesis:
    """Tex n: scene must contain an object of every listed texture."""

    textures: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.textures)) != len(self.textures) or not self.textures:
            raise ValueError("textures must be distinct and non-empty")
        object.__setattr__(self, "textures", tuple(sorted(self.textures)))


@dataclass(frozen=True)
class TextureColorsHypothesis:
    """TexCol n: scene must contain an object matching every listed
    (color, texture) pair."""

    pairs: tuple[ObjectSpec, ...]

    def __post_init__(self):
        if len(set(self.pairs)) != len(self.pairs) or not self.pairs:
            raise ValueError("pairs must be distinct and non-empty")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))


@dataclass(frozen=True)
class RelationHypothesis:
    """Rel: `first` positioned `prep` relative to `second`.  Equal specs
    are allowed."""

    first: ObjectSpec
    prep: Preposition
    second: ObjectSpec


Hypothesis = Union[
    ColorsHypothesis, TexturesHypothesis, TextureColorsHypothesis, RelationHypothesis
]


@dataclass(frozen=True)
class AttributeTuple:
    """Fixed-arity integer encoding of a hypothesis.

    Col/Tex: the sorted values.  TexCol: (c1, t1, c2, t2, ...) with pairs
    sorted.  Rel: (c1, t1, prep, c2, t2).  Tuples produced by tuple_of are
    canonical; tight negatives keep the flipped value in the replaced slot
    and are therefore not necessarily sorted.
    """

    task: TaskType
    values: tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.values)


def tuple_of(h: Hypothesis) -> AttributeTuple:
    """Canonical attribute tuple of a hypothesis (deterministic, injective
    per task type)."""
    if isinstance(h, ColorsHypothesis):
        return AttributeTuple(TaskType.COL, h.colors)
    if isinstance(h, TexturesHypothesis):
        return AttributeTuple(TaskType.TEX, h.textures)
    if isinstance(h, TextureColorsHypothesis):
        values = []
        for p in h.pairs:
            values.extend((p.color, p.texture))
        return AttributeTuple(TaskType.TEXCOL, tuple(values))
    if isinstance(h, RelationHypothesis):
        return AttributeTuple(
            TaskType.REL,
            (h.first.color, h.first.texture, int(h.prep), h.second.color, h.second.texture),
        )
    raise TypeError(f"not a hypothesis: {h!r}")


def hypothesis_from_tuple(t: AttributeTuple) -> Hypothesis:
    """Rebuild a hypothesis from an attribute tuple (inverse of tuple_of up
    to canonical ordering)."""
    v = t.values
    if t.task is TaskType.COL:
        return ColorsHypothesis(v)
    if t.task is TaskType.TEX:
        return TexturesHypothesis(v)
    if t.task is TaskType.TEXCOL:
        if len(v) % 2:
            raise ValueError("TexCol tuple arity must be even")
        return TextureColorsHypothesis(
            tuple(ObjectSpec(v[i], v[i + 1]) for i in range(0, len(v), 2))
        )
    if t.task is TaskType.REL:
        if len(v) != 5:
            raise ValueError("Rel tuple arity must be 5")
        return RelationHypothesis(
            ObjectSpec(v[0], v[1]), Preposition(v[2]), ObjectSpec(v[3], v[4])
        )
    raise ValueError(f"unknown task {t.task!r}")


def meaning_distance(a: AttributeTuple, b: AttributeTuple) -> int:
    """Number of differing attribute slots between two same-task tuples.

    Slot-wise comparison (rather than set intersection) is what makes a
    positional utterance encoding perfectly rank-correlated with meaning
    distance, and tight negatives sit at distance exactly 1 because they
    keep the flipped value in the replaced slot.
    """
    if a.task is not b.task:
        raise ValueError(f"task mismatch: {a.task.short_name} vs {b.task.short_name}")
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")
    return sum(x != y for x, y in zip(a.values, b.values))


def meaning_space_size(num_attrs: int, num_values: int) -> tuple[int, int]:
    """(total, factorized) meaning-space sizes: values**attrs and
    values*attrs."""
    if num_attrs < 1 or num_values < 1:
        raise ValueError("num_attrs and num_values must be >= 1")
    total = num_values**num_attrs
    if total > U64_MAX:
        raise OverflowError("total meaning space size exceeds 64 bits")
    return total, num_values * num_attrs


def _color_word(c: int) -> str:
    return f"color{c}"


def _shape_word(t: int) -> str:
    return f"shape{t}"


def annotate(h: Hypothesis) -> tuple[str, tuple]:
    """(english, tree) annotation of a hypothesis.

    Textures are written as "shapeN": the texture is what visually stands
    in for shape identity.
    """
    if isinstance(h, ColorsHypothesis):
        words = tuple(_color_word(c) for c in h.colors)
        return "has-colors " + " ".join(words), ("has-colors", words)
    if isinstance(h, TexturesHypothesis):
        words = tuple(_shape_word(t) for t in h.textures)
        return "has-shapes " + " ".join(words), ("has-shapes", words)
    if isinstance(h, TextureColorsHypothesis):
        leaves = tuple((_color_word(p.color), _shape_word(p.texture)) for p in h.pairs)
        english = "has-shapecolors " + " ".join(w for pair in leaves for w in pair)
        return english, ("has-shapecolors", leaves)
    if isinstance(h, RelationHypothesis):
        first = (_color_word(h.first.color), _shape_word(h.first.texture))
        second = (_color_word(h.second.color), _shape_word(h.second.texture))
        english = " ".join((*first, h.prep.word, *second))
        return english, (h.prep.word, (first, second))
    raise TypeError(f"not a hypothesis: {h!r}")


def tuple_symbols(t: AttributeTuple) -> tuple[str, ...]:
    """Primitive-symbol multiset of a meaning: annotation tree leaves plus
    the root symbol.  Used as the composition inventory for the TRE fit."""
    _, tree = annotate(hypothesis_from_tuple(t))
    root = tree[0]
    leaves: list[str] = []

    def walk(node) -> None:
        if isinstance(node, str):
            leaves.append(node)
        else:
            for child in node:
                walk(child)

    walk(tree[1])
    return (root, *leaves)


def _parse_words(words: Iterable[str], kind: str) -> tuple[int, ...]:
    out = []
    for w in words:
        if not w.startswith(kind):
            raise ValueError(f"expected a {kind} word, got {w!r}")
        out.append(int(w[len(kind):]))
    return tuple(out)


def parse_annotation(english: str) -> AttributeTuple:
    """Parse an English annotation back into its canonical attribute tuple."""
    words = english.split()
    if not words:
        raise ValueError("empty annotation")
    head = words[0]
    if head == "has-colors":
        return tuple_of(ColorsHypothesis(_parse_words(words[1:], "color")))
    if head == "has-shapes":
        return tuple_of(TexturesHypothesis(_parse_words(words[1:], "shape")))
    if head == "has-shapecolors":
        body = words[1:]
        if len(body) % 2:
            raise ValueError("odd shapecolors annotation")
        pairs = []
        for i in range(0, len(body), 2):
            (c,) = _parse_words(body[i : i + 1], "color")
            (t,) = _parse_words(body[i + 1 : i + 2], "shape")
            pairs.append(ObjectSpec(c, t))
        return tuple_of(TextureColorsHypothesis(tuple(pairs)))
    if len(words) == 5:
        (c1,) = _parse_words(words[0:1], "color")
        (t1,) = _parse_words(words[1:2], "shape")
        prep = Preposition.from_word(words[2])
        (c2,) = _parse_words(words[3:4], "color")
        (t2,) = _parse_words(words[4:5], "shape")
        return tuple_of(RelationHypothesis(ObjectSpec(c1, t1), prep, ObjectSpec(c2, t2)))
    raise ValueError(f"unparseable annotation {english!r}")
