"""Symbolic reference languages and a symbolic receiver.

These certify dataset solvability (a bijective code plus the ground-truth
labeler must reach accuracy 1.0) and provide known-answer fixtures for
every language metric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .concepts import (
    AttributeTuple,
    Hypothesis,
    Preposition,
    TaskType,
    hypothesis_from_tuple,
    tuple_of,
)
from .datafile import DatasetFile
from .metrics import UTTERANCE_LENGTH, VOCAB_SIZE, LanguageSample, Utterance
from .rng import Stream, mix
from .sampling import SplitKind, evaluate_scene

_HOLISTIC_SEED_DOMAIN = 0x33
_NOISE_SEED_DOMAIN = 0x44


class DecodeError(ValueError):
    """Utterance does not parse under the codebook."""


@dataclass(frozen=True)
class Codebook:
    """Token layout: colors, then textures, then the two prepositions, then
    one pad token.  With 9 colors and 9 textures this fills a 21-token
    vocabulary exactly."""

    num_colors: int = 9
    num_textures: int = 9
    vocab_size: int = VOCAB_SIZE
    utterance_length: int = UTTERANCE_LENGTH

    def __post_init__(self):
        if self.num_colors + self.num_textures + 3 > self.vocab_size:
            raise ValueError("vocabulary too small for codebook layout")

    @property
    def pad(self) -> int:
        return self.num_colors + self.num_textures + 2

    def color_token(self, c: int) -> int:
        if not 0 <= c < self.num_colors:
            raise DecodeError(f"color {c} outside codebook")
        return c

    def texture_token(self, t: int) -> int:
        if not 0 <= t < self.num_textures:
            raise DecodeError(f"texture {t} outside codebook")
        return self.num_colors + t

    def prep_token(self, p: int) -> int:
        return self.num_colors + self.num_textures + p

    def role_of(self, token: int) -> tuple[str, int]:
        if 0 <= token < self.num_colors:
            return "color", token
        if token < self.num_colors + self.num_textures:
            return "texture", token - self.num_colors
        if token < self.num_colors + self.num_textures + 2:
            return "prep", token - self.num_colors - self.num_textures
        if token == self.pad:
            return "pad", 0
        raise DecodeError(f"unknown token {token}")

    def content_tokens(self, t: AttributeTuple) -> list[int]:
        v = t.values
        if t.task is TaskType.COL:
            return [self.color_token(c) for c in v]
        if t.task is TaskType.TEX:
            return [self.texture_token(x) for x in v]
        if t.task is TaskType.TEXCOL:
            return [
                self.color_token(x) if i % 2 == 0 else self.texture_token(x)
                for i, x in enumerate(v)
            ]
        return [
            self.color_token(v[0]),
            self.texture_token(v[1]),
            self.prep_token(v[2]),
            self.color_token(v[3]),
            self.texture_token(v[4]),
        ]

    def encode_tuple(self, t: AttributeTuple) -> Utterance:
        content = self.content_tokens(t)
        if len(content) > self.utterance_length:
            raise DecodeError(
                f"{len(content)} content tokens exceed utterance length "
                f"{self.utterance_length}"
            )
        tokens = content + [self.pad] * (self.utterance_length - len(content))
        return Utterance(tuple(tokens), self.vocab_size)

    def decode_tuple(self, u: Utterance) -> AttributeTuple:
        roles = [self.role_of(t) for t in u.tokens]
        content = []
        in_padding = False
        for role in roles:
            if role[0] == "pad":
                in_padding = True
            elif in_padding:
                raise DecodeError("content token after padding")
            else:
                content.append(role)
        if not content:
            raise DecodeError("empty utterance")
        kinds = [k for k, _ in content]
        values = tuple(v for _, v in content)
        if kinds == ["color", "texture", "prep", "color", "texture"]:
            return AttributeTuple(TaskType.REL, values)
        if all(k == "color" for k in kinds):
            return AttributeTuple(TaskType.COL, values)
        if all(k == "texture" for k in kinds):
            return AttributeTuple(TaskType.TEX, values)
        if len(kinds) % 2 == 0 and all(
            k == ("color" if i % 2 == 0 else "texture") for i, k in enumerate(kinds)
        ):
            return AttributeTuple(TaskType.TEXCOL, values)
        raise DecodeError(f"malformed role layout {kinds}")


def _enumerate_tuples(task: TaskType, arity: int, num_colors: int, num_textures: int):
    """All canonical attribute tuples of a task, in lexicographic order."""
    if task is TaskType.COL:
        for combo in itertools.combinations(range(num_colors), arity):
            yield AttributeTuple(task, combo)
    elif task is TaskType.TEX:
        for combo in itertools.combinations(range(num_textures), arity):
            yield AttributeTuple(task, combo)
    elif task is TaskType.TEXCOL:
        pairs = [(c, t) for c in range(num_colors) for t in range(num_textures)]
        for combo in itertools.combinations(pairs, arity):
            yield AttributeTuple(task, tuple(x for pair in combo for x in pair))
    else:
        pairs = [(c, t) for c in range(num_colors) for t in range(num_textures)]
        for (c1, t1), p, (c2, t2) in itertools.product(pairs, (0, 1), pairs):
            yield AttributeTuple(task, (c1, t1, p, c2, t2))


@dataclass(frozen=True)
class CompositionalLanguage:
    """One token per attribute, in canonical tuple order, pad-filled."""

    codebook: Codebook = Codebook()
    name: str = "compositional"

    @property
    def vocab_size(self) -> int:
        return self.codebook.vocab_size

    def encode_tuple(self, t: AttributeTuple) -> Utterance:
        return self.codebook.encode_tuple(t)

    def decode_tuple(self, u: Utterance) -> Optional[AttributeTuple]:
        return self.codebook.decode_tuple(u)


@dataclass(frozen=True, eq=False)
class HolisticLanguage:
    """Memoized distinct random utterance per meaning.

    The table is materialized eagerly over the task's enumerated meaning
    space so utterances do not depend on encounter order.
    """

    task: TaskType
    table: dict[tuple[int, ...], Utterance] = field(repr=False)
    reverse: dict[tuple[int, ...], tuple[int, ...]] = field(repr=False)
    vocab_size: int = VOCAB_SIZE
    name: str = "holistic"

    @classmethod
    def for_task(
        cls,
        task: TaskType,
        arity: int,
        num_colors: int,
        num_textures: int,
        seed: int,
        vocab_size: int = VOCAB_SIZE,
        length: int = UTTERANCE_LENGTH,
    ) -> "HolisticLanguage":
        stream = Stream(mix(seed, _HOLISTIC_SEED_DOMAIN))
        table: dict[tuple[int, ...], Utterance] = {}
        reverse: dict[tuple[int, ...], tuple[int, ...]] = {}
        for t in _enumerate_tuples(task, arity, num_colors, num_textures):
            while True:
                tokens = tuple(stream.below(vocab_size) for _ in range(length))
                if tokens not in reverse:
                    break
            table[t.values] = Utterance(tokens, vocab_size)
            reverse[tokens] = t.values
        return cls(task=task, table=table, reverse=reverse, vocab_size=vocab_size)

    def encode_tuple(self, t: AttributeTuple) -> Utterance:
        try:
            return self.table[t.values]
        except KeyError:
            raise DecodeError(f"meaning {t.values} outside the memoized space") from None

    def decode_tuple(self, u: Utterance) -> Optional[AttributeTuple]:
        values = self.reverse.get(u.tokens)
        return AttributeTuple(self.task, values) if values is not None else None


@dataclass(frozen=True)
class ConstantLanguage:
    """Every meaning maps to one fixed utterance; the receiver falls back
    to the majority label."""

    utterance: Utterance = Utterance((0,) * UTTERANCE_LENGTH, VOCAB_SIZE)
    name: str = "constant"

    @property
    def vocab_size(self) -> int:
        return self.utterance.vocab_size

    def encode_tuple(self, t: AttributeTuple) -> Utterance:
        return self.utterance

    def decode_tuple(self, u: Utterance) -> Optional[AttributeTuple]:
        return None


@dataclass(frozen=True)
class NoisyCompositionalLanguage:
    """Compositional encoding with deterministic per-meaning token noise:
    each position is replaced by a different uniform token with probability
    swap_prob."""

    codebook: Codebook = Codebook()
    swap_prob: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.swap_prob <= 1.0:
            raise ValueError("swap_prob must be in [0, 1]")

    @property
    def name(self) -> str:
        return f"noisy:{self.swap_prob:g}"

    @property
    def vocab_size(self) -> int:
        return self.codebook.vocab_size

    def encode_tuple(self, t: AttributeTuple) -> Utterance:
        clean = self.codebook.encode_tuple(t)
        stream = Stream(mix(self.seed, _NOISE_SEED_DOMAIN, int(t.task), *t.values))
        tokens = []
        for token in clean.tokens:
            if stream.chance(self.swap_prob):
                other = stream.below(self.vocab_size - 1)
                token = other + 1 if other >= token else other
            tokens.append(token)
        return Utterance(tuple(tokens), self.vocab_size)

    def decode_tuple(self, u: Utterance) -> Optional[AttributeTuple]:
        try:
            return self.codebook.decode_tuple(u)
        except DecodeError:
            return None


OracleLanguage = (
    CompositionalLanguage | HolisticLanguage | ConstantLanguage | NoisyCompositionalLanguage
)


def encode(lang: OracleLanguage, h: Hypothesis) -> Utterance:
    """Utter the hypothesis; deterministic in (lang, h)."""
    return lang.encode_tuple(tuple_of(h))


def decode_compositional(u: Utterance, codebook: Codebook) -> Hypothesis:
    """Left inverse of compositional encoding."""
    return hypothesis_from_tuple(codebook.decode_tuple(u))


@dataclass
class EvalReport:
    """Per-split receiver accuracy."""

    accuracies: dict[str, float]
    language: str

    def to_json_dict(self) -> dict:
        return {"language": self.language, "accuracy": dict(self.accuracies)}


def _receiver_hypothesis(lang: OracleLanguage, u: Utterance) -> Optional[Hypothesis]:
    decoded = lang.decode_tuple(u)
    if decoded is None:
        return None
    try:
        return hypothesis_from_tuple(decoded)
    except ValueError:
        return None


def run_referential_eval(ds: DatasetFile, lang: OracleLanguage) -> EvalReport:
    """Encode each hypothesis, decode on the receiver side, label every
    receiver scene with the ground-truth evaluator, and compare to the
    stored labels.  Undecodable utterances fall back to the majority label
    (True on the balanced datasets built here)."""
    accuracies = {}
    for split in SplitKind:
        correct = 0
        total = 0
        for example in ds.examples(split):
            utterance = encode(lang, example.hypothesis)
            decoded = _receiver_hypothesis(lang, utterance)
            for scene, label in example.receiver_items:
                if decoded is None:
                    prediction = True
                else:
                    prediction = evaluate_scene(decoded, scene)
                correct += prediction == label
                total += 1
        accuracies[split.label] = correct / total if total else 0.0
    return EvalReport(accuracies=accuracies, language=lang.name)


def build_language_sample(
    ds: DatasetFile, lang: OracleLanguage, split: SplitKind, max_n: int = 500
) -> LanguageSample:
    """(meaning, utterance) pairs from the first max_n examples of a split."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    count = ds.header.config.count(split)
    if count == 0:
        raise ValueError(f"split {split.label} is empty")
    pairs = []
    for i in range(min(max_n, count)):
        h = ds.example(split, i).hypothesis
        pairs.append((tuple_of(h), encode(lang, h)))
    return LanguageSample(pairs)


def language_by_name(name: str, ds: DatasetFile) -> OracleLanguage:
    """CLI-facing factory: compositional | holistic | constant | noisy:<p>."""
    task = ds.header.config.task
    codebook = Codebook(num_colors=task.num_colors, num_textures=task.num_textures)
    if name == "compositional":
        return CompositionalLanguage(codebook)
    if name == "holistic":
        return HolisticLanguage.for_task(
            task.task, task.arity, task.num_colors, task.num_textures,
            seed=ds.header.config.master_seed,
        )
    if name == "constant":
        return ConstantLanguage()
    if name.startswith("noisy:"):
        return NoisyCompositionalLanguage(
            codebook, swap_prob=float(name.split(":", 1)[1]),
            seed=ds.header.config.master_seed,
        )
    raise ValueError(f"unknown language {name!r}")
