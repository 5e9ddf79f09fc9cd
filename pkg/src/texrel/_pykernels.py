"""Pure-Python kernels: reference semantics for the compiled module.

generate_example composes the sampling ops, so its byte output *defines*
the dataset format; _speedups.pyx reproduces the same draw sequence with
typed loops.  The other kernels are numpy formulations of the hot metric
and rendering loops.
"""
from __future__ import annotations

import numpy as np

from .concepts import TaskType, hypothesis_from_tuple, tuple_of
from .genparams import GenParams
from .rng import Stream
from .sampling import (
    SplitKind,
    TaskSpec,
    add_distractors,
    instantiate_positive,
    make_tight_negative,
    sample_hypothesis,
)


class _PoolView:
    """Duck-typed stand-in for HoldoutPartition built from a GenParams
    block (train-family pools have no holdout items to reconstruct)."""

    def __init__(self, params: GenParams):
        T = params.num_textures
        if params.task_code in (int(TaskType.COL), int(TaskType.TEX)):
            items = [int(i) for i in params.pool_items]
        else:
            items = [(int(i) // T, int(i) % T) for i in params.pool_items]
        self._pool = tuple(items)
        self._holdout = frozenset(
            item for item, hold in zip(items, params.pool_holdout) if hold
        )

    def pool(self, split: SplitKind) -> tuple:
        return self._pool

    def is_holdout(self, item) -> bool:
        return item in self._holdout


def _task_spec(params: GenParams) -> TaskSpec:
    return TaskSpec(
        task=TaskType(params.task_code),
        arity=params.arity,
        num_colors=params.num_colors,
        num_textures=params.num_textures,
        num_distractors=params.num_distractors,
        grid_size=params.grid_size,
    )


def generate_example(params: GenParams, seed: int) -> bytes:
    """One example record: hypothesis, then sender and receiver sides."""
    stream = Stream(seed)
    spec = _task_spec(params)
    part = _PoolView(params)
    split = SplitKind.VAL_NEW if params.uses_holdout else SplitKind.TRAIN
    h = sample_hypothesis(spec, part, split, stream)
    hyp_tuple = tuple_of(h)
    out = bytearray()
    out.append(params.task_code)
    out.append(params.num_attrs)
    out.extend(hyp_tuple.values)
    for _side in range(2):
        out.append(params.images_per_side)
        labels = [True] * params.positives_per_side + [False] * (
            params.images_per_side - params.positives_per_side
        )
        stream.shuffle(labels)
        for label in labels:
            if label:
                scene = instantiate_positive(h, spec, stream)
            else:
                neg, _ = make_tight_negative(h, spec, part, split, stream)
                scene = instantiate_positive(hypothesis_from_tuple(neg), spec, stream)
            scene = add_distractors(
                scene, h, spec, part, split, params.num_distractors, stream
            )
            out.append(len(scene.objects))
            for obj in scene.objects:
                out.extend((obj.row, obj.col, obj.spec.color, obj.spec.texture))
            out.append(1 if label else 0)
    return bytes(out)


def levenshtein(a, b) -> int:
    """Unit-cost edit distance between two token sequences."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        cur = [i] + [0] * n
        bi = b[i - 1]
        for j in range(1, n + 1):
            cost = 0 if a[j - 1] == bi else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[n]


def pairwise_levenshtein(tokens: np.ndarray) -> np.ndarray:
    """Condensed (i<j) edit distances between rows of a (n, L) uint8 array.

    Vectorized over the pair axis: the DP grid is only L x L, so looping it
    in Python while numpy sweeps all pairs at once is cheap.
    """
    tokens = np.ascontiguousarray(tokens, dtype=np.uint8)
    n, L = tokens.shape
    iu, ju = np.triu_indices(n, k=1)
    a = tokens[iu]
    b = tokens[ju]
    npairs = len(iu)
    prev = np.broadcast_to(np.arange(L + 1, dtype=np.int32), (npairs, L + 1)).copy()
    cur = np.empty_like(prev)
    for i in range(1, L + 1):
        cur[:, 0] = i
        bi = b[:, i - 1]
        for j in range(1, L + 1):
            sub = prev[:, j - 1] + (a[:, j - 1] != bi)
            np.minimum(sub, prev[:, j] + 1, out=sub)
            np.minimum(sub, cur[:, j - 1] + 1, out=sub)
            cur[:, j] = sub
        prev, cur = cur, prev
    return prev[:, L].astype(np.int32)


def paint_scene(
    rows: np.ndarray,
    cols: np.ndarray,
    colors: np.ndarray,
    textures: np.ndarray,
    palette: np.ndarray,
    masks: np.ndarray,
    grid_size: int,
    cell_size: int,
) -> np.ndarray:
    """Rasterize objects onto a black (grid*cell, grid*cell, 3) canvas."""
    dim = masks.shape[1]
    scale = cell_size // dim
    side = grid_size * cell_size
    img = np.zeros((side, side, 3), dtype=np.uint8)
    ones = np.ones((scale, scale), dtype=bool)
    for i in range(len(rows)):
        block = np.kron(masks[textures[i]].astype(bool), ones)
        r0, c0 = int(rows[i]) * cell_size, int(cols[i]) * cell_size
        cell = img[r0 : r0 + cell_size, c0 : c0 + cell_size]
        cell[block] = palette[colors[i]]
    return img
