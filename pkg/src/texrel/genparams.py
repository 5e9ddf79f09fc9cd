"""Primitive parameter block handed to the generation kernels.

Both the pure-Python and the compiled kernel consume this; everything is
plain ints and numpy arrays so the compiled side never touches domain
objects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .concepts import TaskType
from .sampling import HoldoutPartition, SplitKind, TaskSpec


@dataclass(frozen=True)
class GenParams:
    task_code: int
    arity: int
    num_objects: int
    num_attrs: int
    num_colors: int
    num_textures: int
    grid_size: int
    num_distractors: int
    images_per_side: int
    positives_per_side: int
    uses_holdout: int
    # split pool as sorted item ids (pair id = color * num_textures + texture)
    pool_items: np.ndarray  # int32
    pool_holdout: np.ndarray  # uint8, parallel to pool_items
    item_ok: np.ndarray  # uint8 over the full item space

    @property
    def record_size(self) -> int:
        scene = 1 + 4 * (self.num_objects + self.num_distractors)
        side = 1 + self.images_per_side * (scene + 1)
        return 2 + self.num_attrs + 2 * side


def make_gen_params(
    spec: TaskSpec,
    part: HoldoutPartition,
    split: SplitKind,
    images_per_side: int,
    positives_per_side: int,
) -> GenParams:
    if spec.task in (TaskType.COL, TaskType.TEX):
        space = spec.num_colors if spec.task is TaskType.COL else spec.num_textures
        ids = {item: item for item in spec.item_space()}
    else:
        space = spec.num_colors * spec.num_textures
        ids = {(c, t): c * spec.num_textures + t for (c, t) in spec.item_space()}
    pool = part.pool(split)
    pool_items = np.array([ids[item] for item in pool], dtype=np.int32)
    pool_holdout = np.array([1 if part.is_holdout(i) else 0 for i in pool], dtype=np.uint8)
    item_ok = np.zeros(space, dtype=np.uint8)
    item_ok[pool_items] = 1
    return GenParams(
        task_code=int(spec.task),
        arity=spec.arity,
        num_objects=spec.num_objects,
        num_attrs=spec.num_attrs,
        num_colors=spec.num_colors,
        num_textures=spec.num_textures,
        grid_size=spec.grid_size,
        num_distractors=spec.num_distractors,
        images_per_side=images_per_side,
        positives_per_side=positives_per_side,
        uses_holdout=int(split.uses_holdout),
        pool_items=pool_items,
        pool_holdout=pool_holdout,
        item_ok=item_ok,
    )
