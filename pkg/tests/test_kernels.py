"""Parity between the compiled extension and the pure-Python fallback: the
two must be bit-for-bit interchangeable."""
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import desk_config
from texrel import _pykernels, kernels
from texrel.builder import dataset_partition, example_seed
from texrel.concepts import TaskType
from texrel.genparams import make_gen_params
from texrel.rendering import build_palette, make_texture_masks
from texrel.sampling import SPLITS

speedups = pytest.importorskip("texrel._speedups")

TASKS = [
    (TaskType.COL, 1),
    (TaskType.COL, 3),
    (TaskType.TEX, 2),
    (TaskType.TEXCOL, 1),
    (TaskType.TEXCOL, 3),
    (TaskType.REL, 2),
]


@pytest.mark.parametrize("task,arity", TASKS, ids=lambda v: str(v))
def test_generate_example_byte_parity(task, arity):
    cfg = desk_config(task=task, arity=arity, seed=0xBEEF)
    part = dataset_partition(cfg)
    for split in SPLITS:
        params = make_gen_params(cfg.task, part, split, 8, 4)
        for index in range(6):
            seed = example_seed(cfg.master_seed, split, index)
            assert _pykernels.generate_example(params, seed) == speedups.generate_example(
                params, seed
            ), f"{task.short_name}{arity} {split.label} #{index}"


def test_generate_example_parity_no_distractors():
    cfg = desk_config(seed=5, num_distractors=0)
    part = dataset_partition(cfg)
    params = make_gen_params(cfg.task, part, SPLITS[0], 8, 4)
    seed = example_seed(5, SPLITS[0], 0)
    assert _pykernels.generate_example(params, seed) == speedups.generate_example(params, seed)


def test_generate_example_parity_odd_geometry():
    cfg = desk_config(task=TaskType.COL, arity=2, seed=6, grid_size=3, num_colors=5, num_textures=3)
    part = dataset_partition(cfg)
    params = make_gen_params(cfg.task, part, SPLITS[4], 8, 4)
    seed = example_seed(6, SPLITS[4], 3)
    assert _pykernels.generate_example(params, seed) == speedups.generate_example(params, seed)


def test_levenshtein_parity():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = rng.integers(0, 21, size=rng.integers(0, 12)).tolist()
        b = rng.integers(0, 21, size=rng.integers(0, 12)).tolist()
        assert _pykernels.levenshtein(a, b) == speedups.levenshtein(a, b)


def test_pairwise_levenshtein_parity():
    rng = np.random.default_rng(2)
    tokens = rng.integers(0, 21, size=(80, 10)).astype(np.uint8)
    assert np.array_equal(
        _pykernels.pairwise_levenshtein(tokens), speedups.pairwise_levenshtein(tokens)
    )


def test_paint_scene_parity():
    rng = np.random.default_rng(3)
    palette = np.asarray(build_palette(9), dtype=np.uint8)
    masks = np.stack([m.as_array() for m in make_texture_masks(9, 4, 11)]).astype(np.uint8)
    for _ in range(20):
        n = int(rng.integers(0, 6))
        cells = rng.choice(25, size=n, replace=False)
        rows = (cells // 5).astype(np.uint8)
        cols = (cells % 5).astype(np.uint8)
        colors = rng.integers(0, 9, size=n).astype(np.uint8)
        textures = rng.integers(0, 9, size=n).astype(np.uint8)
        a = _pykernels.paint_scene(rows, cols, colors, textures, palette, masks, 5, 16)
        b = speedups.paint_scene(rows, cols, colors, textures, palette, masks, 5, 16)
        assert np.array_equal(a, b)


def test_selector_honors_env_override():
    code = "from texrel import kernels; print(kernels.IMPLEMENTATION)"
    env = dict(os.environ, TEXREL_PURE_PY="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "pure-python"
    env.pop("TEXREL_PURE_PY")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "compiled"


def test_active_implementation_is_compiled():
    # the environment building this package has the extension available
    assert kernels.IMPLEMENTATION in ("compiled", "pure-python")
