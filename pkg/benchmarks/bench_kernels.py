"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--examples N] [--pairs N]
"""
import argparse
import time

import numpy as np

from texrel import _pykernels
from texrel.builder import dataset_partition, example_seed
from texrel.concepts import TaskType
from texrel.datafile import DatasetConfig
from texrel.genparams import make_gen_params
from texrel.rendering import build_palette, make_texture_masks
from texrel.sampling import SplitKind, TaskSpec

try:
    from texrel import _speedups
except ImportError:
    _speedups = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_generate(impl, n_examples):
    cfg = DatasetConfig(task=TaskSpec(task=TaskType.REL), master_seed=7)
    part = dataset_partition(cfg)
    params = make_gen_params(cfg.task, part, SplitKind.TRAIN, 128, 64)

    def run():
        for i in range(n_examples):
            impl.generate_example(params, example_seed(7, SplitKind.TRAIN, i))

    return timeit(run, repeat=2)


def bench_pairwise(impl, n_utterances):
    rng = np.random.default_rng(0)
    tokens = rng.integers(0, 21, size=(n_utterances, 10)).astype(np.uint8)
    return timeit(impl.pairwise_levenshtein, tokens)


def bench_paint(impl, n_scenes=200):
    rng = np.random.default_rng(1)
    palette = np.asarray(build_palette(9), dtype=np.uint8)
    masks = np.stack([m.as_array() for m in make_texture_masks(9, 4, 3)]).astype(np.uint8)
    scenes = []
    for _ in range(n_scenes):
        cells = rng.choice(25, size=4, replace=False)
        scenes.append(
            (
                (cells // 5).astype(np.uint8),
                (cells % 5).astype(np.uint8),
                rng.integers(0, 9, 4).astype(np.uint8),
                rng.integers(0, 9, 4).astype(np.uint8),
            )
        )

    def run():
        for rows, cols, colors, textures in scenes:
            impl.paint_scene(rows, cols, colors, textures, palette, masks, 5, 16)

    return timeit(run)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--examples", type=int, default=50, help="example records per run")
    parser.add_argument("--pairs", type=int, default=400, help="utterances for pairwise bench")
    args = parser.parse_args()

    if _speedups is None:
        print("compiled extension not available; showing pure-python timings only")
    rows = []
    benches = [
        ("generate_example (128+128 Rel scenes)", bench_generate, (args.examples,)),
        (f"pairwise_levenshtein ({args.pairs} utterances)", bench_pairwise, (args.pairs,)),
        ("paint_scene (200 scenes, 80x80)", bench_paint, ()),
    ]
    for name, fn, extra in benches:
        pure = fn(_pykernels, *extra)
        if _speedups is not None:
            fast = fn(_speedups, *extra)
            rows.append((name, pure, fast, pure / fast))
        else:
            rows.append((name, pure, None, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, pure, fast, ratio in rows:
        if fast is None:
            print(f"{name:<{width}}  {pure * 1e3:>8.1f}ms  {'-':>10}  {'-':>8}")
        else:
            print(f"{name:<{width}}  {pure * 1e3:>8.1f}ms  {fast * 1e3:>8.1f}ms  {ratio:>7.1f}x")


if __name__ == "__main__":
    main()
