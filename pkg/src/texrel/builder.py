"""Dataset assembly: per-example generation, streaming build, PPM export,
and the re-verification statistics used by `texrel validate`.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from . import kernels
from .concepts import (
    ColorsHypothesis,
    GridScene,
    Hypothesis,
    RelationHypothesis,
    TextureColorsHypothesis,
    TexturesHypothesis,
    annotate,
)
from .datafile import (
    DatasetConfig,
    DatasetFile,
    DatasetHeader,
    Example,
    _PARTITION_SEED_DOMAIN,
    _TEXTURE_SEED_DOMAIN,
    decode_record,
    write_records,
)
from .genparams import GenParams, make_gen_params
from .rendering import build_palette, make_texture_masks, render_scene
from .rng import mix
from .sampling import SPLITS, HoldoutPartition, SplitKind, evaluate_scene, make_holdout_partition

_CHUNK = 512


def dataset_partition(cfg: DatasetConfig) -> HoldoutPartition:
    return make_holdout_partition(
        cfg.task, cfg.holdout_count, mix(cfg.master_seed, _PARTITION_SEED_DOMAIN)
    )


def dataset_header(cfg: DatasetConfig) -> DatasetHeader:
    texture_seed = mix(cfg.master_seed, _TEXTURE_SEED_DOMAIN)
    return DatasetHeader(
        config=cfg,
        palette=build_palette(cfg.task.num_colors),
        masks=make_texture_masks(cfg.task.num_textures, cfg.mask_dim, texture_seed),
        partition=dataset_partition(cfg),
    )


def example_seed(master_seed: int, split: SplitKind, index: int) -> int:
    return mix(master_seed, split.value, index)


def example_record(
    cfg: DatasetConfig, part: HoldoutPartition, split: SplitKind, index: int
) -> bytes:
    params = make_gen_params(
        cfg.task, part, split, cfg.images_per_side, cfg.positives_per_side
    )
    return kernels.generate_example(params, example_seed(cfg.master_seed, split, index))


def build_example(
    cfg: DatasetConfig, part: HoldoutPartition, split: SplitKind, index: int
) -> Example:
    """One decoded episode, deterministic in (master_seed, split, index)."""
    record = example_record(cfg, part, split, index)
    return decode_record(record, cfg.task.grid_size, split)


def iter_records(cfg: DatasetConfig, part: HoldoutPartition) -> Iterator[bytes]:
    for split in SPLITS:
        params = make_gen_params(
            cfg.task, part, split, cfg.images_per_side, cfg.positives_per_side
        )
        for index in range(cfg.count(split)):
            yield kernels.generate_example(
                params, example_seed(cfg.master_seed, split, index)
            )


def build_dataset(cfg: DatasetConfig) -> DatasetFile:
    """Materialize all splits in memory (use generate_to_path at scale)."""
    header = dataset_header(cfg)
    return DatasetFile(header, list(iter_records(cfg, header.partition)))


def _chunk_worker(args) -> list[bytes]:
    cfg_dict, split_value, start, stop = args
    cfg = DatasetConfig.from_json_dict(cfg_dict)
    part = dataset_partition(cfg)
    split = SplitKind(split_value)
    params = make_gen_params(
        cfg.task, part, split, cfg.images_per_side, cfg.positives_per_side
    )
    return [
        kernels.generate_example(params, example_seed(cfg.master_seed, split, i))
        for i in range(start, stop)
    ]


def _iter_records_parallel(cfg: DatasetConfig, threads: int) -> Iterator[bytes]:
    jobs = []
    for split in SPLITS:
        n = cfg.count(split)
        for start in range(0, n, _CHUNK):
            jobs.append((cfg.to_json_dict(), split.value, start, min(start + _CHUNK, n)))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for chunk in pool.map(_chunk_worker, jobs):
            yield from chunk


def generate_to_path(cfg: DatasetConfig, path, threads: int = 1) -> None:
    """Stream a dataset straight to disk; output bytes are independent of
    the worker count."""
    header = dataset_header(cfg)
    if threads > 1:
        records = _iter_records_parallel(cfg, threads)
    else:
        records = iter_records(cfg, header.partition)
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            write_records(fh, header, cfg.total_examples, records)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def export_ppm(ds: DatasetFile, example_index: int, out_dir) -> list[str]:
    """Write every scene of one example as a P6 pixmap, plus the English
    annotation; returns the written file names."""
    total = ds.header.config.total_examples
    if not 0 <= example_index < total:
        raise IndexError(f"example index {example_index} out of range (0..{total - 1})")
    split = ds.split_of_index(example_index)
    start, _ = ds.split_range(split)
    example = ds.example(split, example_index - start)
    os.makedirs(out_dir, exist_ok=True)
    cfg = ds.header.config
    written = []
    for side_name, items in (
        ("sender", example.sender_items),
        ("receiver", example.receiver_items),
    ):
        for i, (scene, label) in enumerate(items):
            img = render_scene(scene, ds.header.palette, ds.header.masks, cfg.cell_size)
            name = f"{side_name}_{i:03d}_{1 if label else 0}.ppm"
            height, width = img.shape[:2]
            with open(os.path.join(out_dir, name), "wb") as fh:
                fh.write(b"P6\n%d %d\n255\n" % (width, height))
                fh.write(img.tobytes())
            written.append(name)
    english, _tree = annotate(example.hypothesis)
    with open(os.path.join(out_dir, "annotation.txt"), "w", encoding="utf-8") as fh:
        fh.write(english + "\n")
    written.append("annotation.txt")
    return written


def _strip_non_matching(scene: GridScene, h: Hypothesis) -> GridScene:
    """Drop every object that cannot participate in satisfying h (i.e. the
    distractors, plus a tight negative's flipped object)."""
    if isinstance(h, ColorsHypothesis):
        keep = [o for o in scene.objects if o.spec.color in h.colors]
    elif isinstance(h, TexturesHypothesis):
        keep = [o for o in scene.objects if o.spec.texture in h.textures]
    elif isinstance(h, TextureColorsHypothesis):
        keep = [o for o in scene.objects if o.spec in h.pairs]
    else:
        assert isinstance(h, RelationHypothesis)
        keep = [o for o in scene.objects if o.spec in (h.first, h.second)]
    return GridScene(scene.grid_size, tuple(keep))


@dataclass
class SplitStats:
    examples: int
    items: int
    label_balance: float
    side_balance_rate: float  # fraction of sides with exactly half positives
    soundness_rate: float
    hygiene_rate: float
    neutrality_rate: float

    @property
    def clean(self) -> bool:
        return (
            self.soundness_rate == 1.0
            and self.hygiene_rate == 1.0
            and self.neutrality_rate == 1.0
            and self.side_balance_rate == 1.0
        )


@dataclass
class StatsReport:
    per_split: dict[str, SplitStats]

    @property
    def clean(self) -> bool:
        return all(s.clean for s in self.per_split.values())

    def to_json_dict(self) -> dict:
        return {
            label: {
                "examples": s.examples,
                "items": s.items,
                "label_balance": s.label_balance,
                "side_balance_rate": s.side_balance_rate,
                "soundness_rate": s.soundness_rate,
                "hygiene_rate": s.hygiene_rate,
                "neutrality_rate": s.neutrality_rate,
            }
            for label, s in self.per_split.items()
        }


def _hypothesis_items(h: Hypothesis) -> list:
    if isinstance(h, ColorsHypothesis):
        return list(h.colors)
    if isinstance(h, TexturesHypothesis):
        return list(h.textures)
    if isinstance(h, TextureColorsHypothesis):
        return [(p.color, p.texture) for p in h.pairs]
    return [(h.first.color, h.first.texture), (h.second.color, h.second.texture)]


def dataset_stats(ds: DatasetFile) -> StatsReport:
    """Re-verify every stored label with evaluate_scene, check split
    hygiene against the header partition, and confirm distractors are
    label-neutral."""
    part = ds.header.partition
    per_split: dict[str, SplitStats] = {}
    half = ds.header.config.positives_per_side
    for split in SPLITS:
        n = ds.header.config.count(split)
        items = 0
        true_labels = 0
        sound = 0
        neutral = 0
        hygienic = 0
        sides = 0
        balanced_sides = 0
        for example in ds.examples(split):
            h = example.hypothesis
            h_items = _hypothesis_items(h)
            uses_holdout = any(part.is_holdout(i) for i in h_items)
            if uses_holdout == split.uses_holdout:
                hygienic += 1
            for side in (example.sender_items, example.receiver_items):
                sides += 1
                balanced_sides += sum(label for _, label in side) == half
                for scene, label in side:
                    items += 1
                    verdict = evaluate_scene(h, scene)
                    true_labels += label
                    sound += verdict == label
                    stripped = evaluate_scene(h, _strip_non_matching(scene, h))
                    neutral += stripped == verdict
        per_split[split.label] = SplitStats(
            examples=n,
            items=items,
            label_balance=true_labels / items if items else 0.0,
            side_balance_rate=balanced_sides / sides if sides else 1.0,
            soundness_rate=sound / items if items else 1.0,
            hygiene_rate=hygienic / n if n else 1.0,
            neutrality_rate=neutral / items if items else 1.0,
        )
    return StatsReport(per_split)
