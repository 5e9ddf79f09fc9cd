"""TXR1 container: chunked binary storage of symbolic scenes.

Layout (all integers little-endian):

    magic "TXR1" | u32 header_len | header (UTF-8 JSON, sorted keys)
    | u32 example_count | u64 offsets[example_count] (from payload start)
    | payload | u32 CRC-32 (IEEE) over payload

Example record: u8 task_code, u8 num_attrs, u8 values[num_attrs], then for
each side (sender, receiver): u8 item_count, and per item: u8 object_count,
(u8 row, u8 col, u8 color, u8 texture) per object, u8 label.

Scenes, not pixels, are persisted; the header carries the palette and
texture masks, so rendering a read-back file consumes no randomness.
"""
from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field, replace
from typing import BinaryIO, Iterable, Iterator

from .concepts import (
    AttributeTuple,
    GridScene,
    Hypothesis,
    ObjectSpec,
    PlacedObject,
    TaskType,
    hypothesis_from_tuple,
)
from .rendering import TextureMask
from .sampling import SPLITS, HoldoutPartition, SplitKind, TaskSpec

MAGIC = b"TXR1"
FORMAT_VERSION = 1
ANNOTATIONS_VERSION = 1

_TEXTURE_SEED_DOMAIN = 0x7E
_PARTITION_SEED_DOMAIN = 0x9A


class DatasetFormatError(RuntimeError):
    """Base class for malformed container files."""


class BadMagicError(DatasetFormatError):
    pass


class UnsupportedVersionError(DatasetFormatError):
    pass


class TruncatedFileError(DatasetFormatError):
    pass


class ChecksumError(DatasetFormatError):
    pass


DEFAULT_SPLIT_SIZES = (100_000, 1024, 1024, 1024, 1024)


@dataclass(frozen=True)
class DatasetConfig:
    """Everything needed to rebuild a dataset bit-for-bit."""

    task: TaskSpec
    examples_per_split: tuple[int, int, int, int, int] = DEFAULT_SPLIT_SIZES
    images_per_side: int = 128
    positives_per_side: int = 64
    holdout_count: int = 2
    master_seed: int = 0
    cell_size: int = 16
    mask_dim: int = 4

    def __post_init__(self):
        if len(self.examples_per_split) != len(SPLITS):
            raise ValueError("need one example count per split")
        if any(n < 1 for n in self.examples_per_split):
            raise ValueError("split sizes must be >= 1")
        if not 1 <= self.images_per_side <= 255:
            raise ValueError("images_per_side must be in 1..255")
        if self.positives_per_side * 2 != self.images_per_side:
            raise ValueError("positives_per_side must be exactly half of images_per_side")
        if self.holdout_count < 1:
            raise ValueError("holdout_count must be >= 1")
        if self.cell_size % self.mask_dim:
            raise ValueError("cell_size must be divisible by mask_dim")

    def count(self, split: SplitKind) -> int:
        return self.examples_per_split[split.value]

    @property
    def total_examples(self) -> int:
        return sum(self.examples_per_split)

    def to_json_dict(self) -> dict:
        return {
            "task": {
                "type": self.task.task.short_name,
                "arity": self.task.arity,
                "num_colors": self.task.num_colors,
                "num_textures": self.task.num_textures,
                "num_distractors": self.task.num_distractors,
                "grid_size": self.task.grid_size,
            },
            "examples_per_split": {
                s.label: self.examples_per_split[s.value] for s in SPLITS
            },
            "images_per_side": self.images_per_side,
            "positives_per_side": self.positives_per_side,
            "holdout_count": self.holdout_count,
            "master_seed": self.master_seed,
            "cell_size": self.cell_size,
            "mask_dim": self.mask_dim,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DatasetConfig":
        data = dict(data)
        task_data = dict(data.pop("task"))
        task = TaskSpec(
            task=TaskType.from_name(task_data.pop("type")),
            **{k: int(v) for k, v in task_data.items()},
        )
        split_sizes = list(DEFAULT_SPLIT_SIZES)
        if "examples_per_split" in data:
            for label, n in data.pop("examples_per_split").items():
                split_sizes[SplitKind.from_label(label).value] = int(n)
        known = {
            "images_per_side",
            "positives_per_side",
            "holdout_count",
            "master_seed",
            "cell_size",
            "mask_dim",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(task=task, examples_per_split=tuple(split_sizes), **data)

    def with_seed(self, seed: int) -> "DatasetConfig":
        return replace(self, master_seed=seed)


@dataclass(frozen=True)
class DatasetHeader:
    config: DatasetConfig
    palette: tuple[tuple[int, int, int], ...]
    masks: tuple[TextureMask, ...]
    partition: HoldoutPartition
    format_version: int = FORMAT_VERSION
    annotations_version: int = ANNOTATIONS_VERSION

    def to_bytes(self) -> bytes:
        part_items = {
            "kind": self.partition.kind,
            "train_items": [list(i) if isinstance(i, tuple) else i for i in self.partition.train_items],
            "holdout_items": [list(i) if isinstance(i, tuple) else i for i in self.partition.holdout_items],
        }
        doc = {
            "format_version": self.format_version,
            "annotations_version": self.annotations_version,
            "palette": [list(rgb) for rgb in self.palette],
            "masks": [m.to_hex() for m in self.masks],
            "holdout": part_items,
            **self.config.to_json_dict(),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "DatasetHeader":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DatasetFormatError(f"unreadable header: {exc}") from exc
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise UnsupportedVersionError(f"format_version {version!r} not supported")
        hold = doc["holdout"]
        as_item = (lambda i: tuple(i)) if hold["kind"] == "pairs" else (lambda i: int(i))
        partition = HoldoutPartition(
            hold["kind"],
            tuple(as_item(i) for i in hold["train_items"]),
            tuple(as_item(i) for i in hold["holdout_items"]),
        )
        config = DatasetConfig.from_json_dict(
            {
                k: doc[k]
                for k in (
                    "task",
                    "examples_per_split",
                    "images_per_side",
                    "positives_per_side",
                    "holdout_count",
                    "master_seed",
                    "cell_size",
                    "mask_dim",
                )
            }
        )
        masks = tuple(TextureMask.from_hex(config.mask_dim, h) for h in doc["masks"])
        palette = tuple(tuple(rgb) for rgb in doc["palette"])
        return cls(
            config=config,
            palette=palette,
            masks=masks,
            partition=partition,
            format_version=version,
            annotations_version=doc["annotations_version"],
        )


@dataclass(frozen=True)
class Example:
    """One referential episode, decoded from its record."""

    hypothesis: Hypothesis
    sender_items: tuple[tuple[GridScene, bool], ...]
    receiver_items: tuple[tuple[GridScene, bool], ...]
    split: SplitKind


def decode_record(record: bytes, grid_size: int, split: SplitKind) -> Example:
    pos = 0
    task = TaskType(record[pos])
    num_attrs = record[pos + 1]
    pos += 2
    values = tuple(record[pos : pos + num_attrs])
    pos += num_attrs
    hypothesis = hypothesis_from_tuple(AttributeTuple(task, values))
    sides = []
    for _ in range(2):
        count = record[pos]
        pos += 1
        items = []
        for _ in range(count):
            n_obj = record[pos]
            pos += 1
            objects = []
            for _ in range(n_obj):
                row, col, color, texture = record[pos : pos + 4]
                objects.append(PlacedObject(ObjectSpec(color, texture), row, col))
                pos += 4
            label = bool(record[pos])
            pos += 1
            items.append((GridScene(grid_size, tuple(objects)), label))
        sides.append(tuple(items))
    if pos != len(record):
        raise DatasetFormatError("trailing bytes in example record")
    return Example(hypothesis, sides[0], sides[1], split)


@dataclass
class DatasetFile:
    header: DatasetHeader
    records: list[bytes] = field(repr=False)

    def __post_init__(self):
        if len(self.records) != self.header.config.total_examples:
            raise DatasetFormatError(
                f"expected {self.header.config.total_examples} records, "
                f"got {len(self.records)}"
            )

    def split_range(self, split: SplitKind) -> tuple[int, int]:
        start = sum(self.header.config.count(s) for s in SPLITS if s < split)
        return start, start + self.header.config.count(split)

    def split_of_index(self, index: int) -> SplitKind:
        for split in SPLITS:
            start, stop = self.split_range(split)
            if start <= index < stop:
                return split
        raise IndexError(f"example index {index} out of range")

    def example(self, split: SplitKind, index: int) -> Example:
        start, stop = self.split_range(split)
        if not 0 <= index < stop - start:
            raise IndexError(f"index {index} out of range for {split.label}")
        return decode_record(
            self.records[start + index], self.header.config.task.grid_size, split
        )

    def examples(self, split: SplitKind) -> Iterator[Example]:
        for i in range(self.header.config.count(split)):
            yield self.example(split, i)


def write_records(
    fh: BinaryIO, header: DatasetHeader, count: int, records: Iterable[bytes]
) -> None:
    """Single-pass streaming writer; offsets are backfilled at the end."""
    header_bytes = header.to_bytes()
    fh.write(MAGIC)
    fh.write(struct.pack("<I", len(header_bytes)))
    fh.write(header_bytes)
    fh.write(struct.pack("<I", count))
    offsets_at = fh.tell()
    fh.write(b"\x00" * (8 * count))
    offsets = []
    crc = 0
    offset = 0
    written = 0
    for record in records:
        offsets.append(offset)
        fh.write(record)
        crc = zlib.crc32(record, crc)
        offset += len(record)
        written += 1
    if written != count:
        raise ValueError(f"record iterator produced {written} records, expected {count}")
    fh.write(struct.pack("<I", crc))
    fh.seek(offsets_at)
    fh.write(struct.pack(f"<{count}Q", *offsets))


def write_dataset(ds: DatasetFile, path) -> None:
    with open(path, "wb") as fh:
        write_records(fh, ds.header, len(ds.records), iter(ds.records))


def read_dataset(path) -> DatasetFile:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4 or raw[:4] != MAGIC:
        if len(raw) >= 4:
            raise BadMagicError(f"bad magic {raw[:4]!r}")
        raise TruncatedFileError("file shorter than magic")
    if len(raw) < 8:
        raise TruncatedFileError("missing header length")
    (header_len,) = struct.unpack_from("<I", raw, 4)
    pos = 8
    if pos + header_len + 4 > len(raw):
        raise TruncatedFileError("header extends past end of file")
    header = DatasetHeader.from_bytes(raw[pos : pos + header_len])
    pos += header_len
    (count,) = struct.unpack_from("<I", raw, pos)
    pos += 4
    if pos + 8 * count + 4 > len(raw):
        raise TruncatedFileError("offset table extends past end of file")
    offsets = struct.unpack_from(f"<{count}Q", raw, pos)
    pos += 8 * count
    payload = raw[pos : len(raw) - 4]
    (stored_crc,) = struct.unpack_from("<I", raw, len(raw) - 4)
    actual_crc = zlib.crc32(payload)
    if actual_crc != stored_crc:
        raise ChecksumError(f"payload CRC {actual_crc:#x} != stored {stored_crc:#x}")
    if any(offsets[i] >= offsets[i + 1] for i in range(count - 1)):
        raise DatasetFormatError("offsets not strictly increasing")
    if count and offsets[-1] >= len(payload):
        raise DatasetFormatError("offset past end of payload")
    records = [
        payload[offsets[i] : offsets[i + 1] if i + 1 < count else len(payload)]
        for i in range(count)
    ]
    return DatasetFile(header, records)
