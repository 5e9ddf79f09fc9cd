"""Deterministic rasterization of grid scenes.

Objects are textured squares: a small binary mask per texture id, scaled
up to fill one grid cell, painted in the object's palette color on a black
background.  Masks and palette are materialized once per dataset and
stored in the container header, so rendering never consumes randomness.
"""
from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from . import kernels
from .concepts import GridScene
from .rng import Stream, mix

DEFAULT_MASK_DIM = 4
DEFAULT_CELL_SIZE = 16
_MAX_MASK_ATTEMPTS = 10_000


class TextureSynthesisError(RuntimeError):
    """Raised when mask resampling exhausts its retry budget."""


@dataclass(frozen=True)
class TextureMask:
    """dim x dim binary pattern; bit (r*dim + c) of `bits` is the pixel at
    (r, c).  Density is kept strictly between 25% and 75% so textures are
    neither near-empty nor near-solid."""

    dim: int
    bits: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("mask dim must be >= 2")
        if not 0 <= self.bits < (1 << (self.dim * self.dim)):
            raise ValueError("mask bits out of range")

    @property
    def popcount(self) -> int:
        return bin(self.bits).count("1")

    def as_array(self) -> np.ndarray:
        flat = np.array(
            [(self.bits >> k) & 1 for k in range(self.dim * self.dim)], dtype=np.uint8
        )
        return flat.reshape(self.dim, self.dim)

    def to_hex(self) -> str:
        width = (self.dim * self.dim + 3) // 4
        return format(self.bits, f"0{width}x")

    @classmethod
    def from_hex(cls, dim: int, text: str) -> "TextureMask":
        return cls(dim, int(text, 16))


def _density_ok(bits: int, dim: int) -> bool:
    cells = dim * dim
    pop = bin(bits).count("1")
    return cells * 0.25 < pop < cells * 0.75


def texture_mask(texture_id: int, dim: int, texture_seed: int) -> TextureMask:
    """Deterministic mask for one texture id; resamples until the density
    constraint holds."""
    if texture_id < 0:
        raise ValueError("texture_id must be non-negative")
    stream = Stream(mix(texture_seed, texture_id))
    for _ in range(_MAX_MASK_ATTEMPTS):
        bits = 0
        for k in range(dim * dim):
            bits |= stream.below(2) << k
        if _density_ok(bits, dim):
            return TextureMask(dim, bits)
    raise TextureSynthesisError(f"no admissible mask for texture {texture_id}")


def make_texture_masks(num_textures: int, dim: int, texture_seed: int) -> tuple[TextureMask, ...]:
    """Masks for ids 0..num_textures-1, pairwise distinct."""
    masks: list[TextureMask] = []
    seen: set[int] = set()
    for tid in range(num_textures):
        stream = Stream(mix(texture_seed, tid))
        for _ in range(_MAX_MASK_ATTEMPTS):
            bits = 0
            for k in range(dim * dim):
                bits |= stream.below(2) << k
            if _density_ok(bits, dim) and bits not in seen:
                seen.add(bits)
                masks.append(TextureMask(dim, bits))
                break
        else:
            raise TextureSynthesisError(f"no distinct mask for texture {tid}")
    return tuple(masks)


def palette_color(color_id: int, num_colors: int) -> tuple[int, int, int]:
    """Fully saturated color at hue color_id/num_colors."""
    if not 0 <= color_id < num_colors:
        raise ValueError(f"color id {color_id} out of range for {num_colors} colors")
    r, g, b = colorsys.hsv_to_rgb(color_id / num_colors, 1.0, 1.0)
    return round(r * 255), round(g * 255), round(b * 255)


def build_palette(num_colors: int) -> tuple[tuple[int, int, int], ...]:
    """Palette for ids 0..num_colors-1; triples are pairwise distinct and
    never the (0,0,0) background."""
    palette = tuple(palette_color(c, num_colors) for c in range(num_colors))
    if len(set(palette)) != num_colors or (0, 0, 0) in palette:
        raise ValueError(f"{num_colors} colors do not yield a usable palette")
    return palette


def render_scene(
    scene: GridScene,
    palette: tuple[tuple[int, int, int], ...],
    masks: tuple[TextureMask, ...],
    cell_size: int = DEFAULT_CELL_SIZE,
) -> np.ndarray:
    """Rasterize to a (H, W, 3) uint8 array, H = W = grid_size * cell_size."""
    if not masks:
        raise ValueError("no texture masks supplied")
    dim = masks[0].dim
    if cell_size % dim:
        raise ValueError(f"cell_size {cell_size} not divisible by mask dim {dim}")
    n = len(scene.objects)
    rows = np.empty(n, dtype=np.uint8)
    cols = np.empty(n, dtype=np.uint8)
    colors = np.empty(n, dtype=np.uint8)
    textures = np.empty(n, dtype=np.uint8)
    for i, obj in enumerate(scene.objects):
        if obj.spec.color >= len(palette):
            raise ValueError(f"color {obj.spec.color} not in palette")
        if obj.spec.texture >= len(masks):
            raise ValueError(f"texture {obj.spec.texture} has no mask")
        rows[i], cols[i] = obj.row, obj.col
        colors[i], textures[i] = obj.spec.color, obj.spec.texture
    palette_arr = np.asarray(palette, dtype=np.uint8)
    mask_arr = np.stack([m.as_array() for m in masks]).astype(np.uint8)
    return kernels.paint_scene(
        rows, cols, colors, textures, palette_arr, mask_arr, scene.grid_size, cell_size
    )
