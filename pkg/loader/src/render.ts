/**
 * Scene rasterization, bit-identical to the generator: black background,
 * each object fills its cell with the texture mask scaled up, 1-bits
 * painted in the object's palette color.
 */
import type { Header, PlacedObject } from "./format.js";

export function renderScene(objects: PlacedObject[], header: Header): Uint8Array {
  const { cellSize, maskDim, palette, masks } = header;
  const grid = header.task.gridSize;
  const scale = cellSize / maskDim;
  if (!Number.isInteger(scale)) {
    throw new Error(`cell size ${cellSize} not divisible by mask dim ${maskDim}`);
  }
  const side = grid * cellSize;
  const img = new Uint8Array(side * side * 3);
  for (const obj of objects) {
    const [r, g, b] = palette[obj.color];
    const mask = masks[obj.texture];
    if (!palette[obj.color] || !mask) {
      throw new Error(`object references unknown color ${obj.color} or texture ${obj.texture}`);
    }
    const r0 = obj.row * cellSize;
    const c0 = obj.col * cellSize;
    for (let mr = 0; mr < maskDim; mr++) {
      for (let mc = 0; mc < maskDim; mc++) {
        if (!mask[mr * maskDim + mc]) continue;
        for (let y = 0; y < scale; y++) {
          const row = r0 + mr * scale + y;
          for (let x = 0; x < scale; x++) {
            const idx = (row * side + c0 + mc * scale + x) * 3;
            img[idx] = r;
            img[idx + 1] = g;
            img[idx + 2] = b;
          }
        }
      }
    }
  }
  return img;
}

/** P6 pixmap bytes for a rendered scene (maxval 255). */
export function toPpm(pixels: Uint8Array, width: number, height: number): Uint8Array {
  const head = new TextEncoder().encode(`P6\n${width} ${height}\n255\n`);
  const out = new Uint8Array(head.length + pixels.length);
  out.set(head, 0);
  out.set(pixels, head.length);
  return out;
}
