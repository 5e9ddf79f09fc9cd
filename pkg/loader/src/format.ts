/**
 * TXR1 container parsing.
 *
 * Layout (little-endian): magic "TXR1" | u32 header_len | UTF-8 JSON header
 * | u32 example_count | u64 offsets (from payload start) | payload
 * | u32 CRC-32 over payload.
 *
 * Example record: u8 task_code, u8 num_attrs, u8 values[num_attrs], then
 * per side (sender, receiver): u8 item_count, and per item: u8 object_count,
 * (u8 row, u8 col, u8 color, u8 texture) x object_count, u8 label.
 */
import { crc32 } from "./crc32.js";

export class FormatError extends Error {}
export class BadMagicError extends FormatError {}
export class UnsupportedVersionError extends FormatError {}
export class TruncatedFileError extends FormatError {}
export class ChecksumError extends FormatError {}

export const SPLITS = ["train", "val_same", "test_same", "val_new", "test_new"] as const;
export type SplitName = (typeof SPLITS)[number];

export const TASK_NAMES = ["col", "tex", "texcol", "rel"] as const;

export interface TaskConfig {
  type: (typeof TASK_NAMES)[number];
  arity: number;
  numColors: number;
  numTextures: number;
  numDistractors: number;
  gridSize: number;
}

export interface Header {
  formatVersion: number;
  annotationsVersion: number;
  task: TaskConfig;
  examplesPerSplit: Record<SplitName, number>;
  imagesPerSide: number;
  positivesPerSide: number;
  holdoutCount: number;
  masterSeed: number;
  cellSize: number;
  maskDim: number;
  /** per color id: [r, g, b] */
  palette: Array<[number, number, number]>;
  /** per texture id: dim x dim bits, row-major */
  masks: Uint8Array[];
  holdout: { kind: string; trainItems: unknown[]; holdoutItems: unknown[] };
}

export interface PlacedObject {
  row: number;
  col: number;
  color: number;
  texture: number;
}

export interface Scene {
  objects: PlacedObject[];
  label: boolean;
}

export interface ExampleRecord {
  taskCode: number;
  values: number[];
  sender: Scene[];
  receiver: Scene[];
}

const MAGIC = [0x54, 0x58, 0x52, 0x31]; // "TXR1"

/** Hex mask string -> row-major bit array; bit k is pixel (k/dim, k%dim). */
export function maskFromHex(hex: string, dim: number): Uint8Array {
  const bits = new Uint8Array(dim * dim);
  for (let k = 0; k < dim * dim; k++) {
    const nibble = parseInt(hex[hex.length - 1 - (k >> 2)], 16);
    if (Number.isNaN(nibble)) {
      throw new FormatError(`bad mask hex ${hex}`);
    }
    bits[k] = (nibble >> (k & 3)) & 1;
  }
  return bits;
}

function parseHeader(raw: Uint8Array): Header {
  let doc: Record<string, unknown>;
  try {
    doc = JSON.parse(new TextDecoder("utf-8", { fatal: true }).decode(raw));
  } catch (err) {
    throw new FormatError(`unreadable header: ${err}`);
  }
  const version = doc["format_version"];
  if (version !== 1) {
    throw new UnsupportedVersionError(`format_version ${version} not supported`);
  }
  const task = doc["task"] as Record<string, unknown>;
  const maskDim = doc["mask_dim"] as number;
  const splits = doc["examples_per_split"] as Record<string, number>;
  const hold = doc["holdout"] as Record<string, unknown>;
  return {
    formatVersion: version,
    annotationsVersion: doc["annotations_version"] as number,
    task: {
      type: task["type"] as TaskConfig["type"],
      arity: task["arity"] as number,
      numColors: task["num_colors"] as number,
      numTextures: task["num_textures"] as number,
      numDistractors: task["num_distractors"] as number,
      gridSize: task["grid_size"] as number,
    },
    examplesPerSplit: Object.fromEntries(
      SPLITS.map((s) => [s, splits[s]]),
    ) as Record<SplitName, number>,
    imagesPerSide: doc["images_per_side"] as number,
    positivesPerSide: doc["positives_per_side"] as number,
    holdoutCount: doc["holdout_count"] as number,
    masterSeed: doc["master_seed"] as number,
    cellSize: doc["cell_size"] as number,
    maskDim,
    palette: (doc["palette"] as number[][]).map((rgb) => [rgb[0], rgb[1], rgb[2]]),
    masks: (doc["masks"] as string[]).map((hex) => maskFromHex(hex, maskDim)),
    holdout: {
      kind: hold["kind"] as string,
      trainItems: hold["train_items"] as unknown[],
      holdoutItems: hold["holdout_items"] as unknown[],
    },
  };
}

export interface ParsedFile {
  header: Header;
  offsets: number[];
  payload: Uint8Array;
}

export function parseFile(data: Uint8Array): ParsedFile {
  if (data.length < 4) {
    throw new TruncatedFileError("file shorter than magic");
  }
  if (!MAGIC.every((b, i) => data[i] === b)) {
    throw new BadMagicError(`bad magic ${Array.from(data.slice(0, 4))}`);
  }
  if (data.length < 8) {
    throw new TruncatedFileError("missing header length");
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const headerLen = view.getUint32(4, true);
  let pos = 8;
  if (pos + headerLen + 4 > data.length) {
    throw new TruncatedFileError("header extends past end of file");
  }
  const header = parseHeader(data.subarray(pos, pos + headerLen));
  pos += headerLen;
  const count = view.getUint32(pos, true);
  pos += 4;
  if (pos + 8 * count + 4 > data.length) {
    throw new TruncatedFileError("offset table extends past end of file");
  }
  const offsets: number[] = [];
  for (let i = 0; i < count; i++) {
    const big = view.getBigUint64(pos + 8 * i, true);
    if (big > BigInt(Number.MAX_SAFE_INTEGER)) {
      throw new FormatError("offset exceeds safe integer range");
    }
    offsets.push(Number(big));
  }
  pos += 8 * count;
  const payload = data.subarray(pos, data.length - 4);
  const storedCrc = view.getUint32(data.length - 4, true);
  const actualCrc = crc32(payload);
  if (actualCrc !== storedCrc) {
    throw new ChecksumError(
      `payload CRC ${actualCrc.toString(16)} != stored ${storedCrc.toString(16)}`,
    );
  }
  for (let i = 0; i + 1 < count; i++) {
    if (offsets[i] >= offsets[i + 1]) {
      throw new FormatError("offsets not strictly increasing");
    }
  }
  if (count > 0 && offsets[count - 1] >= payload.length) {
    throw new FormatError("offset past end of payload");
  }
  const total = SPLITS.reduce((acc, s) => acc + header.examplesPerSplit[s], 0);
  if (total !== count) {
    throw new FormatError(`expected ${total} records, file declares ${count}`);
  }
  return { header, offsets, payload };
}

export function decodeRecord(record: Uint8Array): ExampleRecord {
  let pos = 0;
  const taskCode = record[pos];
  const numAttrs = record[pos + 1];
  pos += 2;
  const values = Array.from(record.subarray(pos, pos + numAttrs));
  pos += numAttrs;
  const sides: Scene[][] = [];
  for (let side = 0; side < 2; side++) {
    const count = record[pos];
    pos += 1;
    const scenes: Scene[] = [];
    for (let i = 0; i < count; i++) {
      const nObj = record[pos];
      pos += 1;
      const objects: PlacedObject[] = [];
      for (let j = 0; j < nObj; j++) {
        objects.push({
          row: record[pos],
          col: record[pos + 1],
          color: record[pos + 2],
          texture: record[pos + 3],
        });
        pos += 4;
      }
      scenes.push({ objects, label: record[pos] === 1 });
      pos += 1;
    }
    sides.push(scenes);
  }
  if (pos !== record.length) {
    throw new FormatError("trailing bytes in example record");
  }
  return { taskCode, values, sender: sides[0], receiver: sides[1] };
}
