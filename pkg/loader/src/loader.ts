/**
 * Consumer-side TXR1 reader: open with integrity verification, iterate
 * examples, render scenes to dense arrays, and cross-validate against
 * golden PPM exports from the generator.
 */
import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { annotate, type Tree } from "./annotate.js";
import {
  FormatError,
  SPLITS,
  decodeRecord,
  parseFile,
  type Header,
  type SplitName,
} from "./format.js";
import { renderScene, toPpm } from "./render.js";

export class GoldenMismatchError extends Error {}

export interface LoaderHandle {
  header: Header;
  exampleCount: number;
  /** global index of the first example of each split */
  splitStart: Record<SplitName, number>;
  record(globalIndex: number): Uint8Array;
}

export interface LoadedExample {
  senderImages: Uint8Array[];
  senderLabels: boolean[];
  receiverImages: Uint8Array[];
  receiverLabels: boolean[];
  english: string;
  tree: Tree;
  attributeTuple: { taskCode: number; values: number[] };
  imageHeight: number;
  imageWidth: number;
}

export function openDataset(path: string): LoaderHandle {
  const data = new Uint8Array(readFileSync(path));
  const { header, offsets, payload } = parseFile(data);
  const splitStart = {} as Record<SplitName, number>;
  let at = 0;
  for (const split of SPLITS) {
    splitStart[split] = at;
    at += header.examplesPerSplit[split];
  }
  return {
    header,
    exampleCount: offsets.length,
    splitStart,
    record(globalIndex: number): Uint8Array {
      if (globalIndex < 0 || globalIndex >= offsets.length) {
        throw new RangeError(`example index ${globalIndex} out of range`);
      }
      const end =
        globalIndex + 1 < offsets.length ? offsets[globalIndex + 1] : payload.length;
      return payload.subarray(offsets[globalIndex], end);
    },
  };
}

export function getExample(
  handle: LoaderHandle,
  split: SplitName,
  index: number,
): LoadedExample {
  const count = handle.header.examplesPerSplit[split];
  if (index < 0 || index >= count) {
    throw new RangeError(`index ${index} out of range for ${split}`);
  }
  const record = decodeRecord(handle.record(handle.splitStart[split] + index));
  const { english, tree } = annotate(record.taskCode, record.values);
  const side = handle.header.task.gridSize * handle.header.cellSize;
  const half = handle.header.positivesPerSide;
  const render = (scenes: typeof record.sender) =>
    scenes.map((s) => renderScene(s.objects, handle.header));
  const labels = (scenes: typeof record.sender) => scenes.map((s) => s.label);
  const example: LoadedExample = {
    senderImages: render(record.sender),
    senderLabels: labels(record.sender),
    receiverImages: render(record.receiver),
    receiverLabels: labels(record.receiver),
    english,
    tree,
    attributeTuple: { taskCode: record.taskCode, values: record.values },
    imageHeight: side,
    imageWidth: side,
  };
  for (const ls of [example.senderLabels, example.receiverLabels]) {
    const positives = ls.filter(Boolean).length;
    if (positives !== half || ls.length !== handle.header.imagesPerSide) {
      throw new FormatError(
        `side has ${positives}/${ls.length} positives, expected ${half}/${handle.header.imagesPerSide}`,
      );
    }
  }
  return example;
}

function splitOfGlobal(handle: LoaderHandle, globalIndex: number): [SplitName, number] {
  for (let i = SPLITS.length - 1; i >= 0; i--) {
    const split = SPLITS[i];
    if (globalIndex >= handle.splitStart[split]) {
      return [split, globalIndex - handle.splitStart[split]];
    }
  }
  throw new RangeError(`example index ${globalIndex} out of range`);
}

function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/**
 * Compare rendered scenes and regenerated annotations against a directory
 * of `example_<globalIndex>/` exports produced by the generator's
 * export-ppm command.  True iff every compared byte matches.
 */
export function verifyGolden(handle: LoaderHandle, goldenDir: string): boolean {
  const entries = readdirSync(goldenDir, { withFileTypes: true })
    .filter((e) => e.isDirectory() && e.name.startsWith("example_"))
    .map((e) => e.name)
    .sort();
  if (entries.length === 0) {
    throw new Error(`no example_<n> directories under ${goldenDir}`);
  }
  for (const dir of entries) {
    const globalIndex = Number(dir.slice("example_".length));
    const [split, index] = splitOfGlobal(handle, globalIndex);
    const example = getExample(handle, split, index);
    const sides: Array<[string, Uint8Array[], boolean[]]> = [
      ["sender", example.senderImages, example.senderLabels],
      ["receiver", example.receiverImages, example.receiverLabels],
    ];
    for (const [sideName, images, labels] of sides) {
      for (let i = 0; i < images.length; i++) {
        const name = `${sideName}_${String(i).padStart(3, "0")}_${labels[i] ? 1 : 0}.ppm`;
        const golden = new Uint8Array(readFileSync(join(goldenDir, dir, name)));
        const ours = toPpm(images[i], example.imageWidth, example.imageHeight);
        if (!bytesEqual(golden, ours)) {
          return false;
        }
      }
    }
    const annotation = readFileSync(join(goldenDir, dir, "annotation.txt"), "utf-8");
    if (annotation !== example.english + "\n") {
      return false;
    }
  }
  return true;
}
