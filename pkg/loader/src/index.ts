export { annotate, type Tree } from "./annotate.js";
export { crc32 } from "./crc32.js";
export {
  BadMagicError,
  ChecksumError,
  FormatError,
  SPLITS,
  TruncatedFileError,
  UnsupportedVersionError,
  decodeRecord,
  maskFromHex,
  parseFile,
  type ExampleRecord,
  type Header,
  type PlacedObject,
  type Scene,
  type SplitName,
} from "./format.js";
export {
  GoldenMismatchError,
  getExample,
  openDataset,
  verifyGolden,
  type LoadedExample,
  type LoaderHandle,
} from "./loader.js";
export { renderScene, toPpm } from "./render.js";
