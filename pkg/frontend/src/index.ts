export { AMX_MAGIC, readAmx, writeAmx, stableStringify, atomicWrite } from './amx.js';
export type { AmxFile } from './amx.js';
export { ExporterError, invalidData, invalidParameter } from './errors.js';
export type { ErrorKind } from './errors.js';
export { DEFAULT_SAMPLE_FRACTION, exportActivations } from './export.js';
export type { ExportResult, ExportSpec } from './export.js';
export { buildDataset, FIXTURE_CONFIG, SPLIT_SIZES, writeFixture } from './fixture.js';
export { MASK_METHODS, readMask } from './mask.js';
export type { MaskFile } from './mask.js';
export { erf, gelu } from './math.js';
export {
  CHECKPOINT_FILE,
  CONFIG_FILE,
  Encoder,
  fc1BiasName,
  fc1WeightName,
  fc2WeightName,
  PAD_ID,
} from './model.js';
export type { EncoderConfig, ForwardResult } from './model.js';
export { hashSeed, Rng } from './rng.js';
export { numel, readSafetensors, writeSafetensors } from './safetensors.js';
export type { Tensor, TensorMap } from './safetensors.js';
export { applyMask, blockFromLayerId } from './surgery.js';
export type { SurgeryResult } from './surgery.js';
