/**
 * Checkpoint surgery: apply a keep/drop mask to one block's FFN by
 * slicing FC1 output rows (and bias entries) and FC2 input columns for
 * the dropped neurons. Every other tensor is copied untouched, all
 * width checks happen before anything is written, and the narrowed
 * checkpoint loads and runs through the same encoder.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { atomicWrite } from './amx.js';
import { invalidData } from './errors.js';
import { MaskFile } from './mask.js';
import {
  CHECKPOINT_FILE,
  CONFIG_FILE,
  Encoder,
  fc1BiasName,
  fc1WeightName,
  fc2WeightName,
} from './model.js';
import { Tensor, TensorMap, writeSafetensors } from './safetensors.js';

export interface SurgeryResult {
  block: number;
  kept: number;
  maskedParamsBefore: number;
  maskedParamsAfter: number;
  out: string;
}

/** Block index encoded in a mask's layer id ("ffn0", "ffn1", ...). */
export function blockFromLayerId(layerId: string): number {
  const match = /^ffn(\d+)$/.exec(layerId);
  if (match === null) {
    throw invalidData(`mask layer_id '${layerId}' does not name an FFN block (expected 'ffn<i>')`);
  }
  return Number(match[1]);
}

function sliceRows(t: Tensor, keep: boolean[]): Tensor {
  const [rows, cols] = t.shape.length === 1 ? [t.shape[0], 1] : [t.shape[0], t.shape[1]];
  const kept = keep.filter((v) => v).length;
  const data = new Float32Array(kept * cols);
  let r = 0;
  for (let i = 0; i < rows; i++) {
    if (!keep[i]) {
      continue;
    }
    data.set(t.data.subarray(i * cols, (i + 1) * cols), r * cols);
    r += 1;
  }
  return { shape: t.shape.length === 1 ? [kept] : [kept, cols], data };
}

function sliceColumns(t: Tensor, keep: boolean[]): Tensor {
  const [rows, cols] = [t.shape[0], t.shape[1]];
  const kept = keep.filter((v) => v).length;
  const data = new Float32Array(rows * kept);
  for (let i = 0; i < rows; i++) {
    let c = 0;
    for (let j = 0; j < cols; j++) {
      if (!keep[j]) {
        continue;
      }
      data[i * kept + c] = t.data[i * cols + j];
      c += 1;
    }
  }
  return { shape: [rows, kept], data };
}

/**
 * Apply `mask` to the checkpoint in `modelDir`, writing the narrowed
 * checkpoint (plus a copied config) to `outDir`. Refuses on any width
 * mismatch or missing tensor before touching the output.
 */
export function applyMask(modelDir: string, mask: MaskFile, outDir: string): SurgeryResult {
  const model = Encoder.load(modelDir);
  const block = blockFromLayerId(mask.layerId);
  if (block >= model.depth) {
    throw invalidData(
      `mask targets block ${block} but the checkpoint has ${model.depth} blocks`,
    );
  }
  const width = model.ffnWidth(block);
  if (mask.k !== width) {
    throw invalidData(
      `mask width ${mask.k} does not match block ${block} FFN width ${width}; refusing to apply`,
    );
  }

  const fc1w = fc1WeightName(block);
  const fc1b = fc1BiasName(block);
  const fc2w = fc2WeightName(block);
  const before = model.ffnMaskedParams(block);
  const kept = mask.keep.filter((v) => v).length;

  const tensors: TensorMap = new Map();
  for (const [name, t] of model.tensors) {
    if (name === fc1w || name === fc1b) {
      tensors.set(name, sliceRows(t, mask.keep));
    } else if (name === fc2w) {
      tensors.set(name, sliceColumns(t, mask.keep));
    } else {
      tensors.set(name, t);
    }
  }

  fs.mkdirSync(outDir, { recursive: true });
  atomicWrite(
    path.join(outDir, CONFIG_FILE),
    fs.readFileSync(path.join(modelDir, CONFIG_FILE)),
  );
  writeSafetensors(path.join(outDir, CHECKPOINT_FILE), tensors);

  const pruned = Encoder.load(outDir);
  return {
    block,
    kept,
    maskedParamsBefore: before,
    maskedParamsAfter: pruned.ffnMaskedParams(block),
    out: outDir,
  };
}
