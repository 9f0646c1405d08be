/** Reader for the pruning toolkit's mask JSON files. */

import * as fs from 'node:fs';

import { invalidData } from './errors.js';

export const MASK_METHODS = [
  'pairwise_mi',
  'cluster_mi',
  'random',
  'weight_magnitude',
  'pairwise_pcc',
] as const;

export interface MaskFile {
  layerId: string;
  k: number;
  /** keep[i] is true when neuron i survives; at least one true. */
  keep: boolean[];
  method: string;
  raw: Record<string, unknown>;
}

export function readMask(path: string): MaskFile {
  let doc: Record<string, unknown>;
  try {
    doc = JSON.parse(fs.readFileSync(path, 'utf-8'));
  } catch (err) {
    throw invalidData(`cannot read ${path}: ${(err as Error).message}`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw invalidData(`${path}: mask file must contain a JSON object`);
  }
  for (const field of ['layer_id', 'K', 'keep', 'method']) {
    if (!(field in doc)) {
      throw invalidData(`${path}: mask file missing field '${field}'`);
    }
  }
  const k = doc.K as number;
  const keepRaw = doc.keep;
  if (
    !Array.isArray(keepRaw) ||
    keepRaw.length !== k ||
    keepRaw.some((v) => v !== 0 && v !== 1)
  ) {
    throw invalidData(`${path}: keep must list K entries of 0 or 1`);
  }
  if (!MASK_METHODS.includes(doc.method as (typeof MASK_METHODS)[number])) {
    throw invalidData(`${path}: unknown method '${doc.method}'`);
  }
  const keep = keepRaw.map((v) => v === 1);
  if (!keep.some((v) => v)) {
    throw invalidData(`${path}: mask must keep at least one neuron`);
  }
  return {
    layerId: String(doc.layer_id),
    k,
    keep,
    method: String(doc.method),
    raw: doc,
  };
}
