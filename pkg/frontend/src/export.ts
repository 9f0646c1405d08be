/**
 * Activation export: run the encoder over a seeded sample of a dataset
 * split and dump the post-GeLU FC1 activations of one block — pooled to
 * one row per sequence (mean over non-padding positions) — as an AMX
 * file the pruning toolkit consumes directly.
 */

import { writeAmx } from './amx.js';
import { invalidParameter } from './errors.js';
import { buildDataset } from './fixture.js';
import { Encoder, fc1WeightName } from './model.js';
import { hashSeed, Rng } from './rng.js';

export interface ExportSpec {
  /** Checkpoint directory (config.json + model.safetensors). */
  model: string;
  /** Transformer block whose FFN is captured. */
  block: number;
  dataset: string;
  split: string;
  /** Fraction of the split to sample, in (0, 1]. */
  sampleFraction: number;
  seed: number;
  /** Destination AMX path. */
  out: string;
}

export const DEFAULT_SAMPLE_FRACTION = 0.01;

export interface ExportResult {
  n: number;
  k: number;
  rows: number[];
  out: string;
}

export function exportActivations(spec: ExportSpec): ExportResult {
  if (!(spec.sampleFraction > 0 && spec.sampleFraction <= 1)) {
    throw invalidParameter(`sample fraction must be in (0, 1], got ${spec.sampleFraction}`);
  }
  const model = Encoder.load(spec.model);
  if (!Number.isInteger(spec.block) || spec.block < 0 || spec.block >= model.depth) {
    const candidates = Array.from({ length: model.depth }, (_, i) => fc1WeightName(i));
    throw invalidParameter(
      `block ${spec.block} outside model depth ${model.depth}; ` +
        `candidate module paths: ${candidates.join(', ')}`,
    );
  }

  const sequences = buildDataset(spec.dataset, spec.split);
  const n = Math.ceil(spec.sampleFraction * sequences.length);
  const rng = new Rng(hashSeed('export-sample', spec.seed));
  const rows = rng.choice(sequences.length, n);

  const k = model.ffnWidth(spec.block);
  const values = new Float32Array(n * k);
  const batch = 32;
  for (let start = 0; start < rows.length; start += batch) {
    const chunk = rows.slice(start, start + batch);
    const result = model.forward(chunk.map((r) => sequences[r]), spec.block);
    result.fc1Pooled!.forEach((row, i) => {
      values.set(Float32Array.from(row), (start + i) * k);
    });
  }

  writeAmx(spec.out, n, k, values, {
    layer_id: `ffn${spec.block}`,
    sample_fraction: spec.sampleFraction,
    dataset: spec.dataset,
    split: spec.split,
    seed: spec.seed,
    pooling: 'mean-nonpad',
  });
  return { n, k, rows, out: spec.out };
}
