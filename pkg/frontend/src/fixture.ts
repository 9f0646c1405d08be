/**
 * Deterministic local stand-in for a downloaded checkpoint: a
 * two-block encoder with a 512-wide FFN (BERT-tiny geometry) and a
 * synthetic token dataset with train/validation splits. Everything is a
 * pure function of the seed and the split name, so offline runs are
 * exactly reproducible.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { atomicWrite } from './amx.js';
import { invalidParameter } from './errors.js';
import { CHECKPOINT_FILE, CONFIG_FILE, EncoderConfig, PAD_ID } from './model.js';
import { hashSeed, Rng } from './rng.js';
import { numel, TensorMap, writeSafetensors } from './safetensors.js';

export const FIXTURE_CONFIG: EncoderConfig = {
  model_type: 'bert',
  hidden_size: 128,
  num_hidden_layers: 2,
  num_attention_heads: 2,
  intermediate_size: 512,
  vocab_size: 1000,
  max_position_embeddings: 64,
  num_labels: 3,
  layer_norm_eps: 1e-12,
};

export const SPLIT_SIZES: Record<string, number> = {
  train: 256,
  validation: 100,
};

const SEQUENCE_LENGTH = 32;
const MIN_TOKENS = 8;
const INIT_STD = 0.02;

function normalTensor(rng: Rng, shape: number[]): { shape: number[]; data: Float32Array } {
  const data = new Float32Array(numel(shape));
  for (let i = 0; i < data.length; i++) {
    data[i] = Math.fround(INIT_STD * rng.normal());
  }
  return { shape, data };
}

function constTensor(shape: number[], value: number): { shape: number[]; data: Float32Array } {
  return { shape, data: new Float32Array(numel(shape)).fill(value) };
}

/** Write config.json + model.safetensors under `dir`; returns `dir`. */
export function writeFixture(dir: string, seed = 0): string {
  const cfg = FIXTURE_CONFIG;
  const rng = new Rng(hashSeed('fixture-checkpoint', seed));
  const h = cfg.hidden_size;
  const tensors: TensorMap = new Map();

  tensors.set('bert.embeddings.word_embeddings.weight', normalTensor(rng, [cfg.vocab_size, h]));
  tensors.set('bert.embeddings.position_embeddings.weight', normalTensor(rng, [cfg.max_position_embeddings, h]));
  tensors.set('bert.embeddings.token_type_embeddings.weight', normalTensor(rng, [2, h]));
  tensors.set('bert.embeddings.LayerNorm.weight', constTensor([h], 1));
  tensors.set('bert.embeddings.LayerNorm.bias', constTensor([h], 0));

  for (let i = 0; i < cfg.num_hidden_layers; i++) {
    const name = (rest: string) => `bert.encoder.layer.${i}.${rest}`;
    for (const proj of ['query', 'key', 'value']) {
      tensors.set(name(`attention.self.${proj}.weight`), normalTensor(rng, [h, h]));
      tensors.set(name(`attention.self.${proj}.bias`), constTensor([h], 0));
    }
    tensors.set(name('attention.output.dense.weight'), normalTensor(rng, [h, h]));
    tensors.set(name('attention.output.dense.bias'), constTensor([h], 0));
    tensors.set(name('attention.output.LayerNorm.weight'), constTensor([h], 1));
    tensors.set(name('attention.output.LayerNorm.bias'), constTensor([h], 0));
    tensors.set(name('intermediate.dense.weight'), normalTensor(rng, [cfg.intermediate_size, h]));
    tensors.set(name('intermediate.dense.bias'), constTensor([cfg.intermediate_size], 0));
    tensors.set(name('output.dense.weight'), normalTensor(rng, [h, cfg.intermediate_size]));
    tensors.set(name('output.dense.bias'), constTensor([h], 0));
    tensors.set(name('output.LayerNorm.weight'), constTensor([h], 1));
    tensors.set(name('output.LayerNorm.bias'), constTensor([h], 0));
  }

  tensors.set('classifier.weight', normalTensor(rng, [cfg.num_labels, h]));
  tensors.set('classifier.bias', constTensor([cfg.num_labels], 0));

  fs.mkdirSync(dir, { recursive: true });
  atomicWrite(path.join(dir, CONFIG_FILE), JSON.stringify(cfg, null, 2) + '\n');
  writeSafetensors(path.join(dir, CHECKPOINT_FILE), tensors);
  return dir;
}

/**
 * Synthetic token sequences for one dataset split, padded to a fixed
 * length with the PAD id. Content is a pure function of (name, split).
 */
export function buildDataset(name: string, split: string): number[][] {
  const size = SPLIT_SIZES[split];
  if (size === undefined) {
    const known = Object.keys(SPLIT_SIZES).sort().join(', ');
    throw invalidParameter(`unknown split '${split}'; available splits: ${known}`);
  }
  const rng = new Rng(hashSeed('dataset', name, split));
  const sequences: number[][] = [];
  for (let s = 0; s < size; s++) {
    const length = MIN_TOKENS + rng.int(SEQUENCE_LENGTH - MIN_TOKENS + 1);
    const seq = new Array<number>(SEQUENCE_LENGTH).fill(PAD_ID);
    for (let p = 0; p < length; p++) {
      seq[p] = 5 + rng.int(FIXTURE_CONFIG.vocab_size - 5);
    }
    sequences.push(seq);
  }
  return sequences;
}
