/**
 * Reference encoder for checkpoint surgery and activation export: a
 * compact BERT-style stack (embeddings + L post-norm blocks of
 * self-attention and a GeLU FFN, mean-pooled classification head) that
 * runs entirely on the CPU in float64. Per-block FFN widths are derived
 * from tensor shapes, not the config, so a surgically narrowed block
 * loads and runs unchanged.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { invalidData } from './errors.js';
import { gelu, layerNorm, linear, softmaxInPlace } from './math.js';
import { readSafetensors, Tensor, TensorMap } from './safetensors.js';

export const PAD_ID = 0;
export const CHECKPOINT_FILE = 'model.safetensors';
export const CONFIG_FILE = 'config.json';

export interface EncoderConfig {
  model_type: string;
  hidden_size: number;
  num_hidden_layers: number;
  num_attention_heads: number;
  intermediate_size: number;
  vocab_size: number;
  max_position_embeddings: number;
  num_labels: number;
  layer_norm_eps: number;
}

export interface ForwardResult {
  /** One logits row (num_labels entries) per input sequence. */
  logits: Float64Array[];
  /** Pooled post-GeLU FC1 activations of the capture block, one row of
   * ffnWidth(block) entries per sequence (mean over non-padding
   * positions); only present when a capture block was requested. */
  fc1Pooled: Float64Array[] | null;
}

const layerTensor = (i: number, rest: string) => `bert.encoder.layer.${i}.${rest}`;

export function fc1WeightName(block: number): string {
  return layerTensor(block, 'intermediate.dense.weight');
}

export function fc1BiasName(block: number): string {
  return layerTensor(block, 'intermediate.dense.bias');
}

export function fc2WeightName(block: number): string {
  return layerTensor(block, 'output.dense.weight');
}

const EMBEDDING_TENSORS = [
  'bert.embeddings.word_embeddings.weight',
  'bert.embeddings.position_embeddings.weight',
  'bert.embeddings.token_type_embeddings.weight',
  'bert.embeddings.LayerNorm.weight',
  'bert.embeddings.LayerNorm.bias',
  'classifier.weight',
  'classifier.bias',
];

const BLOCK_TENSORS = [
  'attention.self.query.weight',
  'attention.self.query.bias',
  'attention.self.key.weight',
  'attention.self.key.bias',
  'attention.self.value.weight',
  'attention.self.value.bias',
  'attention.output.dense.weight',
  'attention.output.dense.bias',
  'attention.output.LayerNorm.weight',
  'attention.output.LayerNorm.bias',
  'intermediate.dense.weight',
  'intermediate.dense.bias',
  'output.dense.weight',
  'output.dense.bias',
  'output.LayerNorm.weight',
  'output.LayerNorm.bias',
];

export class Encoder {
  readonly config: EncoderConfig;
  readonly tensors: TensorMap;

  constructor(config: EncoderConfig, tensors: TensorMap) {
    this.config = config;
    this.tensors = tensors;
    for (const name of EMBEDDING_TENSORS) {
      this.require(name);
    }
    for (let i = 0; i < config.num_hidden_layers; i++) {
      for (const rest of BLOCK_TENSORS) {
        this.require(layerTensor(i, rest));
      }
    }
  }

  static load(dir: string): Encoder {
    const configPath = path.join(dir, CONFIG_FILE);
    let config: EncoderConfig;
    try {
      config = JSON.parse(fs.readFileSync(configPath, 'utf-8'));
    } catch (err) {
      throw invalidData(`cannot read ${configPath}: ${(err as Error).message}`);
    }
    const tensors = readSafetensors(path.join(dir, CHECKPOINT_FILE));
    return new Encoder(config, tensors);
  }

  private require(name: string): Tensor {
    const t = this.tensors.get(name);
    if (t === undefined) {
      const candidates = [...this.tensors.keys()]
        .filter((n) => n.includes('.dense.') || n.includes('embeddings'))
        .sort();
      throw invalidData(
        `checkpoint tensor ${name} not found; candidate module paths: ${candidates.join(', ')}`,
      );
    }
    return t;
  }

  get depth(): number {
    return this.config.num_hidden_layers;
  }

  /** FFN hidden width of one block, read from the FC1 weight shape. */
  ffnWidth(block: number): number {
    return this.require(fc1WeightName(block)).shape[0];
  }

  /** Parameters indexed by the block's FFN hidden width: FC1 rows and
   * bias entries plus FC2 columns. This is exactly the set a keep/drop
   * mask resizes (the FC2 output bias is width-independent). */
  ffnMaskedParams(block: number): number {
    const h = this.config.hidden_size;
    const width = this.ffnWidth(block);
    return width * h + width + h * width;
  }

  forward(sequences: number[][], captureBlock: number | null = null): ForwardResult {
    const cfg = this.config;
    const h = cfg.hidden_size;
    const heads = cfg.num_attention_heads;
    const headDim = h / heads;
    const word = this.require('bert.embeddings.word_embeddings.weight');
    const pos = this.require('bert.embeddings.position_embeddings.weight');
    const type = this.require('bert.embeddings.token_type_embeddings.weight');

    const logits: Float64Array[] = [];
    const fc1Pooled: Float64Array[] | null = captureBlock === null ? null : [];
    for (const tokens of sequences) {
      const t = tokens.length;
      if (t === 0 || t > cfg.max_position_embeddings) {
        throw invalidData(`sequence length ${t} outside [1, ${cfg.max_position_embeddings}]`);
      }
      let x: Float64Array = new Float64Array(t * h);
      for (let p = 0; p < t; p++) {
        const id = tokens[p];
        if (!Number.isInteger(id) || id < 0 || id >= cfg.vocab_size) {
          throw invalidData(`token id ${id} outside vocabulary of ${cfg.vocab_size}`);
        }
        for (let i = 0; i < h; i++) {
          x[p * h + i] = word.data[id * h + i] + pos.data[p * h + i] + type.data[i];
        }
      }
      layerNorm(
        x, t, h,
        this.require('bert.embeddings.LayerNorm.weight').data,
        this.require('bert.embeddings.LayerNorm.bias').data,
        cfg.layer_norm_eps,
      );

      const padded = tokens.map((id) => id === PAD_ID);
      for (let block = 0; block < cfg.num_hidden_layers; block++) {
        x = this.attention(x, t, padded, block, heads, headDim);
        x = this.ffn(x, t, block, block === captureBlock ? fc1Pooled! : null, padded);
      }

      // Classification head on the mean of non-padding positions.
      const pooled = meanPool(x, t, h, padded);
      const clsW = this.require('classifier.weight');
      const clsB = this.require('classifier.bias');
      const out = linear(pooled, 1, h, clsW.data, clsB.data, clsW.shape[0]);
      logits.push(out);
    }
    return { logits, fc1Pooled };
  }

  private attention(
    x: Float64Array,
    t: number,
    padded: boolean[],
    block: number,
    heads: number,
    headDim: number,
  ): Float64Array {
    const h = this.config.hidden_size;
    const w = (rest: string) => this.require(layerTensor(block, rest));
    const q = linear(x, t, h, w('attention.self.query.weight').data, w('attention.self.query.bias').data, h);
    const k = linear(x, t, h, w('attention.self.key.weight').data, w('attention.self.key.bias').data, h);
    const v = linear(x, t, h, w('attention.self.value.weight').data, w('attention.self.value.bias').data, h);

    const ctx = new Float64Array(t * h);
    const scores = new Float64Array(t);
    const scale = 1 / Math.sqrt(headDim);
    for (let head = 0; head < heads; head++) {
      const off = head * headDim;
      for (let i = 0; i < t; i++) {
        for (let j = 0; j < t; j++) {
          let dot = 0;
          for (let d = 0; d < headDim; d++) {
            dot += q[i * h + off + d] * k[j * h + off + d];
          }
          scores[j] = dot * scale + (padded[j] ? -1e9 : 0);
        }
        softmaxInPlace(scores, 0, t);
        for (let j = 0; j < t; j++) {
          const a = scores[j];
          for (let d = 0; d < headDim; d++) {
            ctx[i * h + off + d] += a * v[j * h + off + d];
          }
        }
      }
    }

    const out = linear(ctx, t, h, w('attention.output.dense.weight').data, w('attention.output.dense.bias').data, h);
    for (let i = 0; i < t * h; i++) {
      out[i] += x[i];
    }
    layerNorm(
      out, t, h,
      w('attention.output.LayerNorm.weight').data,
      w('attention.output.LayerNorm.bias').data,
      this.config.layer_norm_eps,
    );
    return out;
  }

  private ffn(
    x: Float64Array,
    t: number,
    block: number,
    capture: Float64Array[] | null,
    padded: boolean[],
  ): Float64Array {
    const h = this.config.hidden_size;
    const w1 = this.require(fc1WeightName(block));
    const b1 = this.require(fc1BiasName(block));
    const w2 = this.require(fc2WeightName(block));
    const b2 = this.require(layerTensor(block, 'output.dense.bias'));
    const width = w1.shape[0];

    const hidden = linear(x, t, h, w1.data, b1.data, width);
    for (let i = 0; i < hidden.length; i++) {
      hidden[i] = gelu(hidden[i]);
    }
    if (capture !== null) {
      capture.push(meanPool(hidden, t, width, padded));
    }
    const out = linear(hidden, t, width, w2.data, b2.data, h);
    for (let i = 0; i < t * h; i++) {
      out[i] += x[i];
    }
    layerNorm(
      out, t, h,
      this.require(layerTensor(block, 'output.LayerNorm.weight')).data,
      this.require(layerTensor(block, 'output.LayerNorm.bias')).data,
      this.config.layer_norm_eps,
    );
    return out;
  }
}

/** Mean over non-padding positions; one row of `dim` entries. */
function meanPool(x: Float64Array, t: number, dim: number, padded: boolean[]): Float64Array {
  const pooled = new Float64Array(dim);
  let count = 0;
  for (let p = 0; p < t; p++) {
    if (padded[p]) {
      continue;
    }
    count += 1;
    for (let i = 0; i < dim; i++) {
      pooled[i] += x[p * dim + i];
    }
  }
  if (count === 0) {
    throw invalidData('sequence contains only padding tokens');
  }
  for (let i = 0; i < dim; i++) {
    pooled[i] /= count;
  }
  return pooled;
}
