import { execFileSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { exportActivations } from '../src/export.js';
import { buildDataset, writeFixture } from '../src/fixture.js';
import { readMask } from '../src/mask.js';
import { Encoder } from '../src/model.js';
import { applyMask } from '../src/surgery.js';

const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'exporter-acceptance-'));
const modelDir = path.join(dir, 'fixture');
beforeAll(() => writeFixture(modelDir, 0));
afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

describe('exporter acceptance', () => {
  it('exports activation matrices whose column count equals the FFN width', () => {
    const out = path.join(dir, 'width.amx');
    const result = exportActivations({
      model: modelDir,
      block: 0,
      dataset: 'synthetic',
      split: 'train',
      sampleFraction: 0.05,
      seed: 0,
      out,
    });
    expect(result.k).toBe(Encoder.load(modelDir).ffnWidth(0));
    expect(result.k).toBe(512);
  });

  it('changes logits by at most 1e-5 under an all-keep mask (32 samples)', () => {
    const maskPath = path.join(dir, 'allkeep.json');
    fs.writeFileSync(
      maskPath,
      JSON.stringify({
        layer_id: 'ffn0',
        K: 512,
        keep: Array(512).fill(1),
        method: 'random',
      }),
    );
    const outDir = path.join(dir, 'allkeep-model');
    applyMask(modelDir, readMask(maskPath), outDir);

    const seqs = buildDataset('synthetic', 'validation').slice(0, 32);
    expect(seqs).toHaveLength(32);
    const original = Encoder.load(modelDir).forward(seqs).logits;
    const pruned = Encoder.load(outDir).forward(seqs).logits;
    let worst = 0;
    for (let i = 0; i < seqs.length; i++) {
      for (let c = 0; c < original[i].length; c++) {
        worst = Math.max(worst, Math.abs(pruned[i][c] - original[i][c]));
      }
    }
    expect(worst).toBeLessThanOrEqual(1e-5);
  });

  it('halves the pruned block FFN parameter count under a 50% mask', () => {
    const maskPath = path.join(dir, 'half.json');
    fs.writeFileSync(
      maskPath,
      JSON.stringify({
        layer_id: 'ffn0',
        K: 512,
        keep: Array.from({ length: 512 }, (_, i) => (i < 256 ? 1 : 0)),
        method: 'weight_magnitude',
      }),
    );
    const outDir = path.join(dir, 'half-model');
    const result = applyMask(modelDir, readMask(maskPath), outDir);
    expect(result.maskedParamsAfter * 2).toBe(result.maskedParamsBefore);
  });

  it('feeds the pruning toolkit end to end: export, prune, apply, rerun', () => {
    const amxPath = path.join(dir, 'bridge.amx');
    const exported = exportActivations({
      model: modelDir,
      block: 1,
      dataset: 'synthetic',
      split: 'train',
      sampleFraction: 0.125,
      seed: 7,
      out: amxPath,
    });
    expect(exported.k).toBe(512);

    const shapeCheck = execFileSync(
      'python3',
      [
        '-c',
        [
          'import sys',
          'from miprune import read_activations',
          'acts = read_activations(sys.argv[1])',
          'print(acts.values.shape[0], acts.values.shape[1], acts.layer_id)',
        ].join('\n'),
        amxPath,
      ],
      { encoding: 'utf8' },
    ).trim();
    expect(shapeCheck).toBe(`${exported.n} 512 ffn1`);

    const maskPath = path.join(dir, 'bridge-mask.json');
    execFileSync('python3', [
      '-m',
      'miprune.cli',
      'prune',
      'random',
      '--neurons',
      '512',
      '--target-keep',
      '256',
      '--layer-id',
      'ffn1',
      '--seed',
      '5',
      '--out',
      maskPath,
    ]);

    const mask = readMask(maskPath);
    expect(mask.layerId).toBe('ffn1');
    expect(mask.keep.filter(Boolean)).toHaveLength(256);

    const outDir = path.join(dir, 'bridge-model');
    const result = applyMask(modelDir, mask, outDir);
    expect(result.maskedParamsAfter * 2).toBe(result.maskedParamsBefore);

    const pruned = Encoder.load(outDir);
    expect(pruned.ffnWidth(1)).toBe(256);
    const { logits } = pruned.forward(buildDataset('synthetic', 'validation').slice(0, 8));
    expect(logits.every((row) => [...row].every(Number.isFinite))).toBe(true);
  });
});
