import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { readAmx } from '../src/amx.js';
import { CHECKPOINT_FILE, CONFIG_FILE } from '../src/model.js';

const CLI = fileURLToPath(new URL('../dist/cli.js', import.meta.url));

const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'cli-test-'));
const modelDir = path.join(dir, 'fixture');

function run(...args: string[]) {
  const proc = spawnSync('node', [CLI, ...args], { encoding: 'utf8' });
  return { status: proc.status, stdout: proc.stdout, stderr: proc.stderr };
}

function stderrJson(stderr: string): { error: string; message: string } {
  const lines = stderr.trim().split('\n');
  expect(lines).toHaveLength(1);
  return JSON.parse(lines[0]);
}

beforeAll(() => {
  const { status } = run('fixture', '--out', modelDir);
  expect(status).toBe(0);
});
afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

describe('cli basics', () => {
  it('reports its version', () => {
    const { status, stdout } = run('--version');
    expect(status).toBe(0);
    expect(stdout.trim()).toBe('0.1.0');
  });

  it('writes a loadable fixture checkpoint', () => {
    expect(fs.existsSync(path.join(modelDir, CONFIG_FILE))).toBe(true);
    expect(fs.existsSync(path.join(modelDir, CHECKPOINT_FILE))).toBe(true);
  });

  it('exports activations end to end', () => {
    const out = path.join(dir, 'cli.amx');
    const { status, stdout } = run(
      'export',
      '--model',
      modelDir,
      '--block',
      '1',
      '--sample-fraction',
      '0.05',
      '--out',
      out,
    );
    expect(status).toBe(0);
    expect(stdout).toMatch(/exported 13x512 activations \(block 1\)/);
    const amx = readAmx(out);
    expect(amx.n).toBe(13);
    expect(amx.k).toBe(512);
    expect(amx.metadata).toMatchObject({ layer_id: 'ffn1', sample_fraction: 0.05 });
  });

  it('applies masks end to end', () => {
    const maskPath = path.join(dir, 'mask.json');
    fs.writeFileSync(
      maskPath,
      JSON.stringify({
        layer_id: 'ffn0',
        K: 512,
        keep: Array.from({ length: 512 }, (_, i) => (i % 2 === 0 ? 1 : 0)),
        method: 'random',
      }),
    );
    const out = path.join(dir, 'pruned');
    const { status, stdout } = run('apply-mask', '--model', modelDir, '--mask', maskPath, '--out', out);
    expect(status).toBe(0);
    expect(stdout).toMatch(/kept 256\/512 neurons in block 0 \(131584 -> 65792 FFN params\)/);
  });
});

describe('cli errors', () => {
  it('exits 2 with a JSON line when a required flag is missing', () => {
    const { status, stderr } = run('export', '--out', path.join(dir, 'x.amx'));
    expect(status).toBe(2);
    const err = stderrJson(stderr);
    expect(err.error).toBe('invalid-parameter');
    expect(err.message).toMatch(/model/);
  });

  it('exits 2 on an out-of-range sample fraction', () => {
    const { status, stderr } = run(
      'export',
      '--model',
      modelDir,
      '--sample-fraction',
      '1.5',
      '--out',
      path.join(dir, 'x.amx'),
    );
    expect(status).toBe(2);
    expect(stderrJson(stderr).message).toMatch(/sample fraction/);
  });

  it('exits 2 on an unknown subcommand', () => {
    const { status, stderr } = run('frobnicate');
    expect(status).toBe(2);
    expect(stderrJson(stderr).error).toBe('invalid-parameter');
  });

  it('exits 3 when the mask width does not match the model', () => {
    const maskPath = path.join(dir, 'narrow.json');
    fs.writeFileSync(
      maskPath,
      JSON.stringify({ layer_id: 'ffn0', K: 100, keep: Array(100).fill(1), method: 'random' }),
    );
    const { status, stderr } = run(
      'apply-mask',
      '--model',
      modelDir,
      '--mask',
      maskPath,
      '--out',
      path.join(dir, 'nope'),
    );
    expect(status).toBe(3);
    const err = stderrJson(stderr);
    expect(err.error).toBe('invalid-data');
    expect(err.message).toMatch(/mask width 100/);
  });

  it('exits 2 on an unreadable config file', () => {
    const cfg = path.join(dir, 'bad.json');
    fs.writeFileSync(cfg, '[1, 2]');
    const { status, stderr } = run('fixture', '--out', path.join(dir, 'f2'), '--config', cfg);
    expect(status).toBe(2);
    expect(stderrJson(stderr).message).toMatch(/config/);
  });
});

describe('cli config file', () => {
  it('lets flags override config values which override defaults', () => {
    const cfg = path.join(dir, 'cfg.json');
    fs.writeFileSync(cfg, JSON.stringify({ 'sample-fraction': 0.05, seed: 3 }));

    const viaConfig = path.join(dir, 'via-config.amx');
    expect(
      run('export', '--model', modelDir, '--config', cfg, '--out', viaConfig).status,
    ).toBe(0);

    const flagWins = path.join(dir, 'flag-wins.amx');
    expect(
      run('export', '--model', modelDir, '--config', cfg, '--seed', '9', '--out', flagWins).status,
    ).toBe(0);

    const allFlags = path.join(dir, 'all-flags.amx');
    expect(
      run(
        'export', '--model', modelDir, '--sample-fraction', '0.05', '--seed', '9', '--out', allFlags,
      ).status,
    ).toBe(0);

    const rows = (p: string) => {
      const amx = readAmx(p);
      return Buffer.from(amx.values.buffer, amx.values.byteOffset, amx.values.byteLength).toString('hex');
    };
    expect(readAmx(viaConfig).n).toBe(13); // config fraction applied
    expect(rows(flagWins)).toBe(rows(allFlags)); // flag seed beat config seed
    expect(rows(flagWins)).not.toBe(rows(viaConfig)); // config seed differed
  });
});
