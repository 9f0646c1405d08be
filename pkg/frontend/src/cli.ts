#!/usr/bin/env node
/**
 * Command-line surface mirroring the pruning toolkit's conventions:
 * flags > --config JSON file > defaults, one machine-readable JSON
 * error line on stderr, exit codes 0 success / 2 parameter / 3 data /
 * 4 numerical.
 */

import * as fs from 'node:fs';

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { ExporterError } from './errors.js';
import { DEFAULT_SAMPLE_FRACTION, exportActivations } from './export.js';
import { writeFixture } from './fixture.js';
import { readMask } from './mask.js';
import { applyMask } from './surgery.js';

const VERSION = '0.1.0';

function emitError(kind: string, message: string): void {
  process.stderr.write(JSON.stringify({ error: kind, message }) + '\n');
}

function loadConfig(path: string): Record<string, unknown> {
  try {
    const doc = JSON.parse(fs.readFileSync(path, 'utf-8'));
    if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
      throw new Error('config must be a JSON object');
    }
    return doc;
  } catch (err) {
    throw new ExporterError('invalid-parameter', `bad config file ${path}: ${(err as Error).message}`);
  }
}

export function main(argv: string[]): number {
  const parser = yargs(argv)
    .scriptName('hf-exporter')
    .version(VERSION)
    .strict()
    .exitProcess(false)
    .config('config', 'JSON file of flag defaults', loadConfig)
    // Throwing (rather than returning) stops yargs from running the
    // command handler after a validation failure; everything funnels
    // into the catch around parseSync below.
    .fail((msg, err) => {
      if (err) {
        throw err;
      }
      throw new ExporterError('invalid-parameter', msg);
    })
    .command(
      'fixture',
      'generate the deterministic local checkpoint',
      (y) =>
        y
          .option('out', { type: 'string', demandOption: true })
          .option('seed', { type: 'number', default: 0 }),
      (args) => {
        writeFixture(args.out, args.seed);
        process.stdout.write(`wrote fixture checkpoint -> ${args.out}\n`);
      },
    )
    .command(
      'export',
      'dump pooled post-GeLU FC1 activations of one block to AMX',
      (y) =>
        y
          .option('model', { type: 'string', demandOption: true })
          .option('block', { type: 'number', default: 0 })
          .option('dataset', { type: 'string', default: 'synthetic' })
          .option('split', { type: 'string', default: 'train' })
          .option('sample-fraction', { type: 'number', default: DEFAULT_SAMPLE_FRACTION })
          .option('seed', { type: 'number', default: 0 })
          .option('out', { type: 'string', demandOption: true }),
      (args) => {
        const result = exportActivations({
          model: args.model,
          block: args.block,
          dataset: args.dataset,
          split: args.split,
          sampleFraction: args['sample-fraction'],
          seed: args.seed,
          out: args.out,
        });
        process.stdout.write(
          `exported ${result.n}x${result.k} activations (block ${args.block}) -> ${result.out}\n`,
        );
      },
    )
    .command(
      'apply-mask',
      'slice one block\'s FFN weights down to a mask\'s kept neurons',
      (y) =>
        y
          .option('model', { type: 'string', demandOption: true })
          .option('mask', { type: 'string', demandOption: true })
          .option('out', { type: 'string', demandOption: true }),
      (args) => {
        const mask = readMask(args.mask);
        const result = applyMask(args.model, mask, args.out);
        process.stdout.write(
          `kept ${result.kept}/${mask.k} neurons in block ${result.block} ` +
            `(${result.maskedParamsBefore} -> ${result.maskedParamsAfter} FFN params) -> ${result.out}\n`,
        );
      },
    )
    .demandCommand(1, 'a subcommand is required');

  try {
    parser.parseSync();
  } catch (err) {
    if (err instanceof ExporterError) {
      emitError(err.kind, err.message);
      return err.exitCode;
    }
    // yargs wraps config-loading failures in its own YError.
    if (err instanceof Error && err.name === 'YError') {
      emitError('invalid-parameter', err.message);
      return 2;
    }
    throw err;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === `file://${fs.realpathSync(process.argv[1])}`;
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
