/**
 * The AMX activation-matrix container shared with the pruning toolkit:
 * magic bytes "AMX1", little-endian uint32 N and K, the N*K float32
 * payload in row-major order, and an optional uint32-length-prefixed
 * UTF-8 JSON metadata block. Writes are atomic (temp file + rename).
 */

import * as fs from 'node:fs';

import { invalidData } from './errors.js';

export const AMX_MAGIC = 'AMX1';

export interface AmxFile {
  n: number;
  k: number;
  /** Row-major float32 payload, length n * k. */
  values: Float32Array;
  metadata: Record<string, unknown> | null;
}

/** JSON.stringify with recursively sorted object keys, so identical
 * metadata always serializes to identical bytes. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(',')}]`;
  }
  if (value !== null && typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(',')}}`;
  }
  return JSON.stringify(value);
}

export function atomicWrite(path: string, data: Buffer | string): void {
  const tmp = `${path}.tmp.${process.pid}`;
  try {
    fs.writeFileSync(tmp, data);
    fs.renameSync(tmp, path);
  } finally {
    if (fs.existsSync(tmp)) {
      fs.unlinkSync(tmp);
    }
  }
}

export function writeAmx(
  path: string,
  n: number,
  k: number,
  values: Float32Array,
  metadata: Record<string, unknown> | null = null,
): void {
  if (values.length !== n * k) {
    throw invalidData(`AMX payload has ${values.length} values for ${n}x${k}`);
  }
  for (let i = 0; i < values.length; i++) {
    if (!Number.isFinite(values[i])) {
      throw invalidData('AMX payload contains NaN or Inf');
    }
  }
  const header = Buffer.alloc(12);
  header.write(AMX_MAGIC, 0, 'ascii');
  header.writeUInt32LE(n, 4);
  header.writeUInt32LE(k, 8);
  const payload = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    payload.writeFloatLE(values[i], i * 4);
  }
  const parts = [header, payload];
  if (metadata !== null) {
    const blob = Buffer.from(stableStringify(metadata), 'utf-8');
    const lenPrefix = Buffer.alloc(4);
    lenPrefix.writeUInt32LE(blob.length, 0);
    parts.push(lenPrefix, blob);
  }
  atomicWrite(path, Buffer.concat(parts));
}

export function readAmx(path: string): AmxFile {
  let raw: Buffer;
  try {
    raw = fs.readFileSync(path);
  } catch (err) {
    throw invalidData(`cannot read ${path}: ${(err as Error).message}`);
  }
  if (raw.length < 12 || raw.toString('ascii', 0, 4) !== AMX_MAGIC) {
    throw invalidData(`${path}: not an AMX file (bad magic or header)`);
  }
  const n = raw.readUInt32LE(4);
  const k = raw.readUInt32LE(8);
  const need = n * k * 4;
  const body = raw.subarray(12);
  if (body.length < need) {
    throw invalidData(`${path}: payload truncated (${body.length} bytes for ${n}x${k})`);
  }
  const values = new Float32Array(n * k);
  for (let i = 0; i < values.length; i++) {
    values[i] = body.readFloatLE(i * 4);
  }
  const rest = body.subarray(need);
  let metadata: Record<string, unknown> | null = null;
  if (rest.length > 0) {
    if (rest.length < 4) {
      throw invalidData(`${path}: dangling bytes after payload`);
    }
    const blobLen = rest.readUInt32LE(0);
    if (rest.length !== 4 + blobLen) {
      throw invalidData(`${path}: metadata length ${blobLen} does not match file size`);
    }
    try {
      metadata = JSON.parse(rest.toString('utf-8', 4));
    } catch (err) {
      throw invalidData(`${path}: bad metadata block: ${(err as Error).message}`);
    }
  }
  for (let i = 0; i < values.length; i++) {
    if (!Number.isFinite(values[i])) {
      throw invalidData(`${path}: payload contains NaN or Inf`);
    }
  }
  return { n, k, values, metadata };
}
