/**
 * Minimal safetensors reader/writer, float32 tensors only: one
 * little-endian uint64 header length, a JSON header mapping tensor
 * names to dtype/shape/data_offsets (offsets relative to the byte
 * buffer that follows), then the packed tensor data. Tensor names are
 * sorted on write so identical contents produce identical bytes.
 */

import * as fs from 'node:fs';

import { atomicWrite } from './amx.js';
import { invalidData } from './errors.js';

export interface Tensor {
  shape: number[];
  /** Row-major float32 data; length is the product of shape. */
  data: Float32Array;
}

export type TensorMap = Map<string, Tensor>;

interface HeaderEntry {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

export function numel(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function writeSafetensors(path: string, tensors: TensorMap): void {
  const names = [...tensors.keys()].sort();
  const header: Record<string, HeaderEntry> = {};
  let offset = 0;
  for (const name of names) {
    const t = tensors.get(name)!;
    if (t.data.length !== numel(t.shape)) {
      throw invalidData(
        `tensor ${name}: ${t.data.length} values for shape [${t.shape.join(', ')}]`,
      );
    }
    const bytes = t.data.length * 4;
    header[name] = { dtype: 'F32', shape: t.shape, data_offsets: [offset, offset + bytes] };
    offset += bytes;
  }
  const headerJson = Buffer.from(JSON.stringify(header), 'utf-8');
  const prefix = Buffer.alloc(8);
  prefix.writeBigUInt64LE(BigInt(headerJson.length), 0);
  const body = Buffer.alloc(offset);
  for (const name of names) {
    const t = tensors.get(name)!;
    let pos = header[name].data_offsets[0];
    for (let i = 0; i < t.data.length; i++, pos += 4) {
      body.writeFloatLE(t.data[i], pos);
    }
  }
  atomicWrite(path, Buffer.concat([prefix, headerJson, body]));
}

export function readSafetensors(path: string): TensorMap {
  let raw: Buffer;
  try {
    raw = fs.readFileSync(path);
  } catch (err) {
    throw invalidData(`cannot read ${path}: ${(err as Error).message}`);
  }
  if (raw.length < 8) {
    throw invalidData(`${path}: not a safetensors file (too short)`);
  }
  const headerLen = Number(raw.readBigUInt64LE(0));
  if (8 + headerLen > raw.length) {
    throw invalidData(`${path}: header length ${headerLen} exceeds file size`);
  }
  let header: Record<string, HeaderEntry>;
  try {
    header = JSON.parse(raw.toString('utf-8', 8, 8 + headerLen));
  } catch (err) {
    throw invalidData(`${path}: bad safetensors header: ${(err as Error).message}`);
  }
  const body = raw.subarray(8 + headerLen);
  const tensors: TensorMap = new Map();
  for (const [name, entry] of Object.entries(header)) {
    if (name === '__metadata__') {
      continue;
    }
    if (entry.dtype !== 'F32') {
      throw invalidData(`${path}: tensor ${name} has unsupported dtype ${entry.dtype}`);
    }
    const [begin, end] = entry.data_offsets;
    const count = numel(entry.shape);
    if (end - begin !== count * 4 || end > body.length || begin < 0) {
      throw invalidData(`${path}: tensor ${name} has inconsistent offsets`);
    }
    const data = new Float32Array(count);
    for (let i = 0; i < count; i++) {
      data[i] = body.readFloatLE(begin + i * 4);
    }
    tensors.set(name, { shape: entry.shape, data });
  }
  return tensors;
}
