/** Dense math kernels for the reference encoder (float64 compute). */

const TWO_OVER_SQRT_PI = 2 / Math.sqrt(Math.PI);

/**
 * Error function, odd by construction. Maclaurin series for |x| <= 3
 * (absolute error ~1e-13); Abramowitz-Stegun 7.1.26 beyond, where
 * 1 - erf(|x|) < 3e-5 and the 1.5e-7 formula error is negligible.
 */
export function erf(x: number): number {
  const sign = x < 0 ? -1 : 1;
  const a = Math.abs(x);
  if (a <= 3) {
    let term = a;
    let sum = a;
    for (let k = 1; k < 60; k++) {
      term *= (-a * a) / k;
      const inc = term / (2 * k + 1);
      sum += inc;
      if (Math.abs(inc) < 1e-17 * Math.abs(sum)) {
        break;
      }
    }
    return sign * TWO_OVER_SQRT_PI * sum;
  }
  const t = 1 / (1 + 0.3275911 * a);
  const poly =
    t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
  return sign * (1 - poly * Math.exp(-a * a));
}

/** Gaussian-error-linear unit, exact (erf) form. */
export function gelu(x: number): number {
  return 0.5 * x * (1 + erf(x / Math.SQRT2));
}

/** y = x W^T + b for x (rows, dIn), W (dOut, dIn) row-major. */
export function linear(
  x: Float64Array,
  rows: number,
  dIn: number,
  weight: Float32Array,
  bias: Float32Array,
  dOut: number,
): Float64Array {
  const y = new Float64Array(rows * dOut);
  for (let r = 0; r < rows; r++) {
    for (let o = 0; o < dOut; o++) {
      let acc = 0;
      const wOff = o * dIn;
      const xOff = r * dIn;
      for (let i = 0; i < dIn; i++) {
        acc += x[xOff + i] * weight[wOff + i];
      }
      y[r * dOut + o] = acc + bias[o];
    }
  }
  return y;
}

/** Per-row layer normalization over the trailing dimension, in place. */
export function layerNorm(
  x: Float64Array,
  rows: number,
  dim: number,
  weight: Float32Array,
  bias: Float32Array,
  eps = 1e-12,
): void {
  for (let r = 0; r < rows; r++) {
    const off = r * dim;
    let mean = 0;
    for (let i = 0; i < dim; i++) {
      mean += x[off + i];
    }
    mean /= dim;
    let variance = 0;
    for (let i = 0; i < dim; i++) {
      const d = x[off + i] - mean;
      variance += d * d;
    }
    variance /= dim;
    const inv = 1 / Math.sqrt(variance + eps);
    for (let i = 0; i < dim; i++) {
      x[off + i] = (x[off + i] - mean) * inv * weight[i] + bias[i];
    }
  }
}

/** Numerically-stable softmax over one contiguous row segment, in place. */
export function softmaxInPlace(x: Float64Array, off: number, len: number): void {
  let max = -Infinity;
  for (let i = 0; i < len; i++) {
    if (x[off + i] > max) {
      max = x[off + i];
    }
  }
  let sum = 0;
  for (let i = 0; i < len; i++) {
    const e = Math.exp(x[off + i] - max);
    x[off + i] = e;
    sum += e;
  }
  for (let i = 0; i < len; i++) {
    x[off + i] /= sum;
  }
}
