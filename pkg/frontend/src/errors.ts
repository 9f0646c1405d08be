/** Error taxonomy mirrored from the pruning toolkit's CLI contract. */

export type ErrorKind = 'invalid-parameter' | 'invalid-data' | 'numerical';

const EXIT_CODES: Record<ErrorKind, number> = {
  'invalid-parameter': 2,
  'invalid-data': 3,
  numerical: 4,
};

export class ExporterError extends Error {
  readonly kind: ErrorKind;

  constructor(kind: ErrorKind, message: string) {
    super(message);
    this.name = 'ExporterError';
    this.kind = kind;
  }

  get exitCode(): number {
    return EXIT_CODES[this.kind];
  }
}

export function invalidParameter(message: string): ExporterError {
  return new ExporterError('invalid-parameter', message);
}

export function invalidData(message: string): ExporterError {
  return new ExporterError('invalid-data', message);
}
