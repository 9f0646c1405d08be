"""Cost and quality metrics: FLOPs accounting, KL output drift, accuracy.

A fully connected layer mapping d_in to d_out costs 2 * d_in * d_out
FLOPs per sample (multiply + accumulate), so a two-layer FFN block with
hidden width K costs 2 * d_in * K + 2 * K * d_out — linear in K, which
is what makes width pruning translate directly into FLOPs savings.
"""

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError, InvalidParameterError
from .pairwise import PruneMask

__all__ = [
    "FfnShape",
    "FlopsReport",
    "ffn_flops",
    "relative_flops",
    "target_keep_for_flops",
    "kl_proxy",
    "accuracy",
    "REPORT_COLUMNS",
    "format_report",
    "write_report",
]


@dataclass(frozen=True)
class FfnShape:
    """Dimensions of one two-layer FFN block: d_in -> hidden -> d_out."""

    d_in: int
    hidden: int
    d_out: int

    def __post_init__(self):
        for name in ("d_in", "hidden", "d_out"):
            v = getattr(self, name)
            if int(v) < 1 or v != int(v):
                raise InvalidParameterError(f"{name} must be a positive int, got {v}")


@dataclass(frozen=True)
class FlopsReport:
    """Per-layer and total FLOPs before/after pruning.

    Attributes:
        original: total FLOPs of the unpruned scope.
        pruned: total FLOPs with masks applied.
        relative: pruned / original, in (0, 1].
        per_layer: list of (layer_index, original, pruned, relative).
        extra_flops: unprunable FLOPs included in the scope (0 means the
            report covers FFN blocks only).
    """

    original: float
    pruned: float
    relative: float
    per_layer: list
    extra_flops: float = 0.0


def ffn_flops(shape: FfnShape, hidden: int | None = None) -> int:
    """FLOPs of one FFN block, optionally at a reduced hidden width."""
    h = shape.hidden if hidden is None else int(hidden)
    if not 0 <= h <= shape.hidden:
        raise InvalidParameterError(
            f"hidden width {h} outside [0, {shape.hidden}]"
        )
    return 2 * shape.d_in * h + 2 * h * shape.d_out


def relative_flops(
    masks: list[PruneMask],
    shapes: list[FfnShape],
    extra_flops: float = 0.0,
) -> FlopsReport:
    """Relative FLOPs of a set of pruned FFN blocks.

    Args:
        masks: one PruneMask per block; mask length must equal the
            block's hidden width.
        shapes: matching FfnShape per block.
        extra_flops: FLOPs of surrounding unprunable computation to fold
            into both numerator and denominator (whole-model scope);
            leave 0 for FFN-only scope.
    """
    if len(masks) != len(shapes):
        raise InvalidDataError(
            f"{len(masks)} masks but {len(shapes)} layer shapes"
        )
    if not masks:
        raise InvalidParameterError("need at least one layer")
    extra_flops = float(extra_flops)
    if extra_flops < 0.0 or not np.isfinite(extra_flops):
        raise InvalidParameterError(f"extra_flops must be >= 0, got {extra_flops}")
    per_layer = []
    total_orig = extra_flops
    total_pruned = extra_flops
    for i, (mask, shape) in enumerate(zip(masks, shapes)):
        if mask.n_neurons != shape.hidden:
            raise InvalidDataError(
                f"layer {i}: mask covers {mask.n_neurons} neurons, "
                f"shape says {shape.hidden}"
            )
        orig = ffn_flops(shape)
        pruned = ffn_flops(shape, hidden=mask.n_kept)
        per_layer.append((i, orig, pruned, pruned / orig))
        total_orig += orig
        total_pruned += pruned
    return FlopsReport(
        original=float(total_orig),
        pruned=float(total_pruned),
        relative=float(total_pruned / total_orig),
        per_layer=per_layer,
        extra_flops=extra_flops,
    )


def target_keep_for_flops(fraction: float, hidden: int) -> int:
    """Survivor count hitting a relative-FLOPs target for one block.

    Block FLOPs are linear in the hidden width, so the width scales by
    the same fraction; the result is rounded to the nearest integer and
    clamped to [1, hidden].
    """
    fraction = float(fraction)
    if not 0.0 < fraction <= 1.0:
        raise InvalidParameterError(f"fraction must be in (0, 1], got {fraction}")
    if int(hidden) < 1:
        raise InvalidParameterError(f"hidden must be >= 1, got {hidden}")
    return int(min(max(1, np.rint(fraction * hidden)), hidden))


def kl_proxy(p: np.ndarray, q: np.ndarray, floor: float = 1e-12) -> float:
    """Mean per-sample KL divergence KL(p || q) in bits.

    Args:
        p: reference softmax rows, shape (N, C); entries >= 0, rows sum
            to 1 within 1e-6.
        q: comparison softmax rows, same shape; entries are floored at
            ``floor`` before the log to keep the value finite.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.ndim != 2 or p.shape != q.shape:
        raise InvalidDataError(
            f"probability arrays must share a 2-D shape: {p.shape} vs {q.shape}"
        )
    if p.shape[0] == 0:
        raise InvalidDataError("need at least one sample")
    for name, arr in (("p", p), ("q", q)):
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0:
            raise InvalidDataError(f"{name} rows must be finite and nonnegative")
        if np.abs(arr.sum(axis=1) - 1.0).max() > 1e-6:
            raise InvalidDataError(f"{name} rows must sum to 1 within 1e-6")
    q = np.maximum(q, floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log2(p / q), 0.0)
    return float(terms.sum(axis=1).mean())


def accuracy(outputs: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose argmax matches the integer label."""
    outputs = np.asarray(outputs)
    labels = np.asarray(labels)
    if outputs.ndim != 2 or labels.ndim != 1:
        raise InvalidDataError("outputs must be (N, C) and labels (N,)")
    if outputs.shape[0] != labels.shape[0]:
        raise InvalidDataError(
            f"{outputs.shape[0]} outputs for {labels.shape[0]} labels"
        )
    if outputs.shape[0] == 0:
        raise InvalidDataError("need at least one sample")
    return float(np.mean(np.argmax(outputs, axis=1) == labels))


REPORT_COLUMNS = (
    "method",
    "seed",
    "relative_flops",
    "accuracy",
    "kl_proxy",
    "alpha",
    "sample_fraction",
    "threshold",
)


def format_report(rows: list[dict]) -> str:
    """Plain-text table of metric rows, column-aligned."""
    cells = [
        [
            ("" if row.get(c) is None else
             f"{row[c]:.6g}" if isinstance(row.get(c), float) else str(row[c]))
            for c in REPORT_COLUMNS
        ]
        for row in rows
    ]
    widths = [
        max(len(c), *(len(r[i]) for r in cells)) if cells else len(c)
        for i, c in enumerate(REPORT_COLUMNS)
    ]
    lines = ["  ".join(c.ljust(w) for c, w in zip(REPORT_COLUMNS, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def write_report(path: str, rows: list[dict], append: bool = False) -> None:
    """Write metric rows as CSV, atomically unless appending.

    Unknown keys are rejected so downstream parsers see a fixed schema;
    missing keys produce empty cells.
    """
    for row in rows:
        unknown = set(row) - set(REPORT_COLUMNS)
        if unknown:
            raise InvalidParameterError(f"unknown report columns: {sorted(unknown)}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS)
    if not append or not os.path.exists(path):
        writer.writeheader()
    writer.writerows(rows)
    if append:
        with open(path, "a", newline="") as fh:
            fh.write(buf.getvalue())
        return
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)
