"""On-disk interchange formats.

Activation matrices travel in a small binary container ("AMX"): the
magic bytes ``AMX1``, two little-endian uint32 dimensions N and K, the
N*K float32 payload in row-major order, and an optional uint32-length-
prefixed UTF-8 JSON metadata block. Masks, kernel-width schedules, and
labels are plain JSON. All writers are atomic (temp file + rename).
"""

import json
import os
import struct

import numpy as np

from ._version import __version__
from .errors import InvalidDataError, InvalidParameterError
from .gram import ActivationMatrix
from .pairwise import METHODS, PruneMask
from .sigma import SigmaSchedule
from .toy import ToyFFN

__all__ = [
    "AMX_MAGIC",
    "write_amx",
    "read_amx",
    "read_activations",
    "write_mask",
    "read_mask",
    "write_sigmas",
    "read_sigmas",
    "write_labels",
    "read_labels",
    "write_toy_model",
    "read_toy_model",
]

AMX_MAGIC = b"AMX1"
_U32 = struct.Struct("<I")


def _atomic_write(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_amx(path: str, values: np.ndarray, metadata: dict | None = None) -> None:
    """Write a 2-D array as an AMX file (float32 payload).

    Args:
        path: destination; written atomically.
        values: (N, K) array, finite; cast to float32.
        metadata: optional JSON-serializable dict stored after the payload.
    """
    values = np.asarray(values)
    if values.ndim != 2:
        raise InvalidDataError(f"AMX payload must be 2-D, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InvalidDataError("AMX payload contains NaN or Inf")
    n, k = values.shape
    payload = np.ascontiguousarray(values, dtype="<f4").tobytes()
    parts = [AMX_MAGIC, _U32.pack(n), _U32.pack(k), payload]
    if metadata is not None:
        blob = json.dumps(metadata, sort_keys=True).encode("utf-8")
        parts += [_U32.pack(len(blob)), blob]
    _atomic_write(path, b"".join(parts))


def read_amx(path: str) -> tuple[np.ndarray, dict | None]:
    """Read an AMX file; returns the float32 values and the metadata.

    The declared dimensions must match the payload exactly and any
    metadata block must consume the rest of the file.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InvalidDataError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 12 or raw[:4] != AMX_MAGIC:
        raise InvalidDataError(f"{path}: not an AMX file (bad magic or header)")
    n = _U32.unpack_from(raw, 4)[0]
    k = _U32.unpack_from(raw, 8)[0]
    body = raw[12:]
    need = n * k * 4
    if len(body) < need:
        raise InvalidDataError(
            f"{path}: payload truncated ({len(body)} bytes for {n}x{k})"
        )
    values = np.frombuffer(body[:need], dtype="<f4").reshape(n, k).copy()
    rest = body[need:]
    metadata = None
    if rest:
        if len(rest) < 4:
            raise InvalidDataError(f"{path}: dangling bytes after payload")
        blob_len = _U32.unpack_from(rest, 0)[0]
        if len(rest) != 4 + blob_len:
            raise InvalidDataError(
                f"{path}: metadata length {blob_len} does not match file size"
            )
        try:
            metadata = json.loads(rest[4:].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InvalidDataError(f"{path}: bad metadata block: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise InvalidDataError(f"{path}: payload contains NaN or Inf")
    return values, metadata


def read_activations(path: str) -> ActivationMatrix:
    """Read an AMX file as an ActivationMatrix, honoring its metadata."""
    values, meta = read_amx(path)
    meta = meta or {}
    return ActivationMatrix(
        values=values.astype(np.float64),
        layer_id=str(meta.get("layer_id", "layer0")),
        sample_fraction=float(meta.get("sample_fraction", 1.0)),
    )


def _write_json(path: str, obj) -> None:
    _atomic_write(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            return json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise InvalidDataError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidDataError(f"{path}: invalid JSON: {exc}") from exc


def write_mask(
    path: str,
    mask: PruneMask,
    layer_id: str,
    relative_flops: float,
) -> None:
    """Write a PruneMask as a mask JSON file."""
    doc = {
        "layer_id": str(layer_id),
        "K": mask.n_neurons,
        "keep": [int(v) for v in mask.keep],
        "method": mask.method,
        "seed": mask.seed,
        "relative_flops": float(relative_flops),
        "toolkit_version": __version__,
    }
    if mask.threshold is not None:
        key = "threshold_bits" if mask.method == "pairwise_mi" else "threshold_pcc"
        doc[key] = mask.threshold
    if mask.target_keep is not None:
        doc["target_keep"] = mask.target_keep
    _write_json(path, doc)


def read_mask(path: str) -> tuple[PruneMask, dict]:
    """Read a mask JSON file; returns the PruneMask and the raw document."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise InvalidDataError(f"{path}: mask file must contain a JSON object")
    for field in ("layer_id", "K", "keep", "method"):
        if field not in doc:
            raise InvalidDataError(f"{path}: mask file missing field {field!r}")
    keep = doc["keep"]
    if (
        not isinstance(keep, list)
        or len(keep) != int(doc["K"])
        or any(v not in (0, 1) for v in keep)
    ):
        raise InvalidDataError(f"{path}: keep must list K entries of 0 or 1")
    if doc["method"] not in METHODS:
        raise InvalidDataError(f"{path}: unknown method {doc['method']!r}")
    threshold = doc.get("threshold_bits", doc.get("threshold_pcc"))
    mask = PruneMask(
        keep=np.asarray(keep, dtype=bool),
        method=doc["method"],
        seed=doc.get("seed"),
        threshold=None if threshold is None else float(threshold),
        target_keep=None if doc.get("target_keep") is None else int(doc["target_keep"]),
    )
    return mask, doc


def write_sigmas(path: str, schedule: SigmaSchedule) -> None:
    """Write a SigmaSchedule as JSON."""
    _write_json(
        path,
        {
            "layer_sigma": schedule.layer_sigma,
            "neuron_sigmas": [float(s) for s in schedule.neuron_sigmas],
            "gamma": schedule.gamma,
            "beta": schedule.beta,
            "alpha": schedule.alpha,
            "batch_size": schedule.batch_size,
            "grid": None if schedule.grid is None else [float(s) for s in schedule.grid],
            "toolkit_version": __version__,
        },
    )


def read_sigmas(path: str) -> SigmaSchedule:
    doc = _read_json(path)
    if not isinstance(doc, dict) or "neuron_sigmas" not in doc:
        raise InvalidDataError(f"{path}: not a sigma schedule file")
    try:
        return SigmaSchedule(
            layer_sigma=float(doc.get("layer_sigma", 1.0)),
            neuron_sigmas=np.asarray(doc["neuron_sigmas"], dtype=np.float64),
            gamma=float(doc.get("gamma", 1.0)),
            beta=float(doc.get("beta", 0.9)),
            alpha=float(doc.get("alpha", 1.01)),
            batch_size=int(doc.get("batch_size", 100)),
            grid=None if doc.get("grid") is None else np.asarray(doc["grid"]),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidDataError(f"{path}: malformed sigma schedule: {exc}") from exc


def write_labels(path: str, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InvalidDataError(f"labels must be 1-D, got shape {labels.shape}")
    _write_json(path, {"labels": [int(v) for v in labels]})


def read_labels(path: str) -> np.ndarray:
    doc = _read_json(path)
    if not isinstance(doc, dict) or "labels" not in doc or not isinstance(
        doc["labels"], list
    ):
        raise InvalidDataError(f"{path}: not a labels file")
    return np.asarray(doc["labels"], dtype=np.int64)


def write_toy_model(path: str, model: ToyFFN, extra_metadata: dict | None = None) -> None:
    """Checkpoint a ToyFFN into the AMX container (1 x P parameter row)."""
    shape = model.shape
    meta = {
        "kind": "toy_ffn",
        "d_in": shape.d_in,
        "hidden": shape.hidden,
        "n_classes": shape.d_out,
    }
    if extra_metadata:
        overlap = set(extra_metadata) & set(meta)
        if overlap:
            raise InvalidParameterError(
                f"extra metadata may not override {sorted(overlap)}"
            )
        meta.update(extra_metadata)
    write_amx(path, model.flat_params()[None, :], metadata=meta)


def read_toy_model(path: str) -> ToyFFN:
    values, meta = read_amx(path)
    if not meta or meta.get("kind") != "toy_ffn":
        raise InvalidDataError(f"{path}: not a toy model checkpoint")
    try:
        d_in, hidden, n_classes = (
            int(meta["d_in"]),
            int(meta["hidden"]),
            int(meta["n_classes"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDataError(f"{path}: malformed checkpoint metadata") from exc
    return ToyFFN.from_flat(
        values.astype(np.float64).ravel(), d_in, hidden, n_classes
    )
