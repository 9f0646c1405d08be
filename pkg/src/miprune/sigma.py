"""Data-driven RBF kernel-width selection.

The layer-level width comes from Scott's rule; per-neuron widths are
chosen by maximizing kernel alignment between each neuron's candidate
Gram matrix and the layer Gram matrix, then smoothed across mini-batches
with an exponential moving average.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError, InvalidParameterError, MipruneWarning
from .gram import ActivationMatrix, NormalizedGram, _gram_from_sq_dists, _sq_dists, rbf_gram

__all__ = [
    "SigmaSchedule",
    "scott_sigma",
    "alignment",
    "default_sigma_grid",
    "tune_neuron_sigma",
    "ema_update",
    "tune_all",
]


@dataclass(frozen=True, eq=False)
class SigmaSchedule:
    """Kernel widths for one layer after tuning.

    Attributes:
        layer_sigma: Scott's-rule width of the full layer (d = K), from
            the last mini-batch processed.
        neuron_sigmas: float64 array of K per-neuron widths, all > 0.
        gamma: Scott's-rule scale factor used.
        beta: EMA smoothing weight used across batches.
        alpha: entropy order the schedule is intended for downstream.
        batch_size: mini-batch size the tuner ran with.
        grid: the candidate-width grid of the last batch, ascending.
    """

    layer_sigma: float
    neuron_sigmas: np.ndarray
    gamma: float = 1.0
    beta: float = 0.9
    alpha: float = 1.01
    batch_size: int = 100
    grid: np.ndarray | None = None

    def __post_init__(self):
        sig = np.asarray(self.neuron_sigmas, dtype=np.float64)
        if sig.ndim != 1 or sig.size == 0:
            raise InvalidDataError("neuron_sigmas must be a non-empty 1-D array")
        if not np.all(np.isfinite(sig)) or np.any(sig <= 0.0):
            raise InvalidDataError("neuron_sigmas must be positive and finite")
        if not (np.isfinite(self.layer_sigma) and self.layer_sigma > 0.0):
            raise InvalidDataError(
                f"layer_sigma must be positive, got {self.layer_sigma}"
            )
        object.__setattr__(self, "neuron_sigmas", sig)

    @property
    def n_neurons(self) -> int:
        return self.neuron_sigmas.size

    def sigma_for(self, k: int) -> float:
        if not 0 <= k < self.n_neurons:
            raise InvalidParameterError(
                f"no sigma for neuron {k}; schedule covers {self.n_neurons}"
            )
        return float(self.neuron_sigmas[k])


def scott_sigma(n_samples: int, dim: int, gamma: float = 1.0) -> float:
    """Scott's-rule kernel width: gamma * N ** (-1 / (4 + d)).

    Args:
        n_samples: number of samples N, >= 1.
        dim: data dimensionality d, >= 1.
        gamma: positive scale factor.
    """
    if int(n_samples) < 1 or n_samples != int(n_samples):
        raise InvalidParameterError(f"n_samples must be a positive int, got {n_samples}")
    if int(dim) < 1 or dim != int(dim):
        raise InvalidParameterError(f"dim must be a positive int, got {dim}")
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    return gamma * float(n_samples) ** (-1.0 / (4.0 + float(dim)))


def alignment(k1, k2) -> float:
    """Kernel alignment <K1, K2>_F / (||K1||_F * ||K2||_F), in [0, 1]
    for entrywise-nonnegative kernels.

    Accepts NormalizedGram instances or plain symmetric arrays of equal
    shape; the value is invariant to positive rescaling of either input.
    """
    a = k1.matrix if isinstance(k1, NormalizedGram) else np.asarray(k1, dtype=np.float64)
    b = k2.matrix if isinstance(k2, NormalizedGram) else np.asarray(k2, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidDataError(f"kernel shapes differ: {a.shape} vs {b.shape}")
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom <= 0.0 or not np.isfinite(denom):
        raise InvalidDataError("kernel alignment undefined for zero-norm input")
    return float(np.sum(a * b) / denom)


def default_sigma_grid(
    n_samples: int,
    gamma: float = 1.0,
    n_points: int = 50,
    span: tuple[float, float] = (0.1, 10.0),
) -> np.ndarray:
    """Log-spaced candidate widths bracketing the 1-D Scott's-rule value.

    The grid runs from span[0] to span[1] times scott_sigma(N, 1, gamma),
    ascending, with ``n_points`` entries.
    """
    if n_points < 2:
        raise InvalidParameterError(f"grid needs at least 2 points, got {n_points}")
    lo, hi = float(span[0]), float(span[1])
    if not (0.0 < lo < hi) or not np.isfinite(hi):
        raise InvalidParameterError(f"invalid grid span {span}")
    base = scott_sigma(n_samples, 1, gamma)
    return np.geomspace(lo * base, hi * base, int(n_points))


def tune_neuron_sigma(
    column: np.ndarray,
    layer_gram: NormalizedGram,
    grid: np.ndarray,
    warn_endpoint: bool = True,
) -> float:
    """Width maximizing alignment between a neuron's Gram and the layer's.

    Scans ``grid`` in ascending order and returns the first maximizer, so
    ties resolve to the smaller width. Optionally warns when the argmax
    lands on a grid endpoint (the grid likely does not bracket the optimum).
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("sigma grid must be a non-empty 1-D array")
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0.0):
        raise InvalidParameterError("sigma grid must be positive and finite")
    if np.any(np.diff(grid) <= 0.0):
        raise InvalidParameterError("sigma grid must be strictly ascending")
    column = np.asarray(column, dtype=np.float64)
    if column.ndim != 1:
        raise InvalidDataError(f"neuron column must be 1-D, got shape {column.shape}")
    if column.shape[0] != layer_gram.n_samples:
        raise InvalidDataError(
            f"column has {column.shape[0]} samples, layer Gram {layer_gram.n_samples}"
        )
    d2 = _sq_dists(column)
    scores = np.array([
        alignment(_gram_from_sq_dists(d2, s), layer_gram.matrix) for s in grid
    ])
    best = int(np.argmax(scores))
    if warn_endpoint and best in (0, grid.size - 1):
        warnings.warn(
            f"alignment argmax hit grid endpoint sigma={grid[best]:.4g}; "
            "widen the grid span",
            MipruneWarning,
            stacklevel=2,
        )
    return float(grid[best])


def ema_update(prev: np.ndarray, current: np.ndarray, beta: float) -> np.ndarray:
    """Exponential moving average beta * prev + (1 - beta) * current."""
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameterError(f"beta must be in [0, 1], got {beta}")
    prev = np.asarray(prev, dtype=np.float64)
    current = np.asarray(current, dtype=np.float64)
    if prev.shape != current.shape:
        raise InvalidDataError(f"shape mismatch: {prev.shape} vs {current.shape}")
    return beta * prev + (1.0 - beta) * current


def tune_all(
    activations: ActivationMatrix,
    gamma: float = 1.0,
    beta: float = 0.9,
    batch_size: int = 100,
    seed: int = 0,
    alpha: float = 1.01,
    n_grid: int = 50,
    grid_span: tuple[float, float] = (0.1, 10.0),
) -> SigmaSchedule:
    """Tune per-neuron kernel widths over shuffled mini-batches.

    Rows are shuffled once with the given seed and split into consecutive
    full batches (a trailing partial batch is dropped). For each batch the
    layer Gram uses Scott's rule at d = K, each neuron's width is chosen by
    alignment over a fresh grid, and widths are folded across batches with
    an EMA: the first batch initializes, later batches contribute with
    weight (1 - beta).

    If N < batch_size the whole matrix is used as a single batch and a
    warning is emitted.
    """
    if int(batch_size) < 2:
        raise InvalidParameterError(f"batch_size must be >= 2, got {batch_size}")
    batch_size = int(batch_size)
    x = activations.values
    n, k = x.shape
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    if n < batch_size:
        warnings.warn(
            f"only {n} samples for batch_size {batch_size}; using a single batch",
            MipruneWarning,
            stacklevel=2,
        )
        batches = [perm]
    else:
        n_batches = n // batch_size
        batches = [
            perm[i * batch_size : (i + 1) * batch_size] for i in range(n_batches)
        ]

    sigmas = None
    layer_sigma = None
    grid = None
    endpoint_hits = 0
    for idx in batches:
        rows = x[idx]
        nb = rows.shape[0]
        layer_sigma = scott_sigma(nb, k, gamma)
        layer_gram = rbf_gram(rows, layer_sigma)
        grid = default_sigma_grid(nb, gamma, n_points=n_grid, span=grid_span)
        batch_sigmas = np.empty(k)
        for j in range(k):
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", MipruneWarning)
                batch_sigmas[j] = tune_neuron_sigma(rows[:, j], layer_gram, grid)
            endpoint_hits += sum(
                1 for w in caught if issubclass(w.category, MipruneWarning)
            )
        if sigmas is None:
            sigmas = batch_sigmas
        else:
            sigmas = ema_update(sigmas, batch_sigmas, beta)

    if endpoint_hits:
        warnings.warn(
            f"{endpoint_hits} neuron-batch alignment argmaxes hit a grid "
            "endpoint; consider widening grid_span",
            MipruneWarning,
            stacklevel=2,
        )
    return SigmaSchedule(
        layer_sigma=layer_sigma,
        neuron_sigmas=sigmas,
        gamma=float(gamma),
        beta=float(beta),
        alpha=float(alpha),
        batch_size=batch_size,
        grid=grid,
    )
