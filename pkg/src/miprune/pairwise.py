"""Iterative pairwise redundancy pruning and simple baselines.

The pairwise pruner repeatedly samples two surviving neurons uniformly
at random and drops the second-drawn one whenever the pair's dependency
measure (MI in bits, or |Pearson correlation| for the baseline) reaches
the threshold. The surviving set is kept in ascending index order and
each iteration consumes exactly one ``rng.choice(n_alive, size=2,
replace=False)`` draw, which makes runs replayable from the seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .entropy import mutual_information
from .errors import InvalidDataError, InvalidParameterError
from .gram import ActivationMatrix
from .sigma import SigmaSchedule

__all__ = [
    "PruneMask",
    "default_max_itr",
    "prune_pairwise",
    "prune_pcc",
    "prune_random",
    "prune_weight_magnitude",
]

METHODS = ("pairwise_mi", "cluster_mi", "random", "weight_magnitude", "pairwise_pcc")


@dataclass(frozen=True, eq=False)
class PruneMask:
    """Keep/drop decision per neuron of one layer.

    Attributes:
        keep: boolean array of length K with at least one True.
        method: one of METHODS.
        seed: RNG seed that produced the mask, when randomness was involved.
        threshold: dependency threshold used by pairwise methods
            (bits for MI, |rho| for correlation).
        target_keep: requested survivor count for budgeted methods.
        iterations_used: pair draws consumed by the pairwise methods.
    """

    keep: np.ndarray
    method: str
    seed: int | None = None
    threshold: float | None = None
    target_keep: int | None = None
    iterations_used: int | None = None

    def __post_init__(self):
        keep = np.asarray(self.keep, dtype=bool)
        if keep.ndim != 1 or keep.size == 0:
            raise InvalidDataError("keep mask must be a non-empty 1-D array")
        if not keep.any():
            raise InvalidDataError("mask must keep at least one neuron")
        if self.method not in METHODS:
            raise InvalidParameterError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        object.__setattr__(self, "keep", keep)

    @property
    def n_neurons(self) -> int:
        return self.keep.size

    @property
    def n_kept(self) -> int:
        return int(self.keep.sum())

    @property
    def kept_indices(self) -> np.ndarray:
        return np.flatnonzero(self.keep)


def default_max_itr(n_neurons: int) -> int:
    """Default pair-sampling budget: ceil(10 * K * ln K)."""
    if n_neurons < 2:
        raise InvalidParameterError(f"need at least 2 neurons, got {n_neurons}")
    return int(math.ceil(10.0 * n_neurons * math.log(n_neurons)))


def _pairwise_drop(measure, k_total, threshold, max_itr, seed, method):
    """Shared sampling loop: drop the second-drawn neuron of any pair
    whose measure meets the threshold; never drop the last survivor."""
    if max_itr is None:
        max_itr = default_max_itr(k_total)
    max_itr = int(max_itr)
    if max_itr < 1:
        raise InvalidParameterError(f"max_itr must be >= 1, got {max_itr}")
    rng = np.random.default_rng(seed)
    alive = list(range(k_total))  # always ascending
    keep = np.ones(k_total, dtype=bool)
    used = 0
    for _ in range(max_itr):
        if len(alive) < 2:
            break
        pos = rng.choice(len(alive), size=2, replace=False)
        k, l = alive[int(pos[0])], alive[int(pos[1])]
        used += 1
        if measure(k, l) >= threshold:
            alive.remove(l)
            keep[l] = False
    return PruneMask(
        keep=keep,
        method=method,
        seed=seed,
        threshold=float(threshold),
        iterations_used=used,
    )


def prune_pairwise(
    activations: ActivationMatrix,
    sigmas,
    threshold_bits: float,
    alpha: float = 1.01,
    max_itr: int | None = None,
    seed: int = 0,
) -> PruneMask:
    """Pairwise MI pruning of one layer.

    Pair MI values are memoized, so each distinct surviving pair costs at
    most one estimate regardless of how often it is redrawn.

    Args:
        activations: N x K activation matrix.
        sigmas: SigmaSchedule or length-K array of per-neuron widths.
        threshold_bits: drop threshold T_r in bits, > 0.
        alpha: entropy order.
        max_itr: pair-sampling budget; defaults to ceil(10 * K * ln K).
        seed: RNG seed for pair sampling.
    """
    threshold_bits = float(threshold_bits)
    if not np.isfinite(threshold_bits) or threshold_bits <= 0.0:
        raise InvalidParameterError(
            f"threshold_bits must be positive, got {threshold_bits}"
        )
    k_total = activations.n_neurons
    if isinstance(sigmas, SigmaSchedule):
        sig = sigmas.neuron_sigmas
    else:
        sig = np.asarray(sigmas, dtype=np.float64)
    if sig.size != k_total:
        raise InvalidParameterError(
            f"need one sigma per neuron: got {sig.size} for K={k_total}"
        )
    cache: dict[tuple[int, int], float] = {}

    def measure(k: int, l: int) -> float:
        key = (k, l) if k < l else (l, k)
        if key not in cache:
            cache[key] = mutual_information(
                activations.column(key[0]),
                activations.column(key[1]),
                sig[key[0]],
                sig[key[1]],
                alpha,
            )
        return cache[key]

    return _pairwise_drop(measure, k_total, threshold_bits, max_itr, seed, "pairwise_mi")


def prune_pcc(
    activations: ActivationMatrix,
    threshold: float,
    max_itr: int | None = None,
    seed: int = 0,
) -> PruneMask:
    """Correlation baseline: same loop as prune_pairwise with
    |Pearson rho| as the measure.

    Correlations involving an exactly constant column are defined as 0,
    so such neurons are never dropped for redundancy.
    """
    threshold = float(threshold)
    if not 0.0 < threshold < 1.0:
        raise InvalidParameterError(
            f"correlation threshold must be in (0, 1), got {threshold}"
        )
    x = activations.values
    sd = x.std(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(x, rowvar=False)
    corr = np.abs(np.nan_to_num(corr, nan=0.0))
    degenerate = sd == 0.0
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0

    return _pairwise_drop(
        lambda k, l: corr[k, l],
        activations.n_neurons,
        threshold,
        max_itr,
        seed,
        "pairwise_pcc",
    )


def prune_random(n_neurons: int, n_keep: int, seed: int = 0) -> PruneMask:
    """Keep a uniform random subset of ``n_keep`` neurons."""
    if n_neurons < 2:
        raise InvalidParameterError(f"need at least 2 neurons, got {n_neurons}")
    if not 1 <= n_keep <= n_neurons:
        raise InvalidParameterError(
            f"n_keep must be in [1, {n_neurons}], got {n_keep}"
        )
    rng = np.random.default_rng(seed)
    kept = rng.choice(n_neurons, size=n_keep, replace=False)
    keep = np.zeros(n_neurons, dtype=bool)
    keep[kept] = True
    return PruneMask(keep=keep, method="random", seed=seed, target_keep=int(n_keep))


def prune_weight_magnitude(weights: np.ndarray, n_keep: int) -> PruneMask:
    """Keep the ``n_keep`` neurons with the largest outgoing L1 norm.

    Args:
        weights: (K, d_out) outgoing weight matrix, one row per neuron.
        n_keep: survivor count, in [1, K].
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2:
        raise InvalidDataError(f"weights must be 2-D, got shape {w.shape}")
    k_total = w.shape[0]
    if k_total < 2:
        raise InvalidParameterError(f"need at least 2 neurons, got {k_total}")
    if not 1 <= n_keep <= k_total:
        raise InvalidParameterError(f"n_keep must be in [1, {k_total}], got {n_keep}")
    if not np.all(np.isfinite(w)):
        raise InvalidDataError("weights contain NaN or Inf entries")
    norms = np.abs(w).sum(axis=1)
    # stable sort: ties keep the lower neuron index
    order = np.argsort(-norms, kind="stable")
    keep = np.zeros(k_total, dtype=bool)
    keep[order[:n_keep]] = True
    return PruneMask(
        keep=keep, method="weight_magnitude", seed=None, target_keep=int(n_keep)
    )
