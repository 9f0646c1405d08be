"""Cluster-based pruning: MI -> distance -> MDS -> k-means -> representatives.

Neurons with high mutual dependency land close together under the
distance map d = A * exp(-I); classical MDS embeds that geometry, a
seeded k-means groups the embedded neurons into the survivor budget,
and the member closest to each centroid survives. Because k-means is
seed-sensitive, many seeds are tried and the mask whose masked network
output diverges least (mean per-sample KL) from the unpruned output wins.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .entropy import MIMatrix
from .errors import InvalidDataError, InvalidParameterError
from .metrics import kl_proxy
from .pairwise import PruneMask

__all__ = [
    "MDSEmbedding",
    "mi_to_distance",
    "classical_mds",
    "cluster_neurons",
    "select_representatives",
    "select_best_seed",
    "cluster_prune",
]


def mi_to_distance(mi: MIMatrix, scale: float = 1.0) -> np.ndarray:
    """Map MI to a dissimilarity: d_kl = scale * exp(-I_kl), diagonal 0.

    Monotone decreasing in MI, so highly dependent neurons come out
    close; with nonnegative MI the off-diagonal range is (0, scale].
    """
    scale = float(scale)
    if not np.isfinite(scale) or scale <= 0.0:
        raise InvalidParameterError(f"scale must be positive, got {scale}")
    if not mi.is_complete:
        raise InvalidDataError("distance map needs a fully computed MI matrix")
    d = scale * np.exp(-mi.values)
    np.fill_diagonal(d, 0.0)
    return d


@dataclass(frozen=True, eq=False)
class MDSEmbedding:
    """Classical-MDS coordinates for K points.

    Attributes:
        coords: (K, m) float64 coordinate array.
        eigen_spectrum: the retained (positive) eigenvalues, descending.
    """

    coords: np.ndarray
    eigen_spectrum: np.ndarray

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def n_dims(self) -> int:
        return self.coords.shape[1]


def classical_mds(distances: np.ndarray, n_dims: int) -> MDSEmbedding:
    """Classical (Torgerson) MDS of a symmetric distance matrix.

    Double-centers the squared distances, B = -J D^2 J / 2 with
    J = I - 11^T/K, eigendecomposes B, and keeps the top ``n_dims``
    positive eigenpairs; coordinates are eigenvectors scaled by the
    square roots of their eigenvalues. Each coordinate axis is sign-fixed
    so its largest-magnitude entry is positive, which makes the embedding
    deterministic. If fewer than ``n_dims`` positive eigenvalues exist the
    dimensionality is reduced with a warning.
    """
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidDataError(f"distance matrix must be square, got {d.shape}")
    k = d.shape[0]
    if k < 2:
        raise InvalidDataError("need at least 2 points")
    if not np.all(np.isfinite(d)):
        raise InvalidDataError("distance matrix contains NaN or Inf")
    if np.abs(d - d.T).max() > 1e-9 * max(np.abs(d).max(), 1.0):
        raise InvalidDataError("distance matrix is not symmetric")
    if np.abs(np.diag(d)).max() > 1e-12:
        raise InvalidDataError("distance matrix diagonal must be zero")
    if d.min() < 0.0:
        raise InvalidDataError("distances must be nonnegative")
    n_dims = int(n_dims)
    if n_dims < 1:
        raise InvalidParameterError(f"n_dims must be >= 1, got {n_dims}")

    j = np.eye(k) - np.ones((k, k)) / k
    b = -0.5 * j @ (d * d) @ j
    lam, vec = np.linalg.eigh(b)
    lam, vec = lam[::-1], vec[:, ::-1]
    n_pos = int(np.sum(lam > 0.0))
    if n_pos == 0:
        # all points coincide; a single zero coordinate keeps downstream
        # clustering well-defined
        warnings.warn(
            "no positive MDS eigenvalues; returning a degenerate embedding",
            stacklevel=2,
        )
        return MDSEmbedding(coords=np.zeros((k, 1)), eigen_spectrum=np.zeros(1))
    m_eff = min(n_dims, n_pos)
    if m_eff < n_dims:
        warnings.warn(
            f"only {n_pos} positive MDS eigenvalues; reducing dimension "
            f"from {n_dims} to {m_eff}",
            stacklevel=2,
        )
    lam = lam[:m_eff]
    coords = vec[:, :m_eff] * np.sqrt(lam)
    for axis in range(m_eff):
        col = coords[:, axis]
        if col[np.argmax(np.abs(col))] < 0.0:
            coords[:, axis] = -col
    return MDSEmbedding(coords=coords, eigen_spectrum=lam.copy())


def _kmeans_pp_init(x: np.ndarray, n_clusters: int, rng) -> np.ndarray:
    """k-means++ seeding: first center uniform, the rest proportional to
    squared distance to the nearest chosen center."""
    n = x.shape[0]
    centers = np.empty((n_clusters, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, n_clusters):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # all mass on chosen centers
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = x[idx]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def cluster_neurons(
    embedding: MDSEmbedding,
    n_clusters: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-4,
) -> np.ndarray:
    """Seeded k-means over the embedded neurons.

    k-means++ initialization followed by Lloyd iterations, at most
    ``max_iter``, stopping early when the relative inertia improvement
    drops to ``tol`` or assignments stop changing. Ties in assignment go
    to the lower cluster index; a cluster that empties is reseeded with
    the point farthest from its previous centroid. ``n_clusters`` equal
    to the number of points short-circuits to the identity assignment
    regardless of seed.

    Returns:
        int array of cluster labels in [0, n_clusters), length K.
    """
    x = embedding.coords
    n = x.shape[0]
    n_clusters = int(n_clusters)
    if not 1 <= n_clusters <= n:
        raise InvalidParameterError(
            f"n_clusters must be in [1, {n}], got {n_clusters}"
        )
    if n_clusters == n:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(x, n_clusters, rng)
    prev_inertia = np.inf
    labels = None
    for _ in range(max_iter):
        # assignment; argmin ties resolve to the lower cluster index
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        for c in range(n_clusters):
            members = labels == c
            if not members.any():
                far = int(np.argmax(d2[np.arange(n), labels]))
                centers[c] = x[far]
                labels[far] = c
                d2[:, c] = ((x - centers[c]) ** 2).sum(axis=1)
                continue
            centers[c] = x[members].mean(axis=0)
        inertia = float(
            (((x - centers[labels]) ** 2).sum(axis=1)).sum()
        )
        if prev_inertia - inertia <= tol * max(prev_inertia, 1e-300):
            break
        prev_inertia = inertia
    return labels


def select_representatives(
    labels: np.ndarray,
    embedding: MDSEmbedding,
    seed: int | None = None,
) -> PruneMask:
    """Keep, per cluster, the member closest to the cluster centroid.

    Distance ties resolve to the lower neuron index. The resulting mask
    keeps exactly one neuron per non-empty cluster.
    """
    labels = np.asarray(labels)
    x = embedding.coords
    if labels.shape[0] != x.shape[0]:
        raise InvalidDataError(
            f"{labels.shape[0]} labels for {x.shape[0]} embedded points"
        )
    keep = np.zeros(x.shape[0], dtype=bool)
    present = np.unique(labels)
    for c in present:
        members = np.flatnonzero(labels == c)
        centroid = x[members].mean(axis=0)
        d2 = ((x[members] - centroid) ** 2).sum(axis=1)
        keep[members[int(np.argmin(d2))]] = True
    return PruneMask(
        keep=keep,
        method="cluster_mi",
        seed=seed,
        target_keep=int(present.size),
    )


def select_best_seed(
    masks: list[PruneMask],
    reference_outputs: np.ndarray,
    masked_outputs: list[np.ndarray],
) -> PruneMask:
    """Choose the candidate mask whose masked outputs stay closest to the
    reference, by mean per-sample KL divergence (bits); ties go to the
    lower seed."""
    if not masks:
        raise InvalidParameterError("need at least one candidate mask")
    if len(masks) != len(masked_outputs):
        raise InvalidDataError(
            f"{len(masks)} masks but {len(masked_outputs)} output sets"
        )
    scores = [kl_proxy(reference_outputs, out) for out in masked_outputs]
    order = sorted(
        range(len(masks)),
        key=lambda i: (scores[i], masks[i].seed if masks[i].seed is not None else i),
    )
    return masks[order[0]]


def cluster_prune(
    mi: MIMatrix,
    n_keep: int,
    n_dims: int | None = None,
    seeds=(0,),
    scale: float = 1.0,
    predict=None,
) -> PruneMask:
    """Full cluster-pruning pipeline for one layer.

    Args:
        mi: complete MI matrix of the layer.
        n_keep: survivor budget K_r (number of clusters).
        n_dims: MDS dimensionality; defaults to min(16, K - 1).
        seeds: k-means seeds to try. With several seeds, ``predict`` is
            required to score candidates.
        scale: constant of the distance map.
        predict: callable mapping a PruneMask (or None for the unpruned
            network) to softmax output rows; used to pick the best seed.

    Returns:
        the winning PruneMask, keeping exactly ``n_keep`` neurons.
    """
    k = mi.n_neurons
    if not 1 <= int(n_keep) <= k:
        raise InvalidParameterError(f"n_keep must be in [1, {k}], got {n_keep}")
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidParameterError("need at least one k-means seed")
    if int(n_keep) == k:
        # every neuron is its own cluster; seed-independent
        return PruneMask(
            keep=np.ones(k, dtype=bool),
            method="cluster_mi",
            seed=seeds[0],
            target_keep=k,
        )
    if len(seeds) > 1 and predict is None:
        raise InvalidParameterError(
            "several seeds need a predict callable to rank the candidates"
        )
    if n_dims is None:
        n_dims = min(16, k - 1)
    emb = classical_mds(mi_to_distance(mi, scale), n_dims)
    masks = [
        select_representatives(cluster_neurons(emb, int(n_keep), s), emb, seed=s)
        for s in seeds
    ]
    if len(masks) == 1:
        return masks[0]
    reference = predict(None)
    outputs = [predict(m) for m in masks]
    return select_best_seed(masks, reference, outputs)
