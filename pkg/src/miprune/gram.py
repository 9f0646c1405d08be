"""Gram-matrix construction and spectral primitives.

Every information estimate in this package is a function of the
eigenvalue spectrum of a trace-normalized RBF Gram matrix, so the
validated containers and the two kernel constructors live here.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InvalidDataError, InvalidParameterError, NumericalError

__all__ = [
    "ActivationMatrix",
    "NormalizedGram",
    "rbf_gram",
    "sym_eigenvalues",
    "hadamard_joint",
]

# Validation tolerances for NormalizedGram; see the dataclass docstring.
_SYM_RTOL = 1e-12
_TRACE_ATOL = 1e-9
_EIG_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class ActivationMatrix:
    """Post-activation outputs of one FC layer, N samples by K neurons.

    Attributes:
        values: float64 array of shape (N, K); N >= 2, K >= 2, all finite.
        layer_id: identifier of the layer the activations came from.
        sample_fraction: fraction of the source dataset these rows
            represent, in (0, 1].
    """

    values: np.ndarray
    layer_id: str = "layer0"
    sample_fraction: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidDataError(
                f"activations must be 2-D, got shape {values.shape}"
            )
        n, k = values.shape
        if n < 2 or k < 2:
            raise InvalidDataError(
                f"need at least 2 samples and 2 neurons, got {n}x{k}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidDataError("activations contain NaN or Inf entries")
        if not 0.0 < float(self.sample_fraction) <= 1.0:
            raise InvalidParameterError(
                f"sample_fraction must be in (0, 1], got {self.sample_fraction}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_fraction", float(self.sample_fraction))

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_neurons(self) -> int:
        return self.values.shape[1]

    def column(self, k: int) -> np.ndarray:
        """Activation vector of neuron ``k`` across all samples."""
        if not 0 <= k < self.n_neurons:
            raise InvalidParameterError(
                f"neuron index {k} out of range [0, {self.n_neurons})"
            )
        return self.values[:, k]


@dataclass(frozen=True, eq=False)
class NormalizedGram:
    """Trace-normalized kernel matrix of shape (N, N).

    Invariants checked on construction: symmetry to 1e-12 relative
    tolerance, unit trace to 1e-9, and (lazily, on first spectrum
    request) eigenvalues in [-1e-9, 1 + 1e-9] before clamping.

    Attributes:
        matrix: the normalized Gram matrix itself.
        sigma: kernel width the matrix was built with; None for joint
            matrices produced by a Hadamard product.
    """

    matrix: np.ndarray
    sigma: float | None = None
    _spectrum_cache: list = field(
        default_factory=list, repr=False, compare=False
    )

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDataError(f"Gram matrix must be square, got {m.shape}")
        if m.shape[0] < 2:
            raise InvalidDataError("Gram matrix needs at least 2 samples")
        if not np.all(np.isfinite(m)):
            raise InvalidDataError("Gram matrix contains NaN or Inf entries")
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.T).max() > _SYM_RTOL * scale:
            raise InvalidDataError("Gram matrix is not symmetric")
        tr = float(np.trace(m))
        if abs(tr - 1.0) > _TRACE_ATOL:
            raise InvalidDataError(f"Gram trace must be 1, got {tr!r}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Clamped, descending eigenvalue spectrum (cached)."""
        if not self._spectrum_cache:
            self._spectrum_cache.append(sym_eigenvalues(self.matrix))
        return self._spectrum_cache[0]


def _sq_dists(x: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between the rows of ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    # pdist is exact for the zero diagonal and symmetric by construction.
    return squareform(pdist(x, metric="sqeuclidean"), checks=False)


def _gram_from_sq_dists(d2: np.ndarray, sigma: float) -> np.ndarray:
    k = np.exp(d2 / (-2.0 * sigma * sigma))
    return k / np.trace(k)


def rbf_gram(x: np.ndarray, sigma: float) -> NormalizedGram:
    """Build the trace-normalized RBF Gram matrix of a sample set.

    Entries before normalization are exp(-||x_i - x_j||^2 / (2 sigma^2));
    normalization divides by the trace, so the diagonal becomes 1/N.

    Args:
        x: samples, shape (N,) for a single neuron or (N, d) for a
            whole layer; N >= 2, finite.
        sigma: kernel width, > 0 and finite.

    Returns:
        NormalizedGram with ``sigma`` recorded.
    """
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma <= 0.0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidDataError(f"samples must be 1-D or 2-D, got shape {x.shape}")
    if x.shape[0] < 2:
        raise InvalidDataError("need at least 2 samples for a Gram matrix")
    if not np.all(np.isfinite(x)):
        raise InvalidDataError("samples contain NaN or Inf entries")
    return NormalizedGram(_gram_from_sq_dists(_sq_dists(x), sigma), sigma=sigma)


def sym_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, clamped for entropy use.

    Uses a symmetric solver, sorts descending, clamps negatives (round-off
    from the solver) to zero, and renormalizes the spectrum to sum to one
    when clamping moved the total by more than 1e-12.

    Raises:
        NumericalError: if the eigensolver fails to converge.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDataError(f"matrix must be square, got shape {m.shape}")
    try:
        lam = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "eigendecomposition failed to converge "
            f"(n={m.shape[0]}, fro_norm={np.linalg.norm(m):.3e}): {exc}"
        ) from exc
    lam = lam[::-1]
    clamped = np.clip(lam, 0.0, None)
    if abs(clamped.sum() - lam.sum()) > 1e-12:
        total = clamped.sum()
        if total <= 0.0:
            raise NumericalError("spectrum collapsed to zero after clamping")
        clamped = clamped / total
    return clamped


def hadamard_joint(a: NormalizedGram, b: NormalizedGram) -> NormalizedGram:
    """Joint Gram matrix: entrywise product, renormalized by its trace.

    The product of two trace-normalized matrices has trace sum_i a_ii*b_ii
    (= 1/N for unit diagonals scaled by 1/N each), so the result is
    renormalized to unit trace before use.
    """
    if a.n_samples != b.n_samples:
        raise InvalidDataError(
            f"Gram sizes differ: {a.n_samples} vs {b.n_samples}"
        )
    prod = a.matrix * b.matrix
    tr = float(np.trace(prod))
    if tr <= 0.0 or not np.isfinite(tr):
        raise NumericalError(f"joint Gram trace is degenerate: {tr!r}")
    return NormalizedGram(prod / tr, sigma=None)
