"""Matrix-based Renyi alpha-order entropy and mutual information.

Entropy is computed from the eigenvalue spectrum of a trace-normalized
Gram matrix:

    S_alpha(G) = log2(sum_i lambda_i ** alpha) / (1 - alpha)

and mutual information between two neurons from the marginal and joint
(Hadamard-product) Gram matrices:

    I(A; B) = S_alpha(A) + S_alpha(B) - S_alpha(A o B)

All values are in bits.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError, InvalidParameterError, NumericalError
from .gram import ActivationMatrix, NormalizedGram, hadamard_joint, rbf_gram
from .sigma import SigmaSchedule

__all__ = [
    "MIMatrix",
    "renyi_entropy",
    "joint_entropy",
    "mutual_information",
    "mi_matrix",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha <= 0.0 or alpha == 1.0:
        raise InvalidParameterError(
            f"alpha must be positive and != 1, got {alpha}"
        )
    return alpha


def renyi_entropy(gram: NormalizedGram, alpha: float = 1.01) -> float:
    """Renyi alpha-order entropy of a normalized Gram matrix, in bits.

    Bounded by [0, log2 N] for a spectrum on the simplex; alpha -> 1
    recovers the von Neumann (Shannon) limit, which is why 1.01 is the
    conventional default.
    """
    alpha = _check_alpha(alpha)
    lam = gram.eigenvalues()
    lam = lam[lam > 0.0]
    if lam.size == 0:
        raise NumericalError("entropy undefined: empty positive spectrum")
    power_sum = float(np.sum(lam**alpha))
    if power_sum <= 0.0 or not np.isfinite(power_sum):
        raise NumericalError(f"degenerate spectral power sum {power_sum!r}")
    return float(np.log2(power_sum) / (1.0 - alpha))


def joint_entropy(a: NormalizedGram, b: NormalizedGram, alpha: float = 1.01) -> float:
    """Entropy of the renormalized Hadamard product of two Gram matrices."""
    return renyi_entropy(hadamard_joint(a, b), alpha)


def mutual_information(
    z_k: np.ndarray,
    z_l: np.ndarray,
    sigma_k: float,
    sigma_l: float,
    alpha: float = 1.01,
) -> float:
    """MI between two neurons' activation vectors, in bits.

    Builds one RBF Gram per neuron at its own width and applies
    I = S(A) + S(B) - S(A o B). The estimate is symmetric in its
    arguments and can be slightly negative through estimation noise.
    """
    z_k = np.asarray(z_k, dtype=np.float64)
    z_l = np.asarray(z_l, dtype=np.float64)
    if z_k.ndim != 1 or z_l.ndim != 1:
        raise InvalidDataError("activation vectors must be 1-D")
    if z_k.shape[0] != z_l.shape[0]:
        raise InvalidDataError(
            f"sample counts differ: {z_k.shape[0]} vs {z_l.shape[0]}"
        )
    if z_k.shape[0] < 2:
        raise InvalidDataError("need at least 2 samples")
    alpha = _check_alpha(alpha)
    a = rbf_gram(z_k, sigma_k)
    b = rbf_gram(z_l, sigma_l)
    return renyi_entropy(a, alpha) + renyi_entropy(b, alpha) - joint_entropy(a, b, alpha)


@dataclass(frozen=True, eq=False)
class MIMatrix:
    """Pairwise MI estimates for one layer.

    Attributes:
        values: (K, K) symmetric float64 array, zero diagonal; entries
            for pairs that were never computed are NaN.
        alpha: entropy order used.
        pairs_computed: number of distinct off-diagonal pairs filled in.
    """

    values: np.ndarray
    alpha: float
    pairs_computed: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvalidDataError(f"MI matrix must be square, got {v.shape}")
        mask = np.isfinite(v)
        if not np.array_equal(mask, mask.T) or not np.array_equal(
            np.where(mask, v, 0.0), np.where(mask, v, 0.0).T
        ):
            raise InvalidDataError("MI matrix must be symmetric")
        if np.any(np.diag(v) != 0.0):
            raise InvalidDataError("MI matrix diagonal must be zero")
        object.__setattr__(self, "values", v)

    @property
    def n_neurons(self) -> int:
        return self.values.shape[0]

    @property
    def is_complete(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def value(self, k: int, l: int) -> float:
        out = float(self.values[k, l])
        if np.isnan(out):
            raise InvalidDataError(f"MI for pair ({k}, {l}) was not computed")
        return out


def mi_matrix(
    activations: ActivationMatrix,
    sigmas,
    alpha: float = 1.01,
    pairs=None,
) -> MIMatrix:
    """Pairwise MI over a layer's neurons.

    Marginal Gram matrices and entropies are computed once per neuron and
    reused across pairs; only the joint entropy is per-pair work.

    Args:
        activations: N x K activation matrix.
        sigmas: SigmaSchedule or a length-K array of per-neuron widths.
        alpha: entropy order.
        pairs: optional iterable of (k, l) index pairs; defaults to all
            unordered off-diagonal pairs. Uncomputed entries stay NaN.
    """
    alpha = _check_alpha(alpha)
    k_total = activations.n_neurons
    if isinstance(sigmas, SigmaSchedule):
        sig = sigmas.neuron_sigmas
    else:
        sig = np.asarray(sigmas, dtype=np.float64)
    if sig.ndim != 1 or sig.size != k_total:
        raise InvalidParameterError(
            f"need one sigma per neuron: got {sig.size} for K={k_total}"
        )
    if np.any(~np.isfinite(sig)) or np.any(sig <= 0.0):
        raise InvalidDataError("per-neuron sigmas must be positive and finite")

    if pairs is None:
        pairs = [(i, j) for i in range(k_total) for j in range(i + 1, k_total)]
    else:
        pairs = [(int(i), int(j)) for i, j in pairs]
        for i, j in pairs:
            if not (0 <= i < k_total and 0 <= j < k_total) or i == j:
                raise InvalidParameterError(f"invalid neuron pair ({i}, {j})")

    grams: dict[int, NormalizedGram] = {}
    marginals: dict[int, float] = {}

    def marginal(idx: int) -> tuple[NormalizedGram, float]:
        if idx not in grams:
            grams[idx] = rbf_gram(activations.column(idx), sig[idx])
            marginals[idx] = renyi_entropy(grams[idx], alpha)
        return grams[idx], marginals[idx]

    values = np.full((k_total, k_total), np.nan)
    np.fill_diagonal(values, 0.0)
    done = set()
    for i, j in pairs:
        key = (min(i, j), max(i, j))
        if key in done:
            continue
        done.add(key)
        g_i, s_i = marginal(i)
        g_j, s_j = marginal(j)
        mi = s_i + s_j - joint_entropy(g_i, g_j, alpha)
        values[i, j] = mi
        values[j, i] = mi
    return MIMatrix(values=values, alpha=alpha, pairs_computed=len(done))
