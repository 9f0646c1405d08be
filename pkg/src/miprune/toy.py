"""A small two-layer GeLU classifier and synthetic tasks to prune it on.

The model is linear -> GeLU -> linear with softmax outputs, trained by
full-batch gradient descent. It exists so pruning quality can be
measured end to end without retraining: masked neurons are zeroed in
the hidden layer and the remaining weights are left untouched.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import InvalidDataError, InvalidParameterError, TrainingError
from .gram import ActivationMatrix
from .metrics import FfnShape
from .pairwise import PruneMask

__all__ = [
    "ToyFFN",
    "RedundancyPlan",
    "gelu",
    "synth_task",
    "train_toy_ffn",
    "capture_activations",
    "forward_with_mask",
]

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact GeLU: x * Phi(x), Phi the standard normal CDF."""
    return x * 0.5 * (1.0 + erf(x / _SQRT2))


def _gelu_grad(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(x / _SQRT2)) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ToyFFN:
    """Two-layer GeLU network: d_in -> hidden -> n_classes."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        w1 = np.asarray(self.w1, dtype=np.float64)
        b1 = np.asarray(self.b1, dtype=np.float64)
        w2 = np.asarray(self.w2, dtype=np.float64)
        b2 = np.asarray(self.b2, dtype=np.float64)
        if w1.ndim != 2 or w2.ndim != 2:
            raise InvalidDataError("weight matrices must be 2-D")
        if b1.shape != (w1.shape[1],) or b2.shape != (w2.shape[1],):
            raise InvalidDataError("bias shapes do not match weights")
        if w1.shape[1] != w2.shape[0]:
            raise InvalidDataError(
                f"hidden sizes disagree: {w1.shape[1]} vs {w2.shape[0]}"
            )
        for arr in (w1, b1, w2, b2):
            if not np.all(np.isfinite(arr)):
                raise InvalidDataError("parameters contain NaN or Inf")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "b2", b2)

    @property
    def shape(self) -> FfnShape:
        return FfnShape(self.w1.shape[0], self.w1.shape[1], self.w2.shape[1])

    def hidden(self, inputs: np.ndarray) -> np.ndarray:
        """Post-GeLU hidden activations, shape (N, hidden)."""
        x = self._check_inputs(inputs)
        return gelu(x @ self.w1 + self.b1)

    def predict_proba(self, inputs: np.ndarray) -> np.ndarray:
        """Softmax class probabilities, shape (N, n_classes)."""
        return _softmax(self.hidden(inputs) @ self.w2 + self.b2)

    def _check_inputs(self, inputs: np.ndarray) -> np.ndarray:
        x = np.asarray(inputs, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.w1.shape[0]:
            raise InvalidDataError(
                f"inputs must be (N, {self.w1.shape[0]}), got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidDataError("inputs contain NaN or Inf")
        return x

    def flat_params(self) -> np.ndarray:
        return np.concatenate(
            [self.w1.ravel(), self.b1, self.w2.ravel(), self.b2]
        )

    @classmethod
    def from_flat(cls, flat: np.ndarray, d_in: int, hidden: int, n_classes: int):
        flat = np.asarray(flat, dtype=np.float64).ravel()
        sizes = [d_in * hidden, hidden, hidden * n_classes, n_classes]
        if flat.size != sum(sizes):
            raise InvalidDataError(
                f"expected {sum(sizes)} parameters, got {flat.size}"
            )
        w1, b1, w2, b2 = np.split(flat, np.cumsum(sizes)[:-1])
        return cls(
            w1=w1.reshape(d_in, hidden),
            b1=b1,
            w2=w2.reshape(hidden, n_classes),
            b2=b2,
        )


@dataclass(frozen=True)
class RedundancyPlan:
    """Input-duplication scheme for synthetic tasks.

    Only the first ``informative_dims`` input features are informative;
    the remaining ones are cyclic copies of them plus Gaussian noise of
    scale ``noise_scale``, which plants redundant structure for pruners
    to find.
    """

    informative_dims: int
    noise_scale: float = 0.05

    def __post_init__(self):
        if int(self.informative_dims) < 1:
            raise InvalidParameterError("informative_dims must be >= 1")
        if not 0.0 <= float(self.noise_scale) < np.inf:
            raise InvalidParameterError("noise_scale must be finite and >= 0")


def synth_task(
    seed: int,
    n_samples: int,
    d_in: int,
    n_classes: int = 2,
    separation: float = 6.0,
    redundancy: RedundancyPlan | None = None,
    feature_scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-blob classification data with optional planted redundancy.

    Class centers are drawn at random and rescaled so the minimum
    pairwise center distance equals ``separation`` (in units of the
    within-class noise, sigma = 1), making label recovery easy for a
    linear probe. Labels are balanced up to remainder. The finished
    matrix is multiplied by ``feature_scale``, which moves the absolute
    activation scale without touching the signal-to-noise ratio —
    sub-unit scales put the downstream kernel-width search in its
    non-degenerate regime.

    Returns:
        (inputs, labels): float64 (N, d_in) and int64 (N,).
    """
    if int(n_samples) < n_classes:
        raise InvalidParameterError(
            f"need at least {n_classes} samples, got {n_samples}"
        )
    if int(n_classes) < 2:
        raise InvalidParameterError(f"n_classes must be >= 2, got {n_classes}")
    if int(d_in) < 1:
        raise InvalidParameterError(f"d_in must be >= 1, got {d_in}")
    if not np.isfinite(separation) or separation <= 0.0:
        raise InvalidParameterError(f"separation must be positive, got {separation}")
    if not np.isfinite(feature_scale) or feature_scale <= 0.0:
        raise InvalidParameterError(
            f"feature_scale must be positive, got {feature_scale}"
        )
    d_info = d_in if redundancy is None else int(redundancy.informative_dims)
    if d_info > d_in:
        raise InvalidParameterError(
            f"informative_dims {d_info} exceeds d_in {d_in}"
        )
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_classes, d_info))
    gaps = [
        np.linalg.norm(centers[i] - centers[j])
        for i in range(n_classes)
        for j in range(i + 1, n_classes)
    ]
    min_gap = min(gaps)
    if min_gap <= 1e-9:
        raise InvalidDataError("degenerate class centers drawn; change the seed")
    centers *= separation / min_gap
    labels = rng.permutation(np.arange(n_samples) % n_classes)
    x_info = centers[labels] + rng.standard_normal((n_samples, d_info))
    if redundancy is None:
        return feature_scale * x_info, labels.astype(np.int64)
    n_extra = d_in - d_info
    src = np.arange(n_extra) % d_info
    x_extra = x_info[:, src] + redundancy.noise_scale * rng.standard_normal(
        (n_samples, n_extra)
    )
    x = np.concatenate([x_info, x_extra], axis=1)
    return feature_scale * x, labels.astype(np.int64)


def train_toy_ffn(
    dataset: tuple[np.ndarray, np.ndarray],
    hidden: int,
    seed: int = 0,
    steps: int = 500,
    learning_rate: float = 0.05,
) -> ToyFFN:
    """Train by full-batch gradient descent on softmax cross-entropy.

    Initialization and the (fixed) optimization schedule are fully
    determined by the seed, so retraining reproduces the same weights.

    Raises:
        TrainingError: if the loss goes non-finite.
    """
    inputs, labels = dataset
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels)
    if inputs.ndim != 2 or labels.ndim != 1 or inputs.shape[0] != labels.shape[0]:
        raise InvalidDataError("dataset must be (inputs (N, d), labels (N,))")
    if int(hidden) < 2:
        raise InvalidParameterError(f"hidden width must be >= 2, got {hidden}")
    if int(steps) < 1:
        raise InvalidParameterError(f"steps must be >= 1, got {steps}")
    if not np.isfinite(learning_rate) or learning_rate <= 0.0:
        raise InvalidParameterError(f"learning_rate must be positive")
    n, d_in = inputs.shape
    n_classes = int(labels.max()) + 1
    if n_classes < 2 or labels.min() < 0:
        raise InvalidDataError("labels must be nonnegative ints with >= 2 classes")
    hidden = int(hidden)
    rng = np.random.default_rng(seed)
    w1 = rng.normal(0.0, np.sqrt(2.0 / d_in), size=(d_in, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.normal(0.0, np.sqrt(2.0 / hidden), size=(hidden, n_classes))
    b2 = np.zeros(n_classes)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), labels] = 1.0
    lr = float(learning_rate)
    for step in range(int(steps)):
        pre = inputs @ w1 + b1
        h = gelu(pre)
        probs = _softmax(h @ w2 + b2)
        loss = -np.mean(np.log(np.maximum(probs[np.arange(n), labels], 1e-300)))
        if not np.isfinite(loss):
            raise TrainingError(
                f"loss became non-finite at step {step} "
                f"(lr={lr}, hidden={hidden}, seed={seed})"
            )
        g_logits = (probs - onehot) / n
        g_w2 = h.T @ g_logits
        g_b2 = g_logits.sum(axis=0)
        g_h = g_logits @ w2.T
        g_pre = g_h * _gelu_grad(pre)
        g_w1 = inputs.T @ g_pre
        g_b1 = g_pre.sum(axis=0)
        w1 -= lr * g_w1
        b1 -= lr * g_b1
        w2 -= lr * g_w2
        b2 -= lr * g_b2
    return ToyFFN(w1=w1, b1=b1, w2=w2, b2=b2)


def capture_activations(
    model: ToyFFN,
    inputs: np.ndarray,
    layer_id: str = "ffn0",
    sample_fraction: float = 1.0,
) -> ActivationMatrix:
    """Record the post-GeLU hidden activations as an ActivationMatrix."""
    return ActivationMatrix(
        values=model.hidden(inputs),
        layer_id=layer_id,
        sample_fraction=sample_fraction,
    )


def forward_with_mask(
    model: ToyFFN,
    mask: PruneMask | None,
    inputs: np.ndarray,
) -> np.ndarray:
    """Softmax outputs with dropped hidden units zeroed (no retraining).

    ``mask=None`` means the unpruned network. Remaining weights are used
    as trained; zeroing a unit removes both its output contribution and
    its FLOPs.
    """
    if mask is None:
        return model.predict_proba(inputs)
    if mask.n_neurons != model.shape.hidden:
        raise InvalidDataError(
            f"mask covers {mask.n_neurons} neurons, model has "
            f"{model.shape.hidden}"
        )
    h = model.hidden(inputs) * mask.keep
    return _softmax(h @ model.w2 + model.b2)
