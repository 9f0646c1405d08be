"""Structured pruning of FC layers from information content alone.

The toolkit estimates Renyi alpha-order entropy and mutual information
directly from the eigenvalue spectra of RBF Gram matrices — no density
estimation, no labels — then drops redundant neurons either pairwise
(sample two survivors, drop one when their MI clears a threshold) or by
clustering the MI geometry and keeping one representative per cluster.
"""

from ._version import __version__
from .cluster import (
    MDSEmbedding,
    classical_mds,
    cluster_neurons,
    cluster_prune,
    mi_to_distance,
    select_best_seed,
    select_representatives,
)
from .entropy import MIMatrix, joint_entropy, mi_matrix, mutual_information, renyi_entropy
from .errors import (
    InvalidDataError,
    InvalidParameterError,
    MipruneError,
    MipruneWarning,
    NumericalError,
    TrainingError,
)
from .formats import (
    AMX_MAGIC,
    read_activations,
    read_amx,
    read_labels,
    read_mask,
    read_sigmas,
    read_toy_model,
    write_amx,
    write_labels,
    write_mask,
    write_sigmas,
    write_toy_model,
)
from .gram import ActivationMatrix, NormalizedGram, hadamard_joint, rbf_gram, sym_eigenvalues
from .metrics import (
    REPORT_COLUMNS,
    FfnShape,
    FlopsReport,
    accuracy,
    ffn_flops,
    format_report,
    kl_proxy,
    relative_flops,
    target_keep_for_flops,
    write_report,
)
from .pairwise import (
    PruneMask,
    default_max_itr,
    prune_pairwise,
    prune_pcc,
    prune_random,
    prune_weight_magnitude,
)
from .sigma import (
    SigmaSchedule,
    alignment,
    default_sigma_grid,
    ema_update,
    scott_sigma,
    tune_all,
    tune_neuron_sigma,
)
from .toy import (
    RedundancyPlan,
    ToyFFN,
    capture_activations,
    forward_with_mask,
    gelu,
    synth_task,
    train_toy_ffn,
)

__all__ = [
    "__version__",
    "ActivationMatrix",
    "NormalizedGram",
    "SigmaSchedule",
    "MIMatrix",
    "MDSEmbedding",
    "PruneMask",
    "FfnShape",
    "FlopsReport",
    "ToyFFN",
    "RedundancyPlan",
    "MipruneError",
    "InvalidParameterError",
    "InvalidDataError",
    "NumericalError",
    "TrainingError",
    "MipruneWarning",
    "rbf_gram",
    "sym_eigenvalues",
    "hadamard_joint",
    "renyi_entropy",
    "joint_entropy",
    "mutual_information",
    "mi_matrix",
    "scott_sigma",
    "alignment",
    "default_sigma_grid",
    "tune_neuron_sigma",
    "ema_update",
    "tune_all",
    "prune_pairwise",
    "prune_pcc",
    "prune_random",
    "prune_weight_magnitude",
    "default_max_itr",
    "mi_to_distance",
    "classical_mds",
    "cluster_neurons",
    "select_representatives",
    "select_best_seed",
    "cluster_prune",
    "ffn_flops",
    "relative_flops",
    "target_keep_for_flops",
    "kl_proxy",
    "accuracy",
    "REPORT_COLUMNS",
    "format_report",
    "write_report",
    "gelu",
    "synth_task",
    "train_toy_ffn",
    "capture_activations",
    "forward_with_mask",
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
