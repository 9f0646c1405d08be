"""Command-line surface: tune widths, estimate MI, prune, evaluate, ablate.

Every subcommand is deterministic given its flags (all randomness sits
behind ``--seed``), reads/writes the AMX and JSON formats from
``formats``, and reports failures as one machine-readable JSON line on
stderr. Exit codes: 0 success, 2 usage/parameter error, 3 data error,
4 numerical error. Flag precedence is flags > ``--config`` file > defaults.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from ._version import __version__
from .cluster import cluster_prune
from .entropy import mi_matrix
from .errors import InvalidParameterError, MipruneError
from .formats import (
    _read_json,
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
from .gram import ActivationMatrix
from .metrics import (
    accuracy,
    format_report,
    kl_proxy,
    relative_flops,
    target_keep_for_flops,
    write_report,
)
from .pairwise import PruneMask, prune_pairwise, prune_pcc, prune_random, prune_weight_magnitude
from .sigma import tune_all
from .toy import RedundancyPlan, capture_activations, forward_with_mask, synth_task, train_toy_ffn

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors as machine-readable lines."""

    def error(self, message):
        _print_error("invalid-parameter", message)
        raise SystemExit(2)


def _print_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


_ERROR_KINDS = {
    2: "invalid-parameter",
    3: "invalid-data",
    4: "numerical",
}


def _add(parser, flag, default, **kwargs):
    """Optional flag whose absence is detectable (for config merging)."""
    parser.add_argument(flag, default=argparse.SUPPRESS, **kwargs)
    dest = flag.lstrip("-").replace("-", "_")
    parser.set_defaults(**{f"_default_{dest}": default})


def _resolve(args) -> dict:
    """Apply precedence flags > config file > built-in defaults."""
    ns = vars(args)
    defaults = {
        k[len("_default_"):]: v for k, v in ns.items() if k.startswith("_default_")
    }
    given = {
        k: v
        for k, v in ns.items()
        if not k.startswith("_default_") and k not in ("config", "func")
    }
    merged = dict(defaults)
    config_path = ns.get("config")
    if config_path:
        doc = _read_json(config_path)
        if not isinstance(doc, dict):
            raise InvalidParameterError(f"{config_path}: config must be a JSON object")
        for key, value in doc.items():
            dest = key.replace("-", "_")
            if dest not in defaults:
                raise InvalidParameterError(
                    f"{config_path}: unknown config key {key!r} for this subcommand"
                )
            merged[dest] = value
    merged.update(given)
    return merged


def _require(opts: dict, *names: str) -> None:
    for name in names:
        if opts.get(name) is None:
            raise InvalidParameterError(
                f"--{name.replace('_', '-')} is required (flag or config)"
            )


def _subsample(activations: ActivationMatrix, fraction: float, seed: int) -> ActivationMatrix:
    """Seeded row subsample of ceil(fraction * N) rows (at least 2)."""
    fraction = float(fraction)
    if not 0.0 < fraction <= 1.0:
        raise InvalidParameterError(
            f"sample fraction must be in (0, 1], got {fraction}"
        )
    if fraction == 1.0:
        return activations
    n = activations.n_samples
    n_sub = max(2, math.ceil(fraction * n))
    rows = np.random.default_rng(seed).choice(n, size=n_sub, replace=False)
    return ActivationMatrix(
        values=activations.values[np.sort(rows)],
        layer_id=activations.layer_id,
        sample_fraction=fraction,
    )


def _mask_relative_flops(mask) -> float:
    # block FLOPs are linear in the hidden width
    return mask.n_kept / mask.n_neurons


def _load_sigmas(path: str, k: int):
    schedule = read_sigmas(path)
    if schedule.n_neurons != k:
        raise InvalidParameterError(
            f"sigma schedule covers {schedule.n_neurons} neurons, activations have {k}"
        )
    return schedule


# ---------------------------------------------------------------- commands


def _cmd_tune_sigma(args) -> int:
    opts = _resolve(args)
    _require(opts, "activations", "out")
    acts = read_activations(opts["activations"])
    acts = _subsample(acts, opts["sample_fraction"], opts["seed"])
    schedule = tune_all(
        acts,
        gamma=float(opts["gamma"]),
        beta=float(opts["beta"]),
        batch_size=int(opts["batch_size"]),
        seed=int(opts["seed"]),
        alpha=float(opts["alpha"]),
    )
    write_sigmas(opts["out"], schedule)
    print(f"tuned {schedule.n_neurons} neuron widths -> {opts['out']}")
    return 0


def _cmd_mi(args) -> int:
    opts = _resolve(args)
    _require(opts, "activations", "sigmas", "out")
    acts = read_activations(opts["activations"])
    acts = _subsample(acts, opts["sample_fraction"], opts["seed"])
    schedule = _load_sigmas(opts["sigmas"], acts.n_neurons)
    mi = mi_matrix(acts, schedule, alpha=float(opts["alpha"]))
    tmp = f"{opts['out']}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "l", "mi_bits"])
        for i in range(mi.n_neurons):
            for j in range(i + 1, mi.n_neurons):
                writer.writerow([i, j, repr(float(mi.values[i, j]))])
    os.replace(tmp, opts["out"])
    print(f"wrote {mi.pairs_computed} pairwise MI values -> {opts['out']}")
    return 0


def _target_keep(opts: dict, k: int) -> int:
    has_keep = opts.get("target_keep") is not None
    has_flops = opts.get("target_flops") is not None
    if has_keep == has_flops:
        raise InvalidParameterError(
            "exactly one of --target-keep / --target-flops is required"
        )
    if has_keep:
        n_keep = int(opts["target_keep"])
        if not 1 <= n_keep <= k:
            raise InvalidParameterError(f"--target-keep must be in [1, {k}]")
        return n_keep
    return target_keep_for_flops(float(opts["target_flops"]), k)


def _finish_mask(mask, layer_id: str, out: str) -> int:
    write_mask(out, mask, layer_id, _mask_relative_flops(mask))
    print(
        f"{mask.method}: kept {mask.n_kept}/{mask.n_neurons} neurons "
        f"(relative FLOPs {_mask_relative_flops(mask):.4f}) -> {out}"
    )
    return 0


def _cmd_prune_pairwise(args) -> int:
    opts = _resolve(args)
    _require(opts, "activations", "sigmas", "threshold_bits", "out")
    acts = read_activations(opts["activations"])
    acts = _subsample(acts, opts["sample_fraction"], opts["seed"])
    schedule = _load_sigmas(opts["sigmas"], acts.n_neurons)
    mask = prune_pairwise(
        acts,
        schedule,
        threshold_bits=float(opts["threshold_bits"]),
        alpha=float(opts["alpha"]),
        max_itr=None if opts["max_itr"] is None else int(opts["max_itr"]),
        seed=int(opts["seed"]),
    )
    return _finish_mask(mask, acts.layer_id, opts["out"])


def _cmd_prune_pcc(args) -> int:
    opts = _resolve(args)
    _require(opts, "activations", "threshold", "out")
    acts = read_activations(opts["activations"])
    acts = _subsample(acts, opts["sample_fraction"], opts["seed"])
    mask = prune_pcc(
        acts,
        threshold=float(opts["threshold"]),
        max_itr=None if opts["max_itr"] is None else int(opts["max_itr"]),
        seed=int(opts["seed"]),
    )
    return _finish_mask(mask, acts.layer_id, opts["out"])


def _cmd_prune_cluster(args) -> int:
    opts = _resolve(args)
    _require(opts, "activations", "out")
    acts = read_activations(opts["activations"])
    acts = _subsample(acts, opts["sample_fraction"], opts["seed"])
    n_keep = _target_keep(opts, acts.n_neurons)
    n_seeds = int(opts["seeds"])
    if n_seeds < 1:
        raise InvalidParameterError(f"--seeds must be >= 1, got {n_seeds}")
    seeds = [int(opts["seed"]) + i for i in range(n_seeds)]
    if n_keep == acts.n_neurons:
        # one cluster per neuron: all-keep, no estimation needed
        mask = PruneMask(
            keep=np.ones(n_keep, dtype=bool),
            method="cluster_mi",
            seed=seeds[0],
            target_keep=n_keep,
        )
        return _finish_mask(mask, acts.layer_id, opts["out"])
    predict = None
    if n_seeds > 1:
        if opts.get("model") is None or opts.get("data") is None:
            raise InvalidParameterError(
                "--model and --data are required to rank several seeds "
                "(or pass --seeds 1)"
            )
        model = read_toy_model(opts["model"])
        data, _ = _read_dataset(opts["data"], None)
        predict = lambda mask: forward_with_mask(model, mask, data)
    _require(opts, "sigmas")
    schedule = _load_sigmas(opts["sigmas"], acts.n_neurons)
    mi = mi_matrix(acts, schedule, alpha=float(opts["alpha"]))
    mask = cluster_prune(
        mi,
        n_keep=n_keep,
        n_dims=None if opts["mds_dim"] is None else int(opts["mds_dim"]),
        seeds=seeds,
        scale=float(opts["distance_scale"]),
        predict=predict,
    )
    return _finish_mask(mask, acts.layer_id, opts["out"])


def _cmd_prune_random(args) -> int:
    opts = _resolve(args)
    _require(opts, "out")
    if opts.get("neurons") is not None:
        k = int(opts["neurons"])
    elif opts.get("activations") is not None:
        k = read_activations(opts["activations"]).n_neurons
    else:
        raise InvalidParameterError("--neurons or --activations is required")
    mask = prune_random(k, _target_keep(opts, k), seed=int(opts["seed"]))
    return _finish_mask(mask, str(opts["layer_id"]), opts["out"])


def _cmd_prune_weight_magnitude(args) -> int:
    opts = _resolve(args)
    _require(opts, "model", "out")
    model = read_toy_model(opts["model"])
    k = model.shape.hidden
    mask = prune_weight_magnitude(model.w2, _target_keep(opts, k))
    return _finish_mask(mask, str(opts["layer_id"]), opts["out"])


def _read_dataset(data_path: str, labels_path: str | None):
    from .formats import read_amx

    values, _ = read_amx(data_path)
    labels = None if labels_path is None else read_labels(labels_path)
    if labels is not None and labels.shape[0] != values.shape[0]:
        raise InvalidParameterError(
            f"{labels_path}: {labels.shape[0]} labels for {values.shape[0]} samples"
        )
    return values.astype(np.float64), labels


def _cmd_toy_train(args) -> int:
    opts = _resolve(args)
    _require(opts, "out")
    seed = int(opts["seed"])
    redundancy = None
    if opts["redundant_dims"] is not None and int(opts["redundant_dims"]) > 0:
        d_info = int(opts["d_in"]) - int(opts["redundant_dims"])
        redundancy = RedundancyPlan(
            informative_dims=d_info, noise_scale=float(opts["noise"])
        )
    inputs, labels = synth_task(
        seed=seed,
        n_samples=int(opts["samples"]),
        d_in=int(opts["d_in"]),
        n_classes=int(opts["classes"]),
        separation=float(opts["separation"]),
        redundancy=redundancy,
        feature_scale=float(opts["feature_scale"]),
    )
    model = train_toy_ffn((inputs, labels), hidden=int(opts["hidden"]), seed=seed)
    write_toy_model(opts["out"], model, extra_metadata={"task_seed": seed})
    acc = accuracy(model.predict_proba(inputs), labels)
    print(f"trained {model.shape} to accuracy {acc:.4f} -> {opts['out']}")
    if opts["data_out"]:
        write_amx(opts["data_out"], inputs, metadata={"source": "synth_task", "seed": seed})
    if opts["labels_out"]:
        write_labels(opts["labels_out"], labels)
    if opts["activations_out"]:
        acts = capture_activations(model, inputs)
        write_amx(
            opts["activations_out"],
            acts.values,
            metadata={"layer_id": acts.layer_id, "sample_fraction": 1.0},
        )
    return 0


def _cmd_toy_eval(args) -> int:
    opts = _resolve(args)
    _require(opts, "model", "data", "labels")
    model = read_toy_model(opts["model"])
    inputs, labels = _read_dataset(opts["data"], opts["labels"])
    reference = forward_with_mask(model, None, inputs)
    row = {
        "method": "none",
        "seed": None,
        "relative_flops": 1.0,
        "accuracy": accuracy(reference, labels),
        "kl_proxy": 0.0,
    }
    if opts.get("mask"):
        mask, _doc = read_mask(opts["mask"])
        outputs = forward_with_mask(model, mask, inputs)
        report = relative_flops([mask], [model.shape])
        row = {
            "method": mask.method,
            "seed": mask.seed,
            "relative_flops": report.relative,
            "accuracy": accuracy(outputs, labels),
            "kl_proxy": kl_proxy(reference, outputs),
            "threshold": mask.threshold,
        }
    print(format_report([row]))
    if opts.get("report"):
        write_report(opts["report"], [row], append=bool(opts["append"]))
        print(f"appended metrics -> {opts['report']}" if opts["append"]
              else f"wrote metrics -> {opts['report']}")
    return 0


# ---------------------------------------------------------------- ablations


def _ablation_substrate(opts: dict):
    """Shared toy substrate for the ablation harnesses: a planted-redundancy
    task, a trained model, and its captured activations."""
    seed = int(opts["seed"])
    d_in = int(opts["d_in"])
    hidden = int(opts["hidden"])
    redundancy = RedundancyPlan(
        informative_dims=max(1, d_in - int(opts["redundant_dims"])),
        noise_scale=float(opts["noise"]),
    )
    inputs, labels = synth_task(
        seed=seed,
        n_samples=int(opts["samples"]),
        d_in=d_in,
        n_classes=int(opts["classes"]),
        redundancy=redundancy,
        feature_scale=float(opts["feature_scale"]),
    )
    model = train_toy_ffn((inputs, labels), hidden=hidden, seed=seed)
    acts = capture_activations(model, inputs)
    reference = forward_with_mask(model, None, inputs)
    return inputs, labels, model, acts, reference


def _eval_mask_row(mask, model, inputs, labels, reference, **extra) -> dict:
    outputs = forward_with_mask(model, mask, inputs)
    row = {
        "method": mask.method,
        "seed": mask.seed,
        "relative_flops": relative_flops([mask], [model.shape]).relative,
        "accuracy": accuracy(outputs, labels),
        "kl_proxy": kl_proxy(reference, outputs),
    }
    row.update(extra)
    return row


def _parse_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError as exc:
        raise InvalidParameterError(f"bad --values list {text!r}: {exc}") from exc
    if not values:
        raise InvalidParameterError("--values must list at least one number")
    return values


def _cluster_mask_for(acts, model, inputs, alpha, n_keep, base_seed, n_seeds):
    schedule = tune_all(acts, seed=base_seed, alpha=alpha)
    mi = mi_matrix(acts, schedule, alpha=alpha)
    seeds = [base_seed + i for i in range(n_seeds)]
    predict = lambda mask: forward_with_mask(model, mask, inputs)
    return cluster_prune(mi, n_keep=n_keep, seeds=seeds, predict=predict)


def _cmd_ablate_alpha(args) -> int:
    opts = _resolve(args)
    _require(opts, "out")
    values = _parse_values(opts["values"])
    inputs, labels, model, acts, reference = _ablation_substrate(opts)
    estimation = _subsample(acts, float(opts["sample_fraction"]), int(opts["seed"]))
    n_keep = target_keep_for_flops(float(opts["target_flops"]), acts.n_neurons)
    rows = []
    for alpha in values:
        mask = _cluster_mask_for(
            estimation, model, inputs, alpha, n_keep,
            int(opts["seed"]), int(opts["seeds"]),
        )
        rows.append(
            _eval_mask_row(
                mask, model, inputs, labels, reference,
                alpha=alpha, sample_fraction=float(opts["sample_fraction"]),
            )
        )
    write_report(opts["out"], rows)
    print(format_report(rows))
    print(f"alpha sweep ({len(rows)} rows) -> {opts['out']}")
    return 0


def _cmd_ablate_sample_fraction(args) -> int:
    opts = _resolve(args)
    _require(opts, "out")
    values = _parse_values(opts["values"])
    inputs, labels, model, acts, reference = _ablation_substrate(opts)
    alpha = float(opts["alpha"])
    n_keep = target_keep_for_flops(float(opts["target_flops"]), acts.n_neurons)
    rows = []
    for fraction in values:
        estimation = _subsample(acts, fraction, int(opts["seed"]))
        mask = _cluster_mask_for(
            estimation, model, inputs, alpha, n_keep,
            int(opts["seed"]), int(opts["seeds"]),
        )
        rows.append(
            _eval_mask_row(
                mask, model, inputs, labels, reference,
                alpha=alpha, sample_fraction=fraction,
            )
        )
    write_report(opts["out"], rows)
    print(format_report(rows))
    print(f"sample-fraction sweep ({len(rows)} rows) -> {opts['out']}")
    return 0


def _cmd_ablate_mi_vs_pcc(args) -> int:
    opts = _resolve(args)
    _require(opts, "out")
    mi_thresholds = _parse_values(opts["mi_thresholds"])
    pcc_thresholds = _parse_values(opts["pcc_thresholds"])
    inputs, labels, model, acts, reference = _ablation_substrate(opts)
    estimation = _subsample(acts, float(opts["sample_fraction"]), int(opts["seed"]))
    alpha = float(opts["alpha"])
    schedule = tune_all(estimation, seed=int(opts["seed"]), alpha=alpha)
    rows = []
    for t in mi_thresholds:
        mask = prune_pairwise(
            estimation, schedule, threshold_bits=t, alpha=alpha, seed=int(opts["seed"])
        )
        rows.append(
            _eval_mask_row(
                mask, model, inputs, labels, reference,
                alpha=alpha, threshold=t,
                sample_fraction=float(opts["sample_fraction"]),
            )
        )
    for t in pcc_thresholds:
        mask = prune_pcc(estimation, threshold=t, seed=int(opts["seed"]))
        rows.append(
            _eval_mask_row(
                mask, model, inputs, labels, reference,
                threshold=t, sample_fraction=float(opts["sample_fraction"]),
            )
        )
    write_report(opts["out"], rows)
    print(format_report(rows))
    print(f"MI-vs-PCC sweep ({len(rows)} rows) -> {opts['out']}")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(parser):
    parser.add_argument("--config", default=None, help="JSON file of flag defaults")


def _add_substrate(parser):
    _add(parser, "--seed", 0, type=int)
    _add(parser, "--samples", 512, type=int)
    _add(parser, "--d-in", 16, type=int)
    _add(parser, "--hidden", 32, type=int)
    _add(parser, "--classes", 3, type=int)
    _add(parser, "--redundant-dims", 12, type=int)
    _add(parser, "--noise", 0.05, type=float)
    _add(parser, "--feature-scale", 0.1, type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="miprune", description=__doc__)
    parser.add_argument("--version", action="version", version=f"miprune {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tune-sigma", help="tune per-neuron kernel widths")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--out", None)
    _add(p, "--gamma", 1.0, type=float)
    _add(p, "--beta", 0.9, type=float)
    _add(p, "--batch-size", 100, type=int)
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--seed", 0, type=int)
    _add(p, "--sample-fraction", 1.0, type=float)
    p.set_defaults(func=_cmd_tune_sigma)

    p = sub.add_parser("mi", help="pairwise mutual information matrix")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--sigmas", None)
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--seed", 0, type=int)
    _add(p, "--sample-fraction", 1.0, type=float)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_mi)

    prune = sub.add_parser("prune", help="produce a prune mask")
    prune_sub = prune.add_subparsers(dest="method", required=True, parser_class=_Parser)

    p = prune_sub.add_parser("pairwise", help="randomized pairwise MI pruning")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--sigmas", None)
    _add(p, "--threshold-bits", None, type=float)
    _add(p, "--max-itr", None, type=int)
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--seed", 0, type=int)
    _add(p, "--sample-fraction", 1.0, type=float)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_prune_pairwise)

    p = prune_sub.add_parser("pcc", help="pairwise |Pearson| baseline")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--threshold", None, type=float)
    _add(p, "--max-itr", None, type=int)
    _add(p, "--seed", 0, type=int)
    _add(p, "--sample-fraction", 1.0, type=float)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_prune_pcc)

    p = prune_sub.add_parser("cluster", help="MI + MDS + k-means pruning")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--sigmas", None)
    _add(p, "--target-flops", None, type=float)
    _add(p, "--target-keep", None, type=int)
    _add(p, "--mds-dim", None, type=int)
    _add(p, "--seeds", 500, type=int)
    _add(p, "--seed", 0, type=int)
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--distance-scale", 1.0, type=float)
    _add(p, "--sample-fraction", 1.0, type=float)
    _add(p, "--model", None)
    _add(p, "--data", None)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_prune_cluster)

    p = prune_sub.add_parser("random", help="uniform random baseline")
    _add_common(p)
    _add(p, "--activations", None)
    _add(p, "--neurons", None, type=int)
    _add(p, "--target-flops", None, type=float)
    _add(p, "--target-keep", None, type=int)
    _add(p, "--seed", 0, type=int)
    _add(p, "--layer-id", "layer0")
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_prune_random)

    p = prune_sub.add_parser("weight-magnitude", help="L1 outgoing-norm baseline")
    _add_common(p)
    _add(p, "--model", None)
    _add(p, "--target-flops", None, type=float)
    _add(p, "--target-keep", None, type=int)
    _add(p, "--layer-id", "ffn0")
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_prune_weight_magnitude)

    toy = sub.add_parser("toy", help="train/evaluate the bundled FFN classifier")
    toy_sub = toy.add_subparsers(dest="action", required=True, parser_class=_Parser)

    p = toy_sub.add_parser("train", help="train on a synthetic blob task")
    _add_common(p)
    _add(p, "--seed", 0, type=int)
    _add(p, "--samples", 512, type=int)
    _add(p, "--d-in", 16, type=int)
    _add(p, "--hidden", 64, type=int)
    _add(p, "--classes", 3, type=int)
    _add(p, "--redundant-dims", 12, type=int)
    _add(p, "--noise", 0.05, type=float)
    _add(p, "--separation", 6.0, type=float)
    _add(p, "--feature-scale", 0.1, type=float)
    _add(p, "--out", None)
    _add(p, "--data-out", None)
    _add(p, "--labels-out", None)
    _add(p, "--activations-out", None)
    p.set_defaults(func=_cmd_toy_train)

    p = toy_sub.add_parser("eval", help="accuracy/KL/FLOPs of a (masked) model")
    _add_common(p)
    _add(p, "--model", None)
    _add(p, "--data", None)
    _add(p, "--labels", None)
    _add(p, "--mask", None)
    _add(p, "--report", None)
    _add(p, "--append", False, action="store_true")
    p.set_defaults(func=_cmd_toy_eval)

    ablate = sub.add_parser("ablate", help="CSV sweep harnesses")
    ablate_sub = ablate.add_subparsers(dest="sweep", required=True, parser_class=_Parser)

    p = ablate_sub.add_parser("alpha", help="entropy-order sweep")
    _add_common(p)
    _add_substrate(p)
    _add(p, "--values", "0.5,1.01,2,5")
    _add(p, "--target-flops", 0.5, type=float)
    _add(p, "--seeds", 5, type=int)
    _add(p, "--sample-fraction", 0.25, type=float)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_ablate_alpha)

    p = ablate_sub.add_parser("sample-fraction", help="estimation-subsample sweep")
    _add_common(p)
    _add_substrate(p)
    _add(p, "--values", "0.01,0.1,0.5,1.0")
    _add(p, "--target-flops", 0.5, type=float)
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--seeds", 5, type=int)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_ablate_sample_fraction)

    p = ablate_sub.add_parser("mi-vs-pcc", help="MI vs |Pearson| pruning curves")
    _add_common(p)
    _add_substrate(p)
    _add(p, "--mi-thresholds", "0.4,0.6,0.9,1.3")
    _add(p, "--pcc-thresholds", "0.6,0.75,0.9,0.97")
    _add(p, "--alpha", 1.01, type=float)
    _add(p, "--sample-fraction", 0.25, type=float)
    _add(p, "--out", None)
    p.set_defaults(func=_cmd_ablate_mi_vs_pcc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        # argparse --help exits 0; our parser errors exit 2
        return int(exc.code or 0)
    except MipruneError as exc:
        _print_error(_ERROR_KINDS.get(exc.exit_code, "error"), str(exc))
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
