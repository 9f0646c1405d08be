"""Pairwise pruning loop, its replayable PRNG protocol, and baselines."""

import math

import numpy as np
import pytest

from miprune import (
    ActivationMatrix,
    InvalidDataError,
    InvalidParameterError,
    PruneMask,
    default_max_itr,
    mutual_information,
    prune_pairwise,
    prune_pcc,
    prune_random,
    prune_weight_magnitude,
    scott_sigma,
)


def _oracle_pairwise(values, sigmas, threshold, max_itr, seed):
    """Independent replay of the sampling protocol.

    Survivors are held in ascending order; each iteration consumes one
    ``choice(n_alive, 2, replace=False)`` draw from a fresh generator
    seeded identically; the second-drawn neuron is removed whenever the
    pair MI reaches the threshold. MI is recomputed from scratch on
    every draw (no memo) with arguments in (min, max) index order.
    """
    rng = np.random.default_rng(seed)
    alive = list(range(values.shape[1]))
    used = 0
    for _ in range(max_itr):
        if len(alive) < 2:
            break
        pos = rng.choice(len(alive), size=2, replace=False)
        k, l = alive[int(pos[0])], alive[int(pos[1])]
        used += 1
        a, b = (k, l) if k < l else (l, k)
        mi = mutual_information(values[:, a], values[:, b], sigmas[a], sigmas[b])
        if mi >= threshold:
            alive.remove(l)
    return alive, used


class TestDefaultMaxItr:
    def test_closed_forms(self):
        assert default_max_itr(2) == math.ceil(20.0 * math.log(2.0))
        assert default_max_itr(64) == 2662

    def test_rejects_single_neuron(self):
        with pytest.raises(InvalidParameterError):
            default_max_itr(1)


class TestPruneMask:
    def test_counts_and_indices(self):
        m = PruneMask(keep=np.array([1, 0, 1, 1], dtype=bool), method="random")
        assert m.n_neurons == 4
        assert m.n_kept == 3
        np.testing.assert_array_equal(m.kept_indices, [0, 2, 3])

    def test_rejects_empty_mask(self):
        with pytest.raises(InvalidDataError):
            PruneMask(keep=np.zeros(3, dtype=bool), method="random")

    def test_rejects_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            PruneMask(keep=np.ones(3, dtype=bool), method="magic")


class TestPairwiseOracleReplay:
    def test_matches_independent_replay(self):
        """Twelve randomized instances (K <= 8) must match the replay
        exactly: same survivors and same number of draws consumed."""
        for instance in range(12):
            rng = np.random.default_rng(4000 + instance)
            n = int(rng.integers(24, 48))
            k = int(rng.integers(3, 9))
            x = 0.2 * rng.normal(size=(n, k))
            if k >= 4:  # plant one duplicate so drops actually occur
                x[:, k - 1] = x[:, 0]
            sig = np.full(k, scott_sigma(n, 1, 1.0))
            threshold = float(rng.uniform(0.2, 1.2))
            max_itr = int(rng.integers(10, 60))
            mask = prune_pairwise(
                ActivationMatrix(x), sig, threshold, max_itr=max_itr, seed=instance
            )
            survivors, used = _oracle_pairwise(x, sig, threshold, max_itr, instance)
            np.testing.assert_array_equal(mask.kept_indices, survivors)
            assert mask.iterations_used == used

    def test_deterministic(self):
        rng = np.random.default_rng(20)
        x = ActivationMatrix(0.2 * rng.normal(size=(100, 5)))
        sig = np.full(5, scott_sigma(100, 1, 1.0))
        a = prune_pairwise(x, sig, 0.5, seed=7)
        b = prune_pairwise(x, sig, 0.5, seed=7)
        np.testing.assert_array_equal(a.keep, b.keep)
        assert a.iterations_used == b.iterations_used


class TestPruneMI:
    def test_exactly_one_duplicate_survives(self):
        """Three identical copies plus three independent neurons: at a
        1-bit threshold the copies collapse to a single survivor and the
        independents are untouched, across ten seeded datasets."""
        for seed in range(10):
            rng = np.random.default_rng(800 + seed)
            z = rng.normal(size=200)
            x = np.column_stack([z, z, z, *(rng.normal(size=200) for _ in range(3))])
            sig = np.full(6, scott_sigma(200, 1, 1.0))
            mask = prune_pairwise(
                ActivationMatrix(x), sig, 1.0, max_itr=500, seed=seed
            )
            assert mask.keep[:3].sum() == 1, f"seed {seed}: {mask.keep}"
            assert mask.keep[3:].all(), f"seed {seed}: {mask.keep}"

    def test_threshold_between_bands_keeps_one_copy_and_the_noise(self):
        """Columns (z, z, noise): the duplicate pair sits far above the
        noise pairs, so a mid-band threshold removes one copy only."""
        rng = np.random.default_rng(3)
        z = rng.normal(size=300)
        noise = rng.normal(size=300)
        x = np.column_stack([z, z, noise])
        sig = np.full(3, scott_sigma(300, 1, 1.0))
        dup = mutual_information(x[:, 0], x[:, 1], sig[0], sig[1])
        cross = mutual_information(x[:, 0], x[:, 2], sig[0], sig[2])
        assert dup > 2.0 and cross < 0.5
        mask = prune_pairwise(
            ActivationMatrix(x), sig, (dup + cross) / 2.0, max_itr=200, seed=0
        )
        assert mask.n_kept == 2
        assert mask.keep[2]  # the independent neuron always survives
        assert mask.keep[0] != mask.keep[1]

    def test_huge_threshold_keeps_everything(self):
        rng = np.random.default_rng(3)
        z = rng.normal(size=300)
        x = np.column_stack([z, z, rng.normal(size=300)])
        sig = np.full(3, scott_sigma(300, 1, 1.0))
        mask = prune_pairwise(ActivationMatrix(x), sig, 50.0, max_itr=100, seed=0)
        assert mask.n_kept == 3
        assert mask.iterations_used == 100  # budget exhausted, no drops

    def test_threshold_below_all_pairs_leaves_single_survivor(self):
        """When every pair meets the threshold each draw drops a neuron,
        so the loop reaches one survivor in exactly K - 1 draws and never
        removes the last one."""
        rng = np.random.default_rng(21)
        z = rng.normal(size=150)
        x = np.column_stack([z, z + 0.01 * rng.normal(size=150), z, z])
        sig = np.full(4, scott_sigma(150, 1, 1.0))
        mask = prune_pairwise(ActivationMatrix(x), sig, 1e-6, max_itr=500, seed=2)
        assert mask.n_kept == 1
        assert mask.iterations_used == 3

    def test_mask_metadata(self):
        rng = np.random.default_rng(22)
        x = ActivationMatrix(0.2 * rng.normal(size=(60, 3)))
        sig = np.full(3, scott_sigma(60, 1, 1.0))
        mask = prune_pairwise(x, sig, 0.7, seed=5)
        assert mask.method == "pairwise_mi"
        assert mask.seed == 5
        assert mask.threshold == 0.7
        assert 1 <= mask.iterations_used <= default_max_itr(3)

    def test_rejects_nonpositive_threshold(self):
        x = ActivationMatrix(np.random.default_rng(0).normal(size=(30, 3)))
        with pytest.raises(InvalidParameterError):
            prune_pairwise(x, np.ones(3), 0.0)

    def test_rejects_sigma_count_mismatch(self):
        x = ActivationMatrix(np.random.default_rng(0).normal(size=(30, 3)))
        with pytest.raises(InvalidParameterError):
            prune_pairwise(x, np.ones(2), 0.5)


class TestPrunePcc:
    def test_perfectly_anticorrelated_pair_collapses(self):
        """Columns (z, -z, z^3, noise): |rho(z, -z)| = 1 crosses a 0.9
        threshold while the cubic's correlation (~0.82 for a standard
        normal) stays below it."""
        rng = np.random.default_rng(55)
        z = rng.normal(size=400)
        x = np.column_stack([z, -z, z**3, rng.normal(size=400)])
        mask = prune_pcc(ActivationMatrix(x), 0.9, max_itr=500, seed=0)
        np.testing.assert_array_equal(mask.keep, [False, True, True, True])
        assert mask.method == "pairwise_pcc"

    def test_constant_column_is_never_redundant(self):
        """A zero-variance neuron has correlation 0 by convention, so it
        cannot meet any threshold."""
        rng = np.random.default_rng(56)
        z = rng.normal(size=200)
        x = np.column_stack([z, z, np.full(200, 3.25)])
        mask = prune_pcc(ActivationMatrix(x), 0.5, max_itr=300, seed=1)
        assert mask.keep[2]
        assert mask.keep[:2].sum() == 1

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, 1.5])
    def test_rejects_threshold_outside_open_unit_interval(self, bad):
        x = ActivationMatrix(np.random.default_rng(0).normal(size=(30, 3)))
        with pytest.raises(InvalidParameterError):
            prune_pcc(x, bad)


class TestPruneRandom:
    def test_keeps_exactly_n(self):
        mask = prune_random(64, 32, seed=0)
        assert mask.n_kept == 32
        assert mask.n_neurons == 64
        assert mask.target_keep == 32

    def test_deterministic_and_seed_sensitive(self):
        a = prune_random(64, 32, seed=0)
        b = prune_random(64, 32, seed=0)
        c = prune_random(64, 32, seed=1)
        np.testing.assert_array_equal(a.keep, b.keep)
        assert not np.array_equal(a.keep, c.keep)

    @pytest.mark.parametrize("n_keep", [0, 65])
    def test_rejects_out_of_range_budget(self, n_keep):
        with pytest.raises(InvalidParameterError):
            prune_random(64, n_keep)


class TestPruneWeightMagnitude:
    def test_keeps_largest_outgoing_rows(self):
        w = np.array([[3.0, 0.0], [-0.5, 0.5], [1.0, 1.0]])  # L1 norms 3, 1, 2
        mask = prune_weight_magnitude(w, 2)
        np.testing.assert_array_equal(mask.kept_indices, [0, 2])
        assert mask.seed is None

    def test_ties_keep_lower_indices(self):
        mask = prune_weight_magnitude(np.ones((5, 3)), 2)
        np.testing.assert_array_equal(mask.kept_indices, [0, 1])

    def test_zero_row_dropped_first(self):
        w = np.ones((4, 2))
        w[1] = 0.0
        mask = prune_weight_magnitude(w, 3)
        assert not mask.keep[1]

    def test_sign_insensitive(self):
        w = np.array([[-2.0, -2.0], [1.0, 1.0], [0.5, 0.5]])
        mask = prune_weight_magnitude(w, 1)
        np.testing.assert_array_equal(mask.kept_indices, [0])

    def test_rejects_non_finite(self):
        w = np.ones((3, 2))
        w[0, 0] = np.nan
        with pytest.raises(InvalidDataError):
            prune_weight_magnitude(w, 2)
