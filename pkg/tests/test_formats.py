"""Binary activation container, JSON sidecar files, and checkpoints."""

import json
import struct

import numpy as np
import pytest

from miprune import (
    AMX_MAGIC,
    ActivationMatrix,
    InvalidDataError,
    InvalidParameterError,
    PruneMask,
    SigmaSchedule,
    ToyFFN,
    __version__,
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


class TestAmxRoundTrip:
    def test_float32_payload_is_bit_exact(self, tmp_path):
        path = str(tmp_path / "acts.amx")
        values = np.random.default_rng(0).normal(size=(7, 5)).astype(np.float32)
        write_amx(path, values)
        got, meta = read_amx(path)
        assert got.dtype == np.float32
        np.testing.assert_array_equal(got, values)
        assert meta is None

    def test_metadata_round_trip(self, tmp_path):
        path = str(tmp_path / "acts.amx")
        meta_in = {"layer_id": "blk3", "sample_fraction": 0.25, "note": "x"}
        write_amx(path, np.ones((2, 2)), metadata=meta_in)
        _, meta = read_amx(path)
        assert meta == meta_in

    def test_header_layout(self, tmp_path):
        """Magic, little-endian uint32 dims, then the row-major payload."""
        path = str(tmp_path / "acts.amx")
        values = np.arange(6.0, dtype=np.float32).reshape(2, 3)
        write_amx(path, values)
        raw = open(path, "rb").read()
        assert raw[:4] == AMX_MAGIC
        assert struct.unpack_from("<I", raw, 4)[0] == 2
        assert struct.unpack_from("<I", raw, 8)[0] == 3
        np.testing.assert_array_equal(
            np.frombuffer(raw[12:], dtype="<f4"), np.arange(6.0, dtype=np.float32)
        )

    def test_float64_input_is_cast(self, tmp_path):
        path = str(tmp_path / "acts.amx")
        values = np.random.default_rng(1).normal(size=(3, 4))
        write_amx(path, values)
        got, _ = read_amx(path)
        np.testing.assert_array_equal(got, values.astype(np.float32))

    def test_read_as_activation_matrix_honors_metadata(self, tmp_path):
        path = str(tmp_path / "acts.amx")
        values = np.random.default_rng(2).normal(size=(10, 3))
        write_amx(path, values, metadata={"layer_id": "blk1", "sample_fraction": 0.5})
        acts = read_activations(path)
        assert isinstance(acts, ActivationMatrix)
        assert acts.values.dtype == np.float64
        assert acts.layer_id == "blk1"
        assert acts.sample_fraction == 0.5

    def test_no_temp_file_left_behind(self, tmp_path):
        path = tmp_path / "acts.amx"
        write_amx(str(path), np.ones((2, 2)))
        assert [p.name for p in tmp_path.iterdir()] == ["acts.amx"]


class TestAmxValidation:
    def test_rejects_non_2d_and_non_finite(self, tmp_path):
        path = str(tmp_path / "bad.amx")
        with pytest.raises(InvalidDataError):
            write_amx(path, np.ones(4))
        with pytest.raises(InvalidDataError):
            write_amx(path, np.array([[1.0, np.nan]]))

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.amx"
        path.write_bytes(b"XXXX" + b"\x00" * 16)
        with pytest.raises(InvalidDataError, match="magic"):
            read_amx(str(path))

    def test_rejects_truncated_payload(self, tmp_path):
        path = tmp_path / "bad.amx"
        good = tmp_path / "good.amx"
        write_amx(str(good), np.ones((4, 4)))
        path.write_bytes(good.read_bytes()[:-8])
        with pytest.raises(InvalidDataError, match="truncated"):
            read_amx(str(path))

    def test_rejects_dangling_bytes(self, tmp_path):
        path = tmp_path / "bad.amx"
        good = tmp_path / "good.amx"
        write_amx(str(good), np.ones((2, 2)))
        path.write_bytes(good.read_bytes() + b"\x01\x02")
        with pytest.raises(InvalidDataError, match="dangling"):
            read_amx(str(path))

    def test_rejects_wrong_metadata_length(self, tmp_path):
        path = tmp_path / "bad.amx"
        good = tmp_path / "good.amx"
        write_amx(str(good), np.ones((2, 2)), metadata={"a": 1})
        raw = bytearray(good.read_bytes())
        raw[-len(b'{"a": 1}') - 4] += 1  # bump declared blob length
        path.write_bytes(bytes(raw))
        with pytest.raises(InvalidDataError, match="metadata length"):
            read_amx(str(path))

    def test_rejects_non_json_metadata(self, tmp_path):
        path = tmp_path / "bad.amx"
        blob = b"not json"
        head = AMX_MAGIC + struct.pack("<II", 1, 1) + np.float32(1).tobytes()
        path.write_bytes(head + struct.pack("<I", len(blob)) + blob)
        with pytest.raises(InvalidDataError, match="metadata"):
            read_amx(str(path))

    def test_rejects_missing_file(self, tmp_path):
        with pytest.raises(InvalidDataError):
            read_amx(str(tmp_path / "absent.amx"))


class TestMaskFiles:
    def test_mi_mask_round_trip_uses_threshold_bits(self, tmp_path):
        path = str(tmp_path / "mask.json")
        mask = PruneMask(
            keep=np.array([1, 0, 1, 1], dtype=bool),
            method="pairwise_mi",
            seed=3,
            threshold=0.9,
            iterations_used=17,
        )
        write_mask(path, mask, layer_id="ffn0", relative_flops=0.75)
        got, doc = read_mask(path)
        np.testing.assert_array_equal(got.keep, mask.keep)
        assert got.method == "pairwise_mi"
        assert got.seed == 3
        assert got.threshold == 0.9
        assert doc["threshold_bits"] == 0.9
        assert "threshold_pcc" not in doc
        assert doc["K"] == 4
        assert doc["keep"] == [1, 0, 1, 1]
        assert doc["relative_flops"] == 0.75
        assert doc["layer_id"] == "ffn0"
        assert doc["toolkit_version"] == __version__

    def test_pcc_mask_uses_threshold_pcc(self, tmp_path):
        path = str(tmp_path / "mask.json")
        mask = PruneMask(
            keep=np.array([1, 1], dtype=bool), method="pairwise_pcc",
            seed=0, threshold=0.9,
        )
        write_mask(path, mask, layer_id="ffn0", relative_flops=1.0)
        _, doc = read_mask(path)
        assert doc["threshold_pcc"] == 0.9
        assert "threshold_bits" not in doc

    def test_budgeted_mask_records_target_keep(self, tmp_path):
        path = str(tmp_path / "mask.json")
        mask = PruneMask(
            keep=np.array([1, 0], dtype=bool), method="cluster_mi",
            seed=1, target_keep=1,
        )
        write_mask(path, mask, layer_id="ffn0", relative_flops=0.5)
        got, doc = read_mask(path)
        assert doc["target_keep"] == 1
        assert got.target_keep == 1

    def test_rejects_missing_fields_and_bad_keep(self, tmp_path):
        path = tmp_path / "mask.json"
        path.write_text(json.dumps({"layer_id": "x", "K": 2, "keep": [1, 0]}))
        with pytest.raises(InvalidDataError, match="method"):
            read_mask(str(path))
        path.write_text(
            json.dumps({"layer_id": "x", "K": 3, "keep": [1, 0], "method": "random"})
        )
        with pytest.raises(InvalidDataError, match="keep"):
            read_mask(str(path))
        path.write_text(
            json.dumps({"layer_id": "x", "K": 2, "keep": [1, 2], "method": "random"})
        )
        with pytest.raises(InvalidDataError, match="keep"):
            read_mask(str(path))
        path.write_text(
            json.dumps({"layer_id": "x", "K": 2, "keep": [1, 0], "method": "nope"})
        )
        with pytest.raises(InvalidDataError, match="method"):
            read_mask(str(path))


class TestSigmaAndLabelFiles:
    def test_sigma_schedule_round_trip(self, tmp_path):
        path = str(tmp_path / "sigmas.json")
        schedule = SigmaSchedule(
            layer_sigma=0.8,
            neuron_sigmas=np.array([0.5, 0.25, 1.5]),
            gamma=2.0,
            beta=0.7,
            alpha=1.5,
            batch_size=50,
            grid=np.array([0.1, 1.0, 10.0]),
        )
        write_sigmas(path, schedule)
        got = read_sigmas(path)
        np.testing.assert_array_equal(got.neuron_sigmas, schedule.neuron_sigmas)
        np.testing.assert_array_equal(got.grid, schedule.grid)
        assert got.layer_sigma == 0.8
        assert got.gamma == 2.0
        assert got.beta == 0.7
        assert got.alpha == 1.5
        assert got.batch_size == 50

    def test_rejects_non_schedule_json(self, tmp_path):
        path = tmp_path / "sigmas.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(InvalidDataError):
            read_sigmas(str(path))

    def test_labels_round_trip(self, tmp_path):
        path = str(tmp_path / "labels.json")
        labels = np.array([0, 2, 1, 1, 0])
        write_labels(path, labels)
        got = read_labels(path)
        assert got.dtype == np.int64
        np.testing.assert_array_equal(got, labels)

    def test_rejects_non_label_json(self, tmp_path):
        path = tmp_path / "labels.json"
        path.write_text(json.dumps({"values": [1, 2]}))
        with pytest.raises(InvalidDataError):
            read_labels(str(path))


class TestToyCheckpoints:
    def _model(self):
        rng = np.random.default_rng(14)
        return ToyFFN(
            w1=rng.normal(size=(4, 6)),
            b1=rng.normal(size=6),
            w2=rng.normal(size=(6, 3)),
            b2=rng.normal(size=3),
        )

    def test_round_trip_at_float32_precision(self, tmp_path):
        path = str(tmp_path / "model.amx")
        model = self._model()
        write_toy_model(path, model)
        got = read_toy_model(path)
        assert got.shape == model.shape
        np.testing.assert_array_equal(
            got.flat_params(), model.flat_params().astype(np.float32).astype(np.float64)
        )

    def test_extra_metadata_is_stored_but_cannot_collide(self, tmp_path):
        path = str(tmp_path / "model.amx")
        write_toy_model(path, self._model(), extra_metadata={"train_seed": 7})
        _, meta = read_amx(path)
        assert meta["train_seed"] == 7
        assert meta["kind"] == "toy_ffn"
        with pytest.raises(InvalidParameterError):
            write_toy_model(path, self._model(), extra_metadata={"kind": "other"})

    def test_rejects_non_checkpoint_amx(self, tmp_path):
        path = str(tmp_path / "acts.amx")
        write_amx(path, np.ones((2, 2)))
        with pytest.raises(InvalidDataError, match="checkpoint"):
            read_toy_model(path)
