import json

import numpy as np
import pytest

from scenescore.remi import VocabConfig
from scenescore.vae.checkpoint import (
    FORMAT_VERSION,
    Checkpoint,
    CheckpointError,
    atomic_write_bytes,
    checkpoint_hash,
    load_checkpoint,
    save_checkpoint,
)
from scenescore.vae.config import VaeConfig
from scenescore.vae.model import init_params


def make_checkpoint() -> Checkpoint:
    config = VaeConfig(
        vocab_size=12, embed_dim=6, hidden_dim=8, latent_dim=4,
        probe_hidden=4, max_seq_len=12, seed=7,
    )
    return Checkpoint(
        params=init_params(config),
        config=config,
        vocab=VocabConfig(),
        epoch=3,
        history=[{"epoch": 1, "recon": 2.5, "kl": 0.1, "reg_disc": 0.0,
                  "reg_cont": 0.0, "total": 2.6}],
    )


class TestRoundTrip:
    def test_weights_survive_exactly(self, tmp_path):
        path = tmp_path / "model.json"
        original = make_checkpoint()
        save_checkpoint(path, original)
        loaded = load_checkpoint(path)
        assert set(loaded.params) == set(original.params)
        for name in original.params:
            # Bit-exact: JSON float repr round-trips float64.
            assert np.array_equal(loaded.params[name], original.params[name])
            assert loaded.params[name].dtype == np.float64

    def test_configs_and_history_survive(self, tmp_path):
        path = tmp_path / "model.json"
        original = make_checkpoint()
        save_checkpoint(path, original)
        loaded = load_checkpoint(path)
        assert loaded.config == original.config
        assert loaded.vocab == original.vocab
        assert loaded.epoch == 3
        assert loaded.history == original.history

    def test_document_shape(self, tmp_path):
        path = tmp_path / "model.json"
        save_checkpoint(path, make_checkpoint())
        document = json.loads(path.read_text())
        assert document["format_version"] == FORMAT_VERSION
        assert set(document) == {
            "format_version", "config", "vocab", "epoch", "history", "params",
        }
        entry = document["params"]["mu_W"]
        assert entry["shape"] == [16, 4]
        assert len(entry["data"]) == 64


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "absent.json")

    def test_corrupt_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ not json")
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_wrong_format_version(self, tmp_path):
        path = tmp_path / "future.json"
        save_checkpoint(path, make_checkpoint())
        document = json.loads(path.read_text())
        document["format_version"] = 999
        path.write_text(json.dumps(document))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)


class TestAtomicWrite:
    def test_writes_content(self, tmp_path):
        path = tmp_path / "file.bin"
        atomic_write_bytes(path, b"hello")
        assert path.read_bytes() == b"hello"

    def test_overwrites_in_place(self, tmp_path):
        path = tmp_path / "file.bin"
        path.write_bytes(b"old")
        atomic_write_bytes(path, b"new")
        assert path.read_bytes() == b"new"

    def test_no_temp_files_left(self, tmp_path):
        path = tmp_path / "file.bin"
        atomic_write_bytes(path, b"data")
        assert [p.name for p in tmp_path.iterdir()] == ["file.bin"]


class TestHash:
    def test_stable_and_content_sensitive(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        checkpoint = make_checkpoint()
        save_checkpoint(a, checkpoint)
        save_checkpoint(b, checkpoint)
        assert checkpoint_hash(a) == checkpoint_hash(b)
        assert len(checkpoint_hash(a)) == 16

        checkpoint.epoch = 4
        save_checkpoint(b, checkpoint)
        assert checkpoint_hash(a) != checkpoint_hash(b)
