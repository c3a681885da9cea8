"""JSON checkpoints for the VAE.

Weights are stored as flat float lists (Python's repr round-trips float64
exactly), together with the model config, token-vocabulary config, epoch
counter, and loss history — everything needed to resume training or to
regenerate identical output.  Files are written atomically.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..remi import VocabConfig
from .config import VaeConfig

FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


@dataclass
class Checkpoint:
    params: dict[str, np.ndarray]
    config: VaeConfig
    vocab: VocabConfig
    epoch: int
    history: list[dict]


def _to_document(checkpoint: Checkpoint) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "config": checkpoint.config.to_dict(),
        "vocab": checkpoint.vocab.to_dict(),
        "epoch": checkpoint.epoch,
        "history": checkpoint.history,
        "params": {
            name: {"shape": list(value.shape), "data": value.ravel().tolist()}
            for name, value in checkpoint.params.items()
        },
    }


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    path = Path(path)
    descriptor, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(descriptor, "wb") as handle:
            handle.write(data)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> None:
    document = _to_document(checkpoint)
    atomic_write_bytes(path, json.dumps(document, sort_keys=True).encode())


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, json.JSONDecodeError) as error:
        raise CheckpointError(f"cannot read checkpoint {path}: {error}") from error
    if document.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"checkpoint format {document.get('format_version')} not supported"
        )
    params = {
        name: np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
        for name, entry in document["params"].items()
    }
    return Checkpoint(
        params=params,
        config=VaeConfig.from_dict(document["config"]),
        vocab=VocabConfig.from_dict(document["vocab"]),
        epoch=int(document["epoch"]),
        history=list(document["history"]),
    )


def checkpoint_hash(path: str | Path) -> str:
    """Content hash of a checkpoint file; identifies the model in metadata."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
