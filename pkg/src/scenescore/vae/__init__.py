"""Recurrent VAE over single-bar token sequences, in plain NumPy."""

from .checkpoint import (
    Checkpoint,
    CheckpointError,
    atomic_write_bytes,
    checkpoint_hash,
    load_checkpoint,
    save_checkpoint,
)
from .config import VaeConfig
from .gradcheck import grad_check
from .losses import (
    AROUSAL_DIM,
    VALENCE_DIM,
    BatchTooSmallError,
    MissingLabelsError,
    quadrant_to_gt,
)
from .model import (
    Batch,
    BOS_ID,
    EOS_ID,
    MissingTargetError,
    PAD_ID,
    TokenOutOfVocabError,
    decode,
    encode,
    forward_backward,
    init_params,
)
from .training import (
    DivergedLossError,
    EmptyCorpusError,
    HISTORY_COLUMNS,
    LabeledBar,
    history_to_csv,
    kl_beta,
    train,
)

__all__ = [
    "AROUSAL_DIM",
    "BOS_ID",
    "Batch",
    "BatchTooSmallError",
    "Checkpoint",
    "CheckpointError",
    "DivergedLossError",
    "EOS_ID",
    "EmptyCorpusError",
    "HISTORY_COLUMNS",
    "LabeledBar",
    "MissingLabelsError",
    "MissingTargetError",
    "PAD_ID",
    "TokenOutOfVocabError",
    "VALENCE_DIM",
    "VaeConfig",
    "atomic_write_bytes",
    "checkpoint_hash",
    "decode",
    "encode",
    "forward_backward",
    "grad_check",
    "history_to_csv",
    "init_params",
    "kl_beta",
    "load_checkpoint",
    "quadrant_to_gt",
    "save_checkpoint",
    "train",
]
