"""Hyperparameters for the bar-level sequence VAE."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class VaeConfig:
    vocab_size: int
    embed_dim: int = 32
    hidden_dim: int = 64
    latent_dim: int = 16
    probe_hidden: int = 8
    max_seq_len: int = 48
    teacher_forcing_rate: float = 0.8
    beta_kl: float = 0.1
    kl_anneal_epochs: int = 10
    lambda_disc: float = 0.0
    lambda_cont: float = 0.0
    detach_probe_gradients: bool = False
    learning_rate: float = 1e-3
    batch_size: int = 16
    epochs: int = 30
    optimizer: str = "sgd"
    grad_clip: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 2:
            raise ValueError("latent_dim must be >= 2 (dims 0/1 carry valence/arousal)")
        if self.vocab_size < 4:
            raise ValueError("vocab_size must cover the reserved ids")
        if not 0.0 <= self.teacher_forcing_rate <= 1.0:
            raise ValueError("teacher_forcing_rate must lie in [0, 1]")
        if min(self.beta_kl, self.lambda_disc, self.lambda_cont) < 0:
            raise ValueError("loss weights must be non-negative")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "VaeConfig":
        return cls(**doc)
