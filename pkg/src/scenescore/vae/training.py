"""Training loop for the bar VAE.

Mini-batch gradient descent with a linear KL warm-up (beta rises from 0 to
beta_kl over the first kl_anneal_epochs epochs) to keep the decoder from
ignoring the latent early on.  Everything is driven by one seeded
Generator, so identical (corpus, config) inputs reproduce the loss history
bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .config import VaeConfig
from .losses import MissingLabelsError, quadrant_to_gt
from .model import Batch, PAD_ID, forward_backward, init_params

HISTORY_COLUMNS = ("epoch", "recon", "kl", "reg_disc", "reg_cont", "total")


class EmptyCorpusError(Exception):
    pass


class DivergedLossError(Exception):
    pass


@dataclass
class LabeledBar:
    """One training unit: token ids of a single bar plus optional labels."""

    tokens: list[int]
    quadrant: int | None = None
    va: tuple[float, float] | None = None


def kl_beta(config: VaeConfig, epoch: int) -> float:
    """Annealed KL weight for a 1-based epoch index."""
    if config.kl_anneal_epochs <= 0:
        return config.beta_kl
    return config.beta_kl * min(1.0, epoch / config.kl_anneal_epochs)


def pad_tokens(bars: list[LabeledBar]) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.array([len(bar.tokens) for bar in bars], dtype=np.int64)
    tokens = np.full((len(bars), int(lengths.max())), PAD_ID, dtype=np.int64)
    for row, bar in enumerate(bars):
        tokens[row, : lengths[row]] = bar.tokens
    return tokens, lengths


def make_batch(bars: list[LabeledBar], config: VaeConfig) -> Batch:
    """Assemble a padded Batch, materializing only the labels the config needs."""
    tokens, lengths = pad_tokens(bars)
    v_gt = a_gt = va = None
    if config.lambda_disc > 0.0:
        if any(bar.quadrant is None for bar in bars):
            raise MissingLabelsError(
                "lambda_disc > 0 but some bars carry no quadrant label"
            )
        gts = np.array([quadrant_to_gt(bar.quadrant) for bar in bars], dtype=np.float64)
        v_gt, a_gt = gts[:, 0], gts[:, 1]
    if config.lambda_cont > 0.0:
        if any(bar.va is None for bar in bars):
            raise MissingLabelsError("lambda_cont > 0 but some bars carry no VA label")
        va = np.array([bar.va for bar in bars], dtype=np.float64)
    return Batch(tokens=tokens, lengths=lengths, v_gt=v_gt, a_gt=a_gt, va=va)


def _sgd_step(params, grads, lr, state):
    for name, grad in grads.items():
        params[name] -= lr * grad
    return state


def _adam_step(params, grads, lr, state, beta1=0.9, beta2=0.999, eps=1e-8):
    state["t"] += 1
    t = state["t"]
    for name, grad in grads.items():
        m = state["m"][name] = beta1 * state["m"][name] + (1 - beta1) * grad
        v = state["v"][name] = beta2 * state["v"][name] + (1 - beta2) * grad * grad
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        params[name] -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return state


def clip_gradients(grads, max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / total
        for grad in grads.values():
            grad *= scale
    return total


def train(
    corpus: list[LabeledBar],
    config: VaeConfig,
    *,
    initial_params: dict | None = None,
    start_epoch: int = 0,
    history: list[dict] | None = None,
    on_epoch=None,
):
    """Train (or finetune) on a corpus of single bars.

    Returns (params, history); history holds one record per epoch with the
    unweighted loss components and the weighted total that was optimized.
    Raises EmptyCorpusError for an empty corpus, MissingLabelsError when an
    active regularizer lacks labels, and DivergedLossError the moment any
    loss component stops being finite.
    """
    if not corpus:
        raise EmptyCorpusError("training corpus is empty")
    params = initial_params if initial_params is not None else init_params(config)
    history = list(history) if history else []
    rng = np.random.default_rng(config.seed)

    opt_state = None
    if config.optimizer == "adam":
        opt_state = {
            "t": 0,
            "m": {k: np.zeros_like(v) for k, v in params.items()},
            "v": {k: np.zeros_like(v) for k, v in params.items()},
        }
    step_fn = _adam_step if config.optimizer == "adam" else _sgd_step

    n = len(corpus)
    for epoch in range(start_epoch + 1, start_epoch + config.epochs + 1):
        beta = kl_beta(config, epoch)
        order = rng.permutation(n)
        sums = dict.fromkeys(("recon", "kl", "reg_disc", "reg_cont", "total"), 0.0)
        seen = 0
        for begin in range(0, n, config.batch_size):
            rows = order[begin : begin + config.batch_size]
            batch = make_batch([corpus[i] for i in rows], config)
            noise = rng.standard_normal((len(rows), config.latent_dim))
            losses, grads = forward_backward(
                params,
                config,
                batch,
                beta=beta,
                noise=noise,
                tf_rate=config.teacher_forcing_rate,
                rng=rng,
            )
            if not all(np.isfinite(v) for v in losses.values()):
                raise DivergedLossError(
                    f"non-finite loss at epoch {epoch}, "
                    f"batch starting at {begin}: {losses}"
                )
            clip_gradients(grads, config.grad_clip)
            opt_state = step_fn(params, grads, config.learning_rate, opt_state)
            for key in sums:
                sums[key] += losses[key] * len(rows)
            seen += len(rows)

        record = {"epoch": epoch}
        record.update({key: sums[key] / seen for key in sums})
        history.append(record)
        if on_epoch is not None:
            on_epoch(record)
    return params, history


def history_to_csv(history: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=HISTORY_COLUMNS)
    writer.writeheader()
    for record in history:
        writer.writerow({key: record[key] for key in HISTORY_COLUMNS})
    return buffer.getvalue()
