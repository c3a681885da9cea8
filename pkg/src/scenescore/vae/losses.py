"""Loss terms for the sequence VAE, each with its analytic gradient.

The latent is steered by two regularizers: a discrete one that trains tiny
sentiment probes on the first two latent dimensions with binary targets
derived from circumplex quadrants, and a continuous one that pushes
pairwise latent differences to agree in sign with pairwise label
differences via (tanh(dz) - sgn(dlabel))^2 over all batch pairs.
"""

from __future__ import annotations

import numpy as np

from ..sentiment import Quadrant
from .nn import sigmoid, softplus

#: Latent dimensions carrying the two sentiment axes.
VALENCE_DIM = 0
AROUSAL_DIM = 1


class MissingLabelsError(Exception):
    """A regularizer was requested but the batch carries no labels for it."""


class BatchTooSmallError(Exception):
    """The pairwise regularizer needs at least two samples."""


def quadrant_to_gt(quadrant: int | Quadrant) -> tuple[int, int]:
    """Binary (valence, arousal) targets for a circumplex quadrant."""
    mapping = {1: (1, 1), 2: (0, 1), 3: (0, 0), 4: (1, 0)}
    try:
        return mapping[int(quadrant)]
    except KeyError:
        raise ValueError(f"quadrant must be 1..4, got {quadrant!r}") from None


def softmax_cross_entropy(logits, targets, mask):
    """Mean cross-entropy over the unmasked steps.

    logits: (N, S, V); targets: (N, S) int ids; mask: (N, S) {0,1}.
    Returns (loss, dlogits).
    """
    n_valid = int(mask.sum())
    if n_valid == 0:
        raise ValueError("mask excludes every step")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    partition = exp.sum(axis=-1, keepdims=True)
    log_probs = shifted - np.log(partition)

    N, S, _ = logits.shape
    rows = np.arange(N)[:, None]
    cols = np.arange(S)[None, :]
    picked = log_probs[rows, cols, targets]
    loss = -(picked * mask).sum() / n_valid

    dlogits = exp / partition
    dlogits[rows, cols, targets] -= 1.0
    dlogits *= mask[..., None] / n_valid
    return loss, dlogits


def gaussian_kl(mu, logvar):
    """KL(q(z|x) || N(0, I)) summed over latent dims, averaged over batch."""
    n = mu.shape[0]
    loss = -0.5 * np.sum(1.0 + logvar - mu * mu - np.exp(logvar)) / n
    dmu = mu / n
    dlogvar = -0.5 * (1.0 - np.exp(logvar)) / n
    return loss, dmu, dlogvar


def probe_forward(z_axis, W1, b1, W2, b2):
    """Single-hidden-layer probe: scalar latent -> tanh hidden -> logit."""
    column = z_axis[:, None]
    pre = column @ W1 + b1
    hidden = np.tanh(pre)
    logit = (hidden @ W2 + b2)[:, 0]
    cache = (column, hidden, W1, W2)
    return logit, cache


def probe_backward(dlogit, cache):
    column, hidden, W1, W2 = cache
    dl = dlogit[:, None]
    dW2 = hidden.T @ dl
    db2 = dl.sum(axis=0)
    dhidden = dl @ W2.T
    dpre = dhidden * (1.0 - hidden * hidden)
    dW1 = column.T @ dpre
    db1 = dpre.sum(axis=0)
    dz_axis = (dpre @ W1.T)[:, 0]
    return dz_axis, dW1, db1, dW2, db2


def bce_with_logits(logits, targets):
    """Mean binary cross-entropy on raw logits. Returns (loss, dlogits)."""
    n = logits.shape[0]
    loss = float(np.mean(softplus(logits) - logits * targets))
    dlogits = (sigmoid(logits) - targets) / n
    return loss, dlogits


def binary_sentiment_loss(z, v_gt, a_gt, params, prefix=("probe_v", "probe_a")):
    """BCE of the two probes against quadrant-derived binary targets.

    Returns (loss, dz, probe_grads): dz is the gradient w.r.t. the full
    latent batch (zero outside the two sentiment dims), probe_grads maps
    probe parameter names to gradients.
    """
    if v_gt is None or a_gt is None:
        raise MissingLabelsError("quadrant labels are required for the binary loss")
    dz = np.zeros_like(z)
    probe_grads: dict[str, np.ndarray] = {}
    total = 0.0
    for name, axis, targets in (
        (prefix[0], VALENCE_DIM, v_gt),
        (prefix[1], AROUSAL_DIM, a_gt),
    ):
        logit, cache = probe_forward(
            z[:, axis],
            params[f"{name}_W1"],
            params[f"{name}_b1"],
            params[f"{name}_W2"],
            params[f"{name}_b2"],
        )
        loss, dlogit = bce_with_logits(logit, targets)
        total += loss
        dz_axis, dW1, db1, dW2, db2 = probe_backward(dlogit, cache)
        dz[:, axis] += dz_axis
        probe_grads[f"{name}_W1"] = dW1
        probe_grads[f"{name}_b1"] = db1
        probe_grads[f"{name}_W2"] = dW2
        probe_grads[f"{name}_b2"] = db2
    return total, dz, probe_grads


def pairwise_sign_loss(z_axis, labels):
    """Mean of (tanh(z_i - z_j) - sgn(label_i - label_j))^2 over pairs i<j."""
    n = z_axis.shape[0]
    if n < 2:
        raise BatchTooSmallError("pairwise loss needs a batch of at least 2")
    diff = z_axis[:, None] - z_axis[None, :]
    sign = np.sign(labels[:, None] - labels[None, :])
    tanh_diff = np.tanh(diff)
    upper = np.triu_indices(n, k=1)
    residual = tanh_diff[upper] - sign[upper]
    n_pairs = n * (n - 1) // 2
    loss = float(np.sum(residual * residual) / n_pairs)

    dtanh = np.zeros((n, n))
    dtanh[upper] = 2.0 * residual / n_pairs
    ddiff = dtanh * (1.0 - tanh_diff * tanh_diff)
    dz_axis = ddiff.sum(axis=1) - ddiff.sum(axis=0)
    return loss, dz_axis


def continuous_sentiment_loss(z, va):
    """Sum of the pairwise sign losses on the valence and arousal dims.

    va: (N, 2) continuous labels. Returns (loss, dz).
    """
    if va is None:
        raise MissingLabelsError("VA labels are required for the continuous loss")
    dz = np.zeros_like(z)
    loss_v, dz_v = pairwise_sign_loss(z[:, VALENCE_DIM], va[:, 0])
    loss_a, dz_a = pairwise_sign_loss(z[:, AROUSAL_DIM], va[:, 1])
    dz[:, VALENCE_DIM] += dz_v
    dz[:, AROUSAL_DIM] += dz_a
    return loss_v + loss_a, dz
