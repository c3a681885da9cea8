"""Finite-difference verification of the hand-written backward passes.

The analytic gradient of the total loss is compared element by element
against central differences.  The loss must be a deterministic, smooth
function of the parameters for the comparison to mean anything, so the
check pins the reparameterization noise and forces full teacher forcing
(sampled feed-back tokens would make the loss jump when an argmax flips).
"""

from __future__ import annotations

import numpy as np

from .config import VaeConfig
from .model import Batch, forward_backward
from .training import kl_beta


def grad_check(
    params: dict,
    config: VaeConfig,
    batch: Batch,
    epsilon: float = 1e-5,
    noise: np.ndarray | None = None,
) -> float:
    """Max relative error between analytic and numerical gradients.

    Relative error per element is |g_a - g_n| / max(|g_a| + |g_n|, 1e-8);
    parameters the loss never touches contribute exactly zero.  The active
    loss terms follow the config's beta_kl / lambda_disc / lambda_cont.
    """
    if noise is None:
        noise = np.random.default_rng(config.seed).standard_normal(
            (batch.tokens.shape[0], config.latent_dim)
        )
    beta = kl_beta(config, config.kl_anneal_epochs or 1)

    def total(p):
        losses, _ = forward_backward(
            p, config, batch, beta=beta, noise=noise, tf_rate=1.0, compute_grads=False
        )
        return losses["total"]

    _, grads = forward_backward(
        params, config, batch, beta=beta, noise=noise, tf_rate=1.0
    )

    worst = 0.0
    for name, value in params.items():
        flat = value.ravel()
        flat_grad = grads[name].ravel()
        for index in range(flat.size):
            original = flat[index]
            flat[index] = original + epsilon
            upper = total(params)
            flat[index] = original - epsilon
            lower = total(params)
            flat[index] = original
            numeric = (upper - lower) / (2.0 * epsilon)
            analytic = flat_grad[index]
            denominator = max(abs(analytic) + abs(numeric), 1e-8)
            worst = max(worst, abs(analytic - numeric) / denominator)
    return worst
