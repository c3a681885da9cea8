"""Bar-level sequence VAE: bidirectional LSTM encoder, LSTM decoder.

The encoder reads a token sequence forward and backward (one layer each),
concatenates the two final hidden states, and maps them to a Gaussian
posterior (mu, logvar).  The decoder initializes its state from z through a
tanh projection and receives z concatenated to the input embedding at every
step, a standard guard against the decoder learning to ignore the latent.
All backward passes are written by hand against the forward caches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import VaeConfig
from .losses import (
    binary_sentiment_loss,
    continuous_sentiment_loss,
    gaussian_kl,
    softmax_cross_entropy,
)
from .nn import lstm_step_backward, lstm_step_forward

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2


class TokenOutOfVocabError(Exception):
    pass


class MissingTargetError(Exception):
    """Teacher forcing was requested without a target sequence."""


def init_params(config: VaeConfig, rng: np.random.Generator | None = None):
    """Fresh parameter dict; layout documents every learnable tensor.

    Probe first-layer weights start non-negative so that at init a larger
    latent value maps to a larger probe logit; training then only has to
    strengthen (never flip) the axis orientation the acceptance checks and
    attribute arithmetic assume.
    """
    rng = rng or np.random.default_rng(config.seed)
    E, H, L = config.embed_dim, config.hidden_dim, config.latent_dim
    V, P = config.vocab_size, config.probe_hidden

    def uniform(rows, cols, fan_in):
        scale = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-scale, scale, (rows, cols))

    def lstm_bias():
        bias = np.zeros(4 * H)
        bias[H : 2 * H] = 1.0  # forget-gate bias keeps early memory open
        return bias

    params: dict[str, np.ndarray] = {"embed": rng.uniform(-0.1, 0.1, (V, E))}
    for direction in ("enc_fwd", "enc_bwd"):
        params[f"{direction}_Wx"] = uniform(E, 4 * H, E)
        params[f"{direction}_Wh"] = uniform(H, 4 * H, H)
        params[f"{direction}_b"] = lstm_bias()
    params["mu_W"] = uniform(2 * H, L, 2 * H)
    params["mu_b"] = np.zeros(L)
    params["logvar_W"] = uniform(2 * H, L, 2 * H)
    params["logvar_b"] = np.zeros(L)
    params["dec_init_W"] = uniform(L, 2 * H, L)
    params["dec_init_b"] = np.zeros(2 * H)
    params["dec_Wx"] = uniform(E + L, 4 * H, E + L)
    params["dec_Wh"] = uniform(H, 4 * H, H)
    params["dec_b"] = lstm_bias()
    params["out_W"] = uniform(H, V, H)
    params["out_b"] = np.zeros(V)
    for probe in ("probe_v", "probe_a"):
        params[f"{probe}_W1"] = np.abs(uniform(1, P, 1))
        params[f"{probe}_b1"] = np.zeros(P)
        params[f"{probe}_W2"] = np.abs(uniform(P, 1, P))
        params[f"{probe}_b2"] = np.zeros(1)
    return params


def zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(value) for name, value in params.items()}


def _run_direction(embedded, Wx, Wh, b):
    N, T, _ = embedded.shape
    H = Wh.shape[0]
    h = np.zeros((N, H))
    c = np.zeros((N, H))
    states = np.empty((T, N, H))
    caches = []
    for t in range(T):
        h, c, cache = lstm_step_forward(embedded[:, t], h, c, Wx, Wh, b)
        states[t] = h
        caches.append(cache)
    return states, caches


def _reverse_within_lengths(tokens, lengths):
    N, T = tokens.shape
    steps = np.broadcast_to(np.arange(T), (N, T))
    source = np.where(steps < lengths[:, None], lengths[:, None] - 1 - steps, steps)
    return np.take_along_axis(tokens, source, axis=1)


def encode_batch(params, tokens, lengths):
    """Posterior parameters for a padded batch.

    tokens: (N, T) int ids padded with PAD_ID; lengths: (N,) true lengths.
    Returns (mu, logvar, cache).
    """
    reversed_tokens = _reverse_within_lengths(tokens, lengths)
    emb_fwd = params["embed"][tokens]
    emb_bwd = params["embed"][reversed_tokens]

    states_f, caches_f = _run_direction(
        emb_fwd, params["enc_fwd_Wx"], params["enc_fwd_Wh"], params["enc_fwd_b"]
    )
    states_b, caches_b = _run_direction(
        emb_bwd, params["enc_bwd_Wx"], params["enc_bwd_Wh"], params["enc_bwd_b"]
    )
    N = tokens.shape[0]
    rows = np.arange(N)
    last_f = states_f[lengths - 1, rows]
    last_b = states_b[lengths - 1, rows]
    h_enc = np.concatenate([last_f, last_b], axis=1)

    mu = h_enc @ params["mu_W"] + params["mu_b"]
    logvar = h_enc @ params["logvar_W"] + params["logvar_b"]
    cache = {
        "tokens": tokens,
        "reversed_tokens": reversed_tokens,
        "lengths": lengths,
        "caches_f": caches_f,
        "caches_b": caches_b,
        "h_enc": h_enc,
    }
    return mu, logvar, cache


def encode_backward(params, grads, cache, dmu, dlogvar):
    h_enc = cache["h_enc"]
    grads["mu_W"] += h_enc.T @ dmu
    grads["mu_b"] += dmu.sum(axis=0)
    grads["logvar_W"] += h_enc.T @ dlogvar
    grads["logvar_b"] += dlogvar.sum(axis=0)
    dh_enc = dmu @ params["mu_W"].T + dlogvar @ params["logvar_W"].T

    H = params["enc_fwd_Wh"].shape[0]
    lengths = cache["lengths"]
    for half, caches, token_key, direction in (
        (dh_enc[:, :H], cache["caches_f"], "tokens", "enc_fwd"),
        (dh_enc[:, H:], cache["caches_b"], "reversed_tokens", "enc_bwd"),
    ):
        tokens = cache[token_key]
        N, T = tokens.shape
        dh = np.zeros((N, H))
        dc = np.zeros((N, H))
        d_embedded = np.empty((N, T, params["embed"].shape[1]))
        for t in range(T - 1, -1, -1):
            at_last = lengths - 1 == t
            if at_last.any():
                dh = dh.copy()
                dh[at_last] += half[at_last]
            dx, dh, dc, dWx, dWh, db = lstm_step_backward(dh, dc, caches[t])
            grads[f"{direction}_Wx"] += dWx
            grads[f"{direction}_Wh"] += dWh
            grads[f"{direction}_b"] += db
            d_embedded[:, t] = dx
        np.add.at(grads["embed"], tokens, d_embedded)


def reparameterize(mu, logvar, noise):
    """z = mu + exp(logvar / 2) * noise, with noise supplied by the caller."""
    return mu + np.exp(0.5 * logvar) * noise


def reparameterize_backward(dz, logvar, noise):
    dmu = dz
    dlogvar = dz * noise * 0.5 * np.exp(0.5 * logvar)
    return dmu, dlogvar


def decoder_initial_state(params, z):
    pre = z @ params["dec_init_W"] + params["dec_init_b"]
    init = np.tanh(pre)
    H = params["dec_Wh"].shape[0]
    return init[:, :H], init[:, H:], init


def decode_batch(params, z, targets, tf_rate, rng=None):
    """Run the decoder over a batch for training.

    targets: (N, S) ids the decoder should produce (bar tokens followed by
    EOS, padded).  Step 0 always receives BOS; later steps receive the
    previous target with probability tf_rate and the previous argmax
    otherwise.  Returns (logits, cache).
    """
    if tf_rate > 0.0 and targets is None:
        raise MissingTargetError("teacher forcing requires target tokens")
    if 0.0 < tf_rate < 1.0 and rng is None:
        raise ValueError("stochastic teacher forcing requires an rng")
    N, S = targets.shape
    V = params["out_W"].shape[1]
    E = params["embed"].shape[1]

    h, c, init = decoder_initial_state(params, z)
    logits = np.empty((N, S, V))
    hidden_states = np.empty((S, N, params["dec_Wh"].shape[0]))
    caches = []
    input_ids = np.empty((N, S), dtype=np.int64)
    previous_argmax = np.full(N, BOS_ID, dtype=np.int64)

    for t in range(S):
        if t == 0:
            ids = np.full(N, BOS_ID, dtype=np.int64)
        elif tf_rate >= 1.0:
            ids = targets[:, t - 1]
        elif tf_rate <= 0.0:
            ids = previous_argmax
        else:
            forced = rng.random(N) < tf_rate
            ids = np.where(forced, targets[:, t - 1], previous_argmax)
        x = np.concatenate([params["embed"][ids], z], axis=1)
        h, c, cache = lstm_step_forward(x, h, c, params["dec_Wx"], params["dec_Wh"], params["dec_b"])
        step_logits = h @ params["out_W"] + params["out_b"]
        logits[:, t] = step_logits
        hidden_states[t] = h
        previous_argmax = step_logits.argmax(axis=1)
        caches.append(cache)
        input_ids[:, t] = ids

    cache = {
        "caches": caches,
        "input_ids": input_ids,
        "hidden_states": hidden_states,
        "init": init,
        "z": z,
        "embed_dim": E,
    }
    return logits, cache


def decode_backward(params, grads, cache, dlogits):
    """Backpropagate through the decoder; returns dz."""
    caches = cache["caches"]
    input_ids = cache["input_ids"]
    hidden_states = cache["hidden_states"]
    z = cache["z"]
    E = cache["embed_dim"]
    N, S, _ = dlogits.shape
    H = params["dec_Wh"].shape[0]

    dz = np.zeros_like(z)
    dh = np.zeros((N, H))
    dc = np.zeros((N, H))
    d_embedded = np.empty((N, S, E))
    for t in range(S - 1, -1, -1):
        step = dlogits[:, t]
        grads["out_W"] += hidden_states[t].T @ step
        grads["out_b"] += step.sum(axis=0)
        dh = dh + step @ params["out_W"].T
        dx, dh, dc, dWx, dWh, db = lstm_step_backward(dh, dc, caches[t])
        grads["dec_Wx"] += dWx
        grads["dec_Wh"] += dWh
        grads["dec_b"] += db
        d_embedded[:, t] = dx[:, :E]
        dz += dx[:, E:]
    np.add.at(grads["embed"], input_ids, d_embedded)

    # initial state came from tanh(z @ W + b), split into (h0, c0)
    dinit = np.concatenate([dh, dc], axis=1)
    dpre = dinit * (1.0 - cache["init"] ** 2)
    grads["dec_init_W"] += z.T @ dpre
    grads["dec_init_b"] += dpre.sum(axis=0)
    dz += dpre @ params["dec_init_W"].T
    return dz


def encode(params, config: VaeConfig, token_ids) -> tuple[np.ndarray, np.ndarray]:
    """Posterior (mu, logvar) for a single token sequence."""
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise ValueError("expected a non-empty 1-D token sequence")
    if ids.min() < 0 or ids.max() >= config.vocab_size:
        raise TokenOutOfVocabError(
            f"token ids must lie in [0, {config.vocab_size}), got "
            f"[{ids.min()}, {ids.max()}]"
        )
    mu, logvar, _ = encode_batch(params, ids[None, :], np.array([ids.size]))
    return mu[0], logvar[0]


def decode(
    params,
    config: VaeConfig,
    z,
    target_tokens=None,
    tf_rate: float = 0.0,
    rng: np.random.Generator | None = None,
    constraint=None,
    max_len: int | None = None,
):
    """Decode a single latent greedily.

    With tf_rate > 0 a target sequence must be given and feeds the decoder
    its step inputs with that probability.  ``constraint`` (an object with
    allowed_mask()/advance(id)) restricts which ids are eligible at each
    step; decoding stops at EOS or after max_len steps.  Returns
    (logits, ids) where ids excludes BOS/EOS.
    """
    if tf_rate > 0.0 and target_tokens is None:
        raise MissingTargetError("tf_rate > 0 requires target_tokens")
    if 0.0 < tf_rate < 1.0 and rng is None:
        raise ValueError("stochastic teacher forcing requires an rng")
    max_len = max_len or config.max_seq_len
    z = np.asarray(z, dtype=np.float64)[None, :]

    h, c, _ = decoder_initial_state(params, z)
    previous = BOS_ID
    out_logits = []
    out_ids = []
    steps = len(target_tokens) + 1 if target_tokens is not None else max_len
    for t in range(min(steps, max_len)):
        x = np.concatenate([params["embed"][[previous]], z], axis=1)
        h, c, _ = lstm_step_forward(x, h, c, params["dec_Wx"], params["dec_Wh"], params["dec_b"])
        logits = (h @ params["out_W"] + params["out_b"])[0]
        out_logits.append(logits)
        if constraint is not None:
            masked = np.where(constraint.allowed_mask(), logits, -np.inf)
            chosen = int(masked.argmax())
        else:
            chosen = int(logits.argmax())
        if chosen == EOS_ID:
            break
        out_ids.append(chosen)
        if constraint is not None:
            constraint.advance(chosen)

        if target_tokens is not None and t < len(target_tokens):
            if tf_rate >= 1.0 or (tf_rate > 0.0 and rng.random() < tf_rate):
                previous = int(target_tokens[t])
            else:
                previous = chosen
        else:
            previous = chosen
    return np.array(out_logits), out_ids


@dataclass
class Batch:
    """Padded training batch; label arrays are optional."""

    tokens: np.ndarray  # (N, T) int ids, PAD-padded
    lengths: np.ndarray  # (N,)
    v_gt: np.ndarray | None = None  # (N,) binary
    a_gt: np.ndarray | None = None  # (N,) binary
    va: np.ndarray | None = None  # (N, 2) continuous


def build_decoder_targets(tokens, lengths):
    """Append EOS after each sequence: targets[i] = tokens[i][:len] + EOS."""
    N, T = tokens.shape
    targets = np.full((N, T + 1), PAD_ID, dtype=np.int64)
    targets[:, :T] = tokens
    targets[np.arange(N), lengths] = EOS_ID
    mask = np.arange(T + 1)[None, :] < (lengths + 1)[:, None]
    return targets, mask.astype(np.float64)


def forward_backward(
    params,
    config: VaeConfig,
    batch: Batch,
    *,
    beta: float,
    noise: np.ndarray,
    tf_rate: float,
    rng: np.random.Generator | None = None,
    compute_grads: bool = True,
):
    """One full loss evaluation, optionally with gradients.

    ``noise`` is the reparameterization draw, passed in so that training
    controls the rng stream and the gradient check can hold it fixed.
    Returns (losses, grads) where losses carries the unweighted components
    and the weighted total actually optimized.
    """
    mu, logvar, enc_cache = encode_batch(params, batch.tokens, batch.lengths)
    z = reparameterize(mu, logvar, noise)
    targets, mask = build_decoder_targets(batch.tokens, batch.lengths)
    logits, dec_cache = decode_batch(params, z, targets, tf_rate, rng)

    recon, dlogits = softmax_cross_entropy(logits, targets, mask)
    kl, dmu_kl, dlogvar_kl = gaussian_kl(mu, logvar)

    disc = 0.0
    dz_disc = None
    probe_grads = None
    if config.lambda_disc > 0.0:
        disc, dz_disc, probe_grads = binary_sentiment_loss(
            z, batch.v_gt, batch.a_gt, params
        )
    cont = 0.0
    dz_cont = None
    if config.lambda_cont > 0.0:
        cont, dz_cont = continuous_sentiment_loss(z, batch.va)

    total = recon + beta * kl + config.lambda_disc * disc + config.lambda_cont * cont
    losses = {
        "recon": float(recon),
        "kl": float(kl),
        "reg_disc": float(disc),
        "reg_cont": float(cont),
        "total": float(total),
    }
    if not compute_grads:
        return losses, None

    grads = zero_grads(params)
    dz = decode_backward(params, grads, dec_cache, dlogits)
    if dz_disc is not None:
        for name, grad in probe_grads.items():
            grads[name] += config.lambda_disc * grad
        if not config.detach_probe_gradients:
            dz += config.lambda_disc * dz_disc
    if dz_cont is not None:
        dz += config.lambda_cont * dz_cont

    dmu, dlogvar = reparameterize_backward(dz, logvar, noise)
    dmu += beta * dmu_kl
    dlogvar += beta * dlogvar_kl
    encode_backward(params, grads, enc_cache, dmu, dlogvar)
    return losses, grads
