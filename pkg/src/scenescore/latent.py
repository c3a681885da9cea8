"""Latent-space steering: attribute vectors, conditioning, interpolation.

Four attribute vectors are the mean encoder latents of the quadrant groups
(high valence = quadrants 1+4, high arousal = quadrants 1+2, and their
complements).  A scene's (V, A) point picks one vector per axis — the high
one when the coordinate clears its threshold, the low one otherwise — and
scales each by the coordinate's magnitude; adding that combination to a
base latent steers the decoder.  An alternative mode shifts the two
regularized latent dimensions by V and A directly.  The two mechanisms are
never composed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .midi import DEFAULT_TEMPO_BPM, MidiPiece, NoteEvent, read_midi
from .remi import (
    BarGrammar,
    TokenKind,
    Vocabulary,
    chunk_bars,
    detokenize,
    tokenize,
    trim_incomplete_group,
)
from .vae import AROUSAL_DIM, VALENCE_DIM, VaeConfig, decode, encode

DEFAULT_AROUSAL_THRESHOLD = -0.25

GROUP_QUADRANTS = {
    "z_vh": (1, 4),
    "z_vl": (2, 3),
    "z_ah": (1, 2),
    "z_al": (3, 4),
}


class EmptyGroupError(Exception):
    def __init__(self, group: str):
        super().__init__(f"no corpus samples fall in the {group} group")
        self.group = group


class LengthMismatchError(Exception):
    pass


class ModelNotLoadedError(Exception):
    pass


@dataclass
class AttributeVectors:
    """Per-axis steering vectors in latent space, plus provenance counts."""

    high_valence: np.ndarray
    low_valence: np.ndarray
    high_arousal: np.ndarray
    low_arousal: np.ndarray
    counts: dict[str, int]
    latent_dim: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "z_vh": self.high_valence.tolist(),
                "z_vl": self.low_valence.tolist(),
                "z_ah": self.high_arousal.tolist(),
                "z_al": self.low_arousal.tolist(),
                "counts": self.counts,
                "latent_dim": self.latent_dim,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "AttributeVectors":
        doc = json.loads(text)
        return cls(
            high_valence=np.array(doc["z_vh"], dtype=np.float64),
            low_valence=np.array(doc["z_vl"], dtype=np.float64),
            high_arousal=np.array(doc["z_ah"], dtype=np.float64),
            low_arousal=np.array(doc["z_al"], dtype=np.float64),
            counts={k: int(v) for k, v in doc["counts"].items()},
            latent_dim=int(doc["latent_dim"]),
        )


def compute_attribute_vectors(
    params: dict,
    config: VaeConfig,
    corpus,
    mode: str = "mean",
) -> AttributeVectors:
    """Group means of encoder mu over a labeled corpus of bars.

    corpus: iterable of LabeledBar with quadrant set.  mode "mean" stores
    the literal group means; "diff" stores each mean re-centered by the
    opposite group (difference-of-means), a sharper direction at the cost
    of no longer being a valid latent on its own.
    """
    if mode not in ("mean", "diff"):
        raise ValueError(f"mode must be 'mean' or 'diff', got {mode!r}")
    sums = {name: np.zeros(config.latent_dim) for name in GROUP_QUADRANTS}
    counts = dict.fromkeys(GROUP_QUADRANTS, 0)
    for bar in corpus:
        if bar.quadrant is None:
            continue
        mu, _ = encode(params, config, bar.tokens)
        for name, quadrants in GROUP_QUADRANTS.items():
            if bar.quadrant in quadrants:
                sums[name] += mu
                counts[name] += 1
    for name, count in counts.items():
        if count == 0:
            raise EmptyGroupError(name)
    means = {name: sums[name] / counts[name] for name in GROUP_QUADRANTS}
    if mode == "diff":
        means = {
            "z_vh": means["z_vh"] - means["z_vl"],
            "z_vl": means["z_vl"] - means["z_vh"],
            "z_ah": means["z_ah"] - means["z_al"],
            "z_al": means["z_al"] - means["z_ah"],
        }
    return AttributeVectors(
        high_valence=means["z_vh"],
        low_valence=means["z_vl"],
        high_arousal=means["z_ah"],
        low_arousal=means["z_al"],
        counts=counts,
        latent_dim=config.latent_dim,
    )


def condition_vector(
    valence: float,
    arousal: float,
    attrs: AttributeVectors,
    alpha: float = DEFAULT_AROUSAL_THRESHOLD,
) -> np.ndarray:
    """Magnitude-weighted combination of one valence and one arousal vector.

    The valence axis switches on sign (V >= 0 picks the high vector); the
    arousal axis switches at the threshold alpha (A >= alpha picks high),
    which sits below zero because mildly negative arousal still reads as
    energetic in practice.
    """
    for value, name in ((valence, "valence"), (arousal, "arousal")):
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"{name} {value} outside [-1, 1]")
    v_vec = attrs.high_valence if valence >= 0.0 else attrs.low_valence
    a_vec = attrs.high_arousal if arousal >= alpha else attrs.low_arousal
    return abs(valence) * v_vec + abs(arousal) * a_vec


def tune(base: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Element-wise sum of a base latent and a steering vector."""
    base = np.asarray(base, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if base.shape != delta.shape:
        raise LengthMismatchError(
            f"latent shapes differ: {base.shape} vs {delta.shape}"
        )
    return base + delta


def shift_regularized(z: np.ndarray, valence: float, arousal: float) -> np.ndarray:
    """Shift the two regularized latent dimensions by V and A directly."""
    shifted = np.array(z, dtype=np.float64, copy=True)
    shifted[VALENCE_DIM] += valence
    shifted[AROUSAL_DIM] += arousal
    return shifted


def interpolate(
    z_start: np.ndarray, z_end: np.ndarray, steps: int
) -> list[np.ndarray]:
    """Evenly spaced latents from z_start to z_end, endpoints included."""
    if steps < 2:
        raise ValueError("interpolation needs at least 2 steps")
    z_start = np.asarray(z_start, dtype=np.float64)
    z_end = np.asarray(z_end, dtype=np.float64)
    if z_start.shape != z_end.shape:
        raise LengthMismatchError(
            f"latent shapes differ: {z_start.shape} vs {z_end.shape}"
        )
    fractions = [k / (steps - 1) for k in range(steps)]
    return [(1.0 - f) * z_start + f * z_end for f in fractions]


def encode_inspiration(
    midi_bytes: bytes, params: dict, config: VaeConfig, vocab: Vocabulary
) -> np.ndarray:
    """Mean over per-bar posterior means of an uploaded piece."""
    piece = read_midi(midi_bytes)
    tokens = tokenize(piece, vocab.config)
    mus = []
    for chunk in chunk_bars(tokens):
        mu, _ = encode(params, config, vocab.encode(chunk))
        mus.append(mu)
    return np.mean(mus, axis=0)


@dataclass
class ModelBundle:
    """Everything generation needs: weights, configs, steering vectors."""

    params: dict
    config: VaeConfig
    vocab: Vocabulary
    attrs: AttributeVectors | None = None
    model_hash: str = ""


def decode_bar(bundle: ModelBundle, z: np.ndarray) -> list:
    """Greedy grammar-masked decode of one latent into a legal bar chunk."""
    grammar = BarGrammar(bundle.vocab)
    _, ids = decode(
        bundle.params,
        bundle.config,
        z,
        constraint=grammar,
        max_len=bundle.config.max_seq_len,
    )
    return trim_incomplete_group(bundle.vocab.decode(ids))


def _steer(bundle: ModelBundle, z_base, valence, arousal, alpha, base_mode):
    if base_mode == "regularized":
        return shift_regularized(z_base, valence, arousal)
    if bundle.attrs is None:
        raise ModelNotLoadedError("attribute vectors are not loaded")
    return tune(z_base, condition_vector(valence, arousal, bundle.attrs, alpha))


def generate_piece(
    bundle: ModelBundle,
    *,
    valence: float | None = None,
    arousal: float | None = None,
    va_start: tuple[float, float] | None = None,
    va_end: tuple[float, float] | None = None,
    mode: str = "point",
    n_bars: int = 8,
    alpha: float = DEFAULT_AROUSAL_THRESHOLD,
    base: str = "random",
    inspiration: np.ndarray | None = None,
    seed: int = 0,
    shared_base: bool = False,
    ppq: int = 480,
) -> MidiPiece:
    """Generate an n_bars piece steered by sentiment.

    point mode conditions every bar on one (V, A) pair, drawing a fresh
    prior latent per bar unless shared_base or an inspiration latent is
    given.  trajectory mode conditions the two endpoints of (va_start,
    va_end) on a single shared base latent and decodes one bar per
    interpolation step.  base selects the steering mechanism: "random" or
    "inspiration" use attribute-vector arithmetic, "regularized" shifts the
    first two latent dimensions directly.
    """
    if mode not in ("point", "trajectory"):
        raise ValueError(f"mode must be 'point' or 'trajectory', got {mode!r}")
    if base == "inspiration" and inspiration is None:
        raise ValueError("base 'inspiration' requires an inspiration latent")
    if n_bars < 1:
        raise ValueError("n_bars must be >= 1")
    rng = np.random.default_rng(seed)
    L = bundle.config.latent_dim

    def draw_base():
        if inspiration is not None:
            return np.asarray(inspiration, dtype=np.float64)
        return rng.standard_normal(L)

    if mode == "point":
        if valence is None or arousal is None:
            raise ValueError("point mode requires valence and arousal")
        shared = draw_base() if (shared_base or inspiration is not None) else None
        latents = [
            _steer(bundle, shared if shared is not None else draw_base(),
                   valence, arousal, alpha, base)
            for _ in range(n_bars)
        ]
    else:
        if va_start is None or va_end is None:
            raise ValueError("trajectory mode requires va_start and va_end")
        anchor = draw_base()
        z_from = _steer(bundle, anchor, va_start[0], va_start[1], alpha, base)
        z_to = _steer(bundle, anchor, va_end[0], va_end[1], alpha, base)
        latents = [z_from] if n_bars == 1 else interpolate(z_from, z_to, n_bars)

    bar_ticks = 4 * ppq
    notes = []
    tempo = None
    for bar_index, z in enumerate(latents):
        chunk = decode_bar(bundle, z)
        piece = detokenize(chunk, bundle.vocab.config, ppq=ppq)
        if tempo is None and any(t.kind is TokenKind.TEMPO for t in chunk):
            tempo = piece.tempo_bpm
        for note in piece.notes:
            notes.append(
                NoteEvent(
                    onset=note.onset + bar_index * bar_ticks,
                    pitch=note.pitch,
                    velocity=note.velocity,
                    duration=note.duration,
                )
            )
    return MidiPiece(ppq=ppq, tempo_bpm=tempo or DEFAULT_TEMPO_BPM, notes=notes)
