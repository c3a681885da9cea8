"""Synthetic single-bar corpora with quadrant-stereotyped textures.

Each bar caricatures its circumplex quadrant: positive valence means many
note onsets per bar, negative valence a sparse handful; high arousal puts
the material in a bright upper register, low arousal in a dark lower one.
The stereotypes are blunt on purpose — they give a small model something
learnable so the latent axes, attribute vectors, and steering behavior can
be exercised end to end without real data.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .midi import MidiPiece, NoteEvent, write_midi
from .remi import VocabConfig, Vocabulary, bin_to_velocity, tokenize
from .vae import LabeledBar

#: Quadrant centers nudged off the axes, used as proxy continuous labels.
QUADRANT_VA = {1: (0.5, 0.5), 2: (-0.5, 0.5), 3: (-0.5, -0.5), 4: (0.5, -0.5)}

_PENTATONIC = (0, 2, 4, 7, 9)


def quadrant_bar(
    quadrant: int,
    rng: np.random.Generator,
    config: VocabConfig | None = None,
    ppq: int = 480,
) -> MidiPiece:
    """One 4/4 bar whose texture caricatures the given quadrant.

    Onsets sit exactly on the position grid, durations are whole sixteenths
    and velocities are bin centers, so tokenization is lossless and
    reconstruction error cannot blur the quadrant signal.
    """
    if quadrant not in QUADRANT_VA:
        raise ValueError(f"quadrant must be 1..4, got {quadrant}")
    config = config or VocabConfig()
    step = 4 * ppq // config.positions

    dense = quadrant in (1, 4)  # positive valence
    bright = quadrant in (1, 2)  # high arousal
    if dense:
        onsets = list(range(0, config.positions, 2))
        if rng.random() < 0.5:
            onsets.append(int(rng.integers(1, config.positions, endpoint=False)) | 1)
        duration = ppq // 4
    else:
        count = int(rng.integers(2, 4))
        onsets = sorted(rng.choice(config.positions, size=count, replace=False).tolist())
        duration = (ppq // 4) * int(rng.integers(2, 5))

    root = 76 if bright else 52
    velocity_bin = 24 if bright else 12
    velocity = bin_to_velocity(velocity_bin, config.velocity_bins)

    notes = []
    for position in sorted(set(onsets)):
        degree = _PENTATONIC[int(rng.integers(len(_PENTATONIC)))]
        octave = int(rng.integers(0, 2)) * 12
        notes.append(
            NoteEvent(
                onset=position * step,
                pitch=root + degree + octave,
                velocity=velocity,
                duration=duration,
            )
        )
    return MidiPiece(ppq=ppq, tempo_bpm=120.0, notes=notes)


def make_corpus(
    n_bars: int = 50,
    seed: int = 0,
    config: VocabConfig | None = None,
    ppq: int = 480,
) -> list[tuple[MidiPiece, int]]:
    """Bars cycling through the quadrants, with per-bar random variation."""
    rng = np.random.default_rng(seed)
    return [
        (quadrant_bar(quadrant, rng, config, ppq), quadrant)
        for quadrant in (q % 4 + 1 for q in range(n_bars))
    ]


def corpus_to_bars(
    corpus: list[tuple[MidiPiece, int]],
    vocab: Vocabulary,
) -> list[LabeledBar]:
    """Tokenize labeled pieces into training units with proxy VA labels."""
    bars = []
    for piece, quadrant in corpus:
        ids = vocab.encode(tokenize(piece, vocab.config))
        bars.append(LabeledBar(tokens=ids, quadrant=quadrant, va=QUADRANT_VA[quadrant]))
    return bars


def write_corpus_dir(directory: str | Path, corpus: list[tuple[MidiPiece, int]]) -> Path:
    """Write bar_NNN.mid files plus a labels.csv sidecar; returns the dir."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for index, (piece, quadrant) in enumerate(corpus):
        name = f"bar_{index:03d}.mid"
        (directory / name).write_bytes(write_midi(piece))
        va = QUADRANT_VA[quadrant]
        rows.append({"file": name, "quadrant": quadrant, "V": va[0], "A": va[1]})
    with open(directory / "labels.csv", "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=("file", "quadrant", "V", "A"))
        writer.writeheader()
        writer.writerows(rows)
    return directory


def read_labels_csv(path: str | Path) -> dict[str, dict]:
    """labels.csv rows keyed by file name; V/A fall back to quadrant proxies."""
    labels: dict[str, dict] = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            quadrant = int(row["quadrant"])
            proxy = QUADRANT_VA[quadrant]
            labels[row["file"]] = {
                "quadrant": quadrant,
                "va": (
                    float(row.get("V") or proxy[0]),
                    float(row.get("A") or proxy[1]),
                ),
            }
    return labels
