"""Event-token representation of 4/4 piano bars.

A piece becomes a flat stream of Bar / Position / Tempo / Pitch / Velocity /
Duration tokens: each note is one (Position, Pitch, Velocity, Duration)
group, onsets are quantized to a fixed per-bar grid, velocity and tempo are
binned linearly, and durations are multiples of a sixteenth note.  The
stream splits into single-bar chunks, the unit the sequence model trains on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .midi import DEFAULT_TEMPO_BPM, MidiPiece, NoteEvent

TEMPO_MIN_BPM = 30.0
TEMPO_MAX_BPM = 210.0

#: Reserved ids at the bottom of every vocabulary.
PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
BAR_ID = 3


class GrammarError(Exception):
    def __init__(self, position: int, reason: str):
        super().__init__(f"token {position}: {reason}")
        self.position = position


class EmptyPieceError(Exception):
    """The piece holds no notes, so there is nothing to tokenize."""


class TokenKind(str, Enum):
    BAR = "bar"
    POSITION = "position"
    TEMPO = "tempo"
    PITCH = "pitch"
    VELOCITY = "velocity"
    DURATION = "duration"


@dataclass(frozen=True)
class RemiToken:
    kind: TokenKind
    value: int = 0

    def __repr__(self):
        if self.kind is TokenKind.BAR:
            return "Bar"
        return f"{self.kind.value.capitalize()}({self.value})"


@dataclass(frozen=True)
class VocabConfig:
    """Resolution of the token grid; defaults give a 244-entry vocabulary."""

    positions: int = 16
    velocity_bins: int = 32
    duration_bins: int = 32
    tempo_bins: int = 32

    def __post_init__(self):
        for name in ("positions", "velocity_bins", "duration_bins", "tempo_bins"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        return {
            "positions": self.positions,
            "velocity_bins": self.velocity_bins,
            "duration_bins": self.duration_bins,
            "tempo_bins": self.tempo_bins,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VocabConfig":
        return cls(**doc)


def velocity_to_bin(velocity: int, bins: int) -> int:
    """Linear bins 1..bins over velocities 1..127."""
    if not 1 <= velocity <= 127:
        raise ValueError(f"velocity {velocity} outside 1..127")
    return 1 + min(bins - 1, (velocity - 1) * bins // 126)


def bin_to_velocity(bin_index: int, bins: int) -> int:
    return round(1 + (bin_index - 0.5) * 126 / bins)


def tempo_to_bin(bpm: float, bins: int) -> int:
    """Linear bins 1..bins over [30, 210] bpm; out-of-range tempi clamp."""
    clamped = min(max(bpm, TEMPO_MIN_BPM), TEMPO_MAX_BPM)
    span = TEMPO_MAX_BPM - TEMPO_MIN_BPM
    return 1 + min(bins - 1, int((clamped - TEMPO_MIN_BPM) * bins / span))


def bin_to_tempo(bin_index: int, bins: int) -> float:
    span = TEMPO_MAX_BPM - TEMPO_MIN_BPM
    return TEMPO_MIN_BPM + (bin_index - 0.5) * span / bins


def duration_to_bin(duration_ticks: int, ppq: int, bins: int) -> int:
    """Durations are whole sixteenths (ppq/4 ticks), clamped to 1..bins."""
    sixteenth = ppq / 4
    return min(bins, max(1, round(duration_ticks / sixteenth)))


def bin_to_duration(bin_index: int, ppq: int) -> int:
    return round(bin_index * ppq / 4)


class Vocabulary:
    """Bijection between tokens and integer ids for one VocabConfig.

    Layout: PAD, BOS, EOS, Bar, then Position(1..P), Tempo(1..T),
    Pitch(0..127), Velocity(1..W), Duration(1..D) blocks.
    """

    def __init__(self, config: VocabConfig | None = None):
        self.config = config or VocabConfig()
        self.position_base = BAR_ID + 1
        self.tempo_base = self.position_base + self.config.positions
        self.pitch_base = self.tempo_base + self.config.tempo_bins
        self.velocity_base = self.pitch_base + 128
        self.duration_base = self.velocity_base + self.config.velocity_bins
        self.size = self.duration_base + self.config.duration_bins

    def token_to_id(self, token: RemiToken) -> int:
        kind, value = token.kind, token.value
        if kind is TokenKind.BAR:
            return BAR_ID
        if kind is TokenKind.POSITION:
            base, count = self.position_base, self.config.positions
        elif kind is TokenKind.TEMPO:
            base, count = self.tempo_base, self.config.tempo_bins
        elif kind is TokenKind.PITCH:
            if not 0 <= value <= 127:
                raise ValueError(f"pitch {value} outside 0..127")
            return self.pitch_base + value
        elif kind is TokenKind.VELOCITY:
            base, count = self.velocity_base, self.config.velocity_bins
        else:
            base, count = self.duration_base, self.config.duration_bins
        if not 1 <= value <= count:
            raise ValueError(f"{kind.value} value {value} outside 1..{count}")
        return base + value - 1

    def id_to_token(self, token_id: int) -> RemiToken:
        if token_id == BAR_ID:
            return RemiToken(TokenKind.BAR)
        if self.position_base <= token_id < self.tempo_base:
            return RemiToken(TokenKind.POSITION, token_id - self.position_base + 1)
        if self.tempo_base <= token_id < self.pitch_base:
            return RemiToken(TokenKind.TEMPO, token_id - self.tempo_base + 1)
        if self.pitch_base <= token_id < self.velocity_base:
            return RemiToken(TokenKind.PITCH, token_id - self.pitch_base)
        if self.velocity_base <= token_id < self.duration_base:
            return RemiToken(TokenKind.VELOCITY, token_id - self.velocity_base + 1)
        if self.duration_base <= token_id < self.size:
            return RemiToken(TokenKind.DURATION, token_id - self.duration_base + 1)
        raise ValueError(f"id {token_id} is reserved or out of vocabulary")

    def encode(self, tokens: list[RemiToken]) -> list[int]:
        return [self.token_to_id(t) for t in tokens]

    def decode(self, ids: list[int]) -> list[RemiToken]:
        return [self.id_to_token(i) for i in ids]


def tokenize(piece: MidiPiece, config: VocabConfig | None = None) -> list[RemiToken]:
    """Tokenize a piece into a Bar-delimited stream.

    Onsets snap to the nearest of ``positions`` grid points per bar (a late
    onset can round into the following bar); the piece tempo becomes a
    single Tempo token after the first Bar.
    """
    if not piece.notes:
        raise EmptyPieceError("cannot tokenize a piece with no notes")
    config = config or VocabConfig()
    step = piece.bar_ticks / config.positions

    placed: list[tuple[int, int, NoteEvent]] = []
    for note in piece.notes:
        grid_index = round(note.onset / step)
        placed.append((grid_index // config.positions, grid_index % config.positions + 1, note))
    placed.sort(key=lambda item: (item[0], item[1], item[2].pitch, item[2].duration))

    last_bar = max(bar for bar, _, _ in placed)
    tokens: list[RemiToken] = []
    cursor = 0
    for bar in range(last_bar + 1):
        tokens.append(RemiToken(TokenKind.BAR))
        if bar == 0:
            tokens.append(
                RemiToken(TokenKind.TEMPO, tempo_to_bin(piece.tempo_bpm, config.tempo_bins))
            )
        while cursor < len(placed) and placed[cursor][0] == bar:
            _, position, note = placed[cursor]
            tokens.append(RemiToken(TokenKind.POSITION, position))
            tokens.append(RemiToken(TokenKind.PITCH, note.pitch))
            tokens.append(
                RemiToken(
                    TokenKind.VELOCITY,
                    velocity_to_bin(note.velocity, config.velocity_bins),
                )
            )
            tokens.append(
                RemiToken(
                    TokenKind.DURATION,
                    duration_to_bin(note.duration, piece.ppq, config.duration_bins),
                )
            )
            cursor += 1
    return tokens


def detokenize(
    tokens: list[RemiToken],
    config: VocabConfig | None = None,
    ppq: int = 480,
) -> MidiPiece:
    """Rebuild a piece from a token stream, validating the bar grammar.

    Expected shape per bar: Bar, optional Tempo, then complete
    (Position, Pitch, Velocity, Duration) groups with non-decreasing
    positions.  Violations raise GrammarError with the offending index.
    """
    config = config or VocabConfig()
    step = 4 * ppq / config.positions

    notes: list[NoteEvent] = []
    tempo: float | None = None
    bar = -1
    watermark = 0
    pending: list[RemiToken] = []  # partial note group

    def fail(index: int, reason: str):
        raise GrammarError(index, reason)

    for index, token in enumerate(tokens):
        kind = token.kind
        if kind is TokenKind.BAR:
            if pending:
                fail(index, "bar starts inside a note group")
            bar += 1
            watermark = 0
        elif bar < 0:
            fail(index, f"stream must start with Bar, got {token!r}")
        elif kind is TokenKind.TEMPO:
            if pending:
                fail(index, "tempo inside a note group")
            if tempo is None:
                tempo = bin_to_tempo(token.value, config.tempo_bins)
        elif kind is TokenKind.POSITION:
            if pending:
                fail(index, "position inside a note group")
            if token.value < watermark:
                fail(index, f"position {token.value} decreases within the bar")
            watermark = token.value
            pending.append(token)
        elif kind is TokenKind.PITCH:
            if len(pending) != 1:
                fail(index, "pitch without a leading position")
            pending.append(token)
        elif kind is TokenKind.VELOCITY:
            if len(pending) != 2:
                fail(index, "velocity without a pitch")
            pending.append(token)
        else:  # duration closes the group
            if len(pending) != 3:
                fail(index, "duration without a velocity")
            position, pitch, velocity = pending
            onset = round((bar * config.positions + position.value - 1) * step)
            notes.append(
                NoteEvent(
                    onset=onset,
                    pitch=pitch.value,
                    velocity=bin_to_velocity(velocity.value, config.velocity_bins),
                    duration=bin_to_duration(token.value, ppq),
                )
            )
            pending = []

    if pending:
        fail(len(tokens), "stream ends inside a note group")
    return MidiPiece(ppq=ppq, tempo_bpm=tempo or DEFAULT_TEMPO_BPM, notes=notes)


def chunk_bars(tokens: list[RemiToken]) -> list[list[RemiToken]]:
    """Split a stream at Bar tokens; each chunk begins with its Bar."""
    if not tokens:
        return []
    if tokens[0].kind is not TokenKind.BAR:
        raise GrammarError(0, "stream must start with Bar")
    chunks: list[list[RemiToken]] = []
    for token in tokens:
        if token.kind is TokenKind.BAR:
            chunks.append([token])
        else:
            chunks[-1].append(token)
    return chunks


def trim_incomplete_group(tokens: list[RemiToken]) -> list[RemiToken]:
    """Drop a trailing partial note group (used after length-capped decoding)."""
    cut = len(tokens)
    for index in range(len(tokens) - 1, -1, -1):
        kind = tokens[index].kind
        if kind in (TokenKind.BAR, TokenKind.TEMPO, TokenKind.DURATION):
            break
        cut = index
    return tokens[:cut]


class BarGrammar:
    """Tracks which token ids may legally extend a single-bar sequence.

    Drives masked decoding: the first token must be Bar, Tempo may appear
    once right after it, and note groups are Position >= watermark, Pitch,
    Velocity, Duration.  EOS is legal anywhere a new group could start.
    """

    _START, _AFTER_BAR, _AFTER_POSITION, _AFTER_PITCH, _AFTER_VELOCITY = range(5)

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.state = self._START
        self.watermark = 1
        self.tempo_seen = False

    def allowed_mask(self) -> np.ndarray:
        v = self.vocab
        mask = np.zeros(v.size, dtype=bool)
        if self.state == self._START:
            mask[BAR_ID] = True
        elif self.state == self._AFTER_BAR:
            mask[EOS_ID] = True
            if not self.tempo_seen:
                mask[v.tempo_base : v.pitch_base] = True
            first_allowed = v.position_base + self.watermark - 1
            mask[first_allowed : v.tempo_base] = True
        elif self.state == self._AFTER_POSITION:
            mask[v.pitch_base : v.velocity_base] = True
        elif self.state == self._AFTER_PITCH:
            mask[v.velocity_base : v.duration_base] = True
        else:
            mask[v.duration_base : v.size] = True
        return mask

    def advance(self, token_id: int) -> None:
        if token_id == EOS_ID:
            return
        token = self.vocab.id_to_token(token_id)
        if token.kind is TokenKind.BAR:
            self.state = self._AFTER_BAR
        elif token.kind is TokenKind.TEMPO:
            self.tempo_seen = True
        elif token.kind is TokenKind.POSITION:
            self.watermark = token.value
            self.state = self._AFTER_POSITION
        elif token.kind is TokenKind.PITCH:
            self.state = self._AFTER_PITCH
        elif token.kind is TokenKind.VELOCITY:
            self.state = self._AFTER_VELOCITY
        else:
            self.state = self._AFTER_BAR
