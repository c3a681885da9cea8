"""Valence-arousal scoring of scenes against a VAD lexicon.

Tokens are looked up in a tab-separated lexicon (word, valence, arousal,
dominance; values in [0, 1]); a scene's raw score is the unweighted mean of
its matched tokens, mapped onto the [-1, 1] circumplex where quadrant 1 is
positive-valence/high-arousal and quadrants proceed counterclockwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Iterable, NamedTuple

from .screenplay import DEFAULT_SENTENCE_KINDS, ElementKind, Scene, clean_tokens


class LexiconError(Exception):
    pass


class MalformedLineError(LexiconError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"lexicon line {line_number}: {reason}")
        self.line_number = line_number


class NoLexicalContentError(Exception):
    """No token of the input matched the lexicon."""


class DomainError(ValueError):
    """A value fell outside its documented domain."""


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    valence: float
    arousal: float
    dominance: float


class Quadrant(IntEnum):
    HIGH_V_HIGH_A = 1
    LOW_V_HIGH_A = 2
    LOW_V_LOW_A = 3
    HIGH_V_LOW_A = 4


@dataclass(frozen=True)
class VAPoint:
    """A point on the normalized circumplex; both coordinates in [-1, 1]."""

    valence: float
    arousal: float

    def __post_init__(self):
        if not (-1.0 <= self.valence <= 1.0 and -1.0 <= self.arousal <= 1.0):
            raise DomainError(f"VA point out of range: {self}")


class RawScore(NamedTuple):
    valence: float
    arousal: float
    coverage: int


def _parse_entry(parts: list[str], line_number: int) -> LexiconEntry:
    if len(parts) != 4:
        raise MalformedLineError(line_number, f"expected 4 fields, got {len(parts)}")
    word = parts[0].strip()
    if not word:
        raise MalformedLineError(line_number, "empty word")
    try:
        v, a, d = (float(p) for p in parts[1:])
    except ValueError:
        raise MalformedLineError(line_number, "non-numeric value") from None
    for value in (v, a, d):
        if not (0.0 <= value <= 1.0):
            raise MalformedLineError(line_number, f"value {value} outside [0, 1]")
    return LexiconEntry(word, v, a, d)


def _looks_like_header(parts: list[str]) -> bool:
    if len(parts) != 4:
        return True
    try:
        for p in parts[1:4]:
            float(p)
    except ValueError:
        return True
    return False


def load_lexicon(path: str | Path) -> dict[str, LexiconEntry]:
    """Load a tab-separated VAD lexicon.

    An optional single header line is tolerated: the first line is skipped
    when its numeric fields do not parse as floats.  Any later malformed
    line, out-of-range value, or duplicate word raises MalformedLineError
    with its line number.
    """
    entries: dict[str, LexiconEntry] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if line_number == 1 and _looks_like_header(parts):
                continue
            entry = _parse_entry(parts, line_number)
            if entry.word in entries:
                raise MalformedLineError(line_number, f"duplicate word {entry.word!r}")
            entries[entry.word] = entry
    return entries


def score_tokens(
    tokens: Iterable[str], lexicon: dict[str, LexiconEntry]
) -> RawScore:
    """Unweighted mean VA of the tokens found in the lexicon.

    Multiple occurrences of a word count once per occurrence.  Raises
    NoLexicalContentError when nothing matches.
    """
    total_v = 0.0
    total_a = 0.0
    matched = 0
    for token in tokens:
        entry = lexicon.get(token)
        if entry is not None:
            total_v += entry.valence
            total_a += entry.arousal
            matched += 1
    if matched == 0:
        raise NoLexicalContentError("no token matched the lexicon")
    return RawScore(total_v / matched, total_a / matched, matched)


def normalize_va(raw_valence: float, raw_arousal: float) -> VAPoint:
    """Map raw means in [0, 1] onto [-1, 1] via v = 2*raw - 1."""
    for value in (raw_valence, raw_arousal):
        if not (0.0 <= value <= 1.0):
            raise DomainError(f"raw score {value} outside [0, 1]")
    return VAPoint(2.0 * raw_valence - 1.0, 2.0 * raw_arousal - 1.0)


def quadrant_of(point: VAPoint) -> Quadrant:
    """Circumplex quadrant; axes (V == 0 or A == 0) fall on the non-negative side."""
    if point.valence >= 0.0:
        return Quadrant.HIGH_V_HIGH_A if point.arousal >= 0.0 else Quadrant.HIGH_V_LOW_A
    return Quadrant.LOW_V_HIGH_A if point.arousal >= 0.0 else Quadrant.LOW_V_LOW_A


@dataclass
class VATrajectory:
    """Per-sentence VA points of a scene, in sentence order."""

    points: list[VAPoint]

    @property
    def start(self) -> VAPoint:
        return self.points[0]

    @property
    def end(self) -> VAPoint:
        return self.points[-1]

    def to_list(self) -> list[list[float]]:
        return [[p.valence, p.arousal] for p in self.points]


def scene_va(
    scene: Scene, lexicon: dict[str, LexiconEntry]
) -> tuple[VAPoint, int]:
    """Scene-level VA point plus coverage count.

    Works over the scene's precomputed sentences, so the dialogue/action
    source filter chosen at parse time carries through.
    """
    tokens = [t for sentence in scene.sentences for t in sentence.split()]
    raw = score_tokens(tokens, lexicon)
    return normalize_va(raw.valence, raw.arousal), raw.coverage


def scene_trajectory(
    scene: Scene, lexicon: dict[str, LexiconEntry]
) -> VATrajectory:
    """Per-sentence VA points; sentences with no lexicon hits are skipped."""
    points = []
    for sentence in scene.sentences:
        try:
            raw = score_tokens(sentence.split(), lexicon)
        except NoLexicalContentError:
            continue
        points.append(normalize_va(raw.valence, raw.arousal))
    return VATrajectory(points)


def scene_report(scene: Scene, lexicon: dict[str, LexiconEntry]) -> dict:
    """JSON-ready record for one scene.

    Scenes with no lexicon coverage get the neutral point (0, 0) and a
    ``warning`` flag instead of an error, so one empty scene cannot sink a
    whole script analysis.
    """
    try:
        point, coverage = scene_va(scene, lexicon)
        trajectory = scene_trajectory(scene, lexicon)
        warning = False
    except NoLexicalContentError:
        point, coverage = VAPoint(0.0, 0.0), 0
        trajectory = VATrajectory([])
        warning = True
    return {
        "index": scene.index,
        "heading": scene.heading,
        "V": point.valence,
        "A": point.arousal,
        "quadrant": int(quadrant_of(point)),
        "coverage": coverage,
        "trajectory": trajectory.to_list(),
        "warning": warning,
    }


def analyze_script_text(
    text: str,
    lexicon: dict[str, LexiconEntry],
    *,
    sentence_kinds: tuple[ElementKind, ...] = DEFAULT_SENTENCE_KINDS,
) -> list[dict]:
    """Parse ``text`` and report every scene. Convenience for CLI/service."""
    from .screenplay import parse_script

    scenes = parse_script(text, sentence_kinds=sentence_kinds)
    return [scene_report(scene, lexicon) for scene in scenes]
