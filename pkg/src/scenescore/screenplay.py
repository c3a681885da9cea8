"""Parsing of plain-text screenplays laid out in the Hollywood standard format.

The format carries structure through indentation and capitalization rather
than markup: scene headings start with INT./EXT. prefixes, character cues
are short uppercase lines indented past the dialogue margin, dialogue sits
under a cue, and everything else is action.  Classification is context
sensitive, so each line's kind depends on the kind of the previous line.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from enum import Enum

HEADING_PREFIXES = ("INT.", "EXT.", "INT./EXT.", "I/E.")
TRANSITION_SUFFIX = "TO:"
TRANSITION_LITERALS = ("FADE IN:", "FADE OUT.")

#: Column where dialogue blocks begin; anything at or past this column that
#: satisfies the other cue/dialogue rules is treated as part of a dialogue
#: block rather than action.
DEFAULT_DIALOGUE_MARGIN = 10
MAX_CUE_LENGTH = 40

_SENTENCE_BREAK = re.compile(r"[.!?]+")
_PUNCT_STRIP = str.maketrans(
    "", "", string.punctuation + "‘’“”—–…"
)


class ElementKind(str, Enum):
    SCENE_HEADING = "scene_heading"
    ACTION = "action"
    CHARACTER_CUE = "character_cue"
    PARENTHETICAL = "parenthetical"
    DIALOGUE = "dialogue"
    TRANSITION = "transition"
    BLANK = "blank"


#: Element kinds whose text feeds sentiment scoring by default.
DEFAULT_SENTENCE_KINDS = (ElementKind.DIALOGUE, ElementKind.ACTION)


@dataclass(frozen=True)
class ScriptElement:
    """One classified physical line. ``text`` is stored trimmed."""

    kind: ElementKind
    text: str
    line_number: int

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "text": self.text, "line": self.line_number}


@dataclass
class Scene:
    """A heading-delimited span of a script.

    ``heading`` is empty for a preamble scene (content before the first
    scene heading).  ``sentences`` holds cleaned, lowercase sentences taken
    from the sentiment-source elements, ready for lexicon lookup.
    """

    index: int
    heading: str
    elements: list[ScriptElement]
    sentences: list[str]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "heading": self.heading,
            "elements": [e.to_dict() for e in self.elements],
            "sentences": list(self.sentences),
        }


def classify_line(
    line: str,
    prev_kind: ElementKind,
    dialogue_margin: int = DEFAULT_DIALOGUE_MARGIN,
) -> ElementKind:
    """Classify one physical line given the kind of the previous line.

    Rules are applied in order; the first match wins:

    1. blank (only whitespace)
    2. scene heading (trimmed line starts with a heading prefix)
    3. transition (trimmed line ends with "TO:", or is "FADE IN:"/"FADE OUT.")
    4. character cue (uppercase, short, indented, after blank/action)
    5. parenthetical (wrapped in parens, after cue/dialogue)
    6. dialogue (indented continuation of a dialogue block)
    7. action (fallback)
    """
    stripped = line.strip()
    if not stripped:
        return ElementKind.BLANK
    if stripped.startswith(HEADING_PREFIXES):
        return ElementKind.SCENE_HEADING
    if stripped.endswith(TRANSITION_SUFFIX) or stripped in TRANSITION_LITERALS:
        return ElementKind.TRANSITION
    indent = len(line) - len(line.lstrip())
    if (
        stripped == stripped.upper()
        and any(c.isalpha() for c in stripped)
        and len(stripped) <= MAX_CUE_LENGTH
        and indent >= dialogue_margin
        and prev_kind in (ElementKind.BLANK, ElementKind.ACTION)
    ):
        return ElementKind.CHARACTER_CUE
    if (
        stripped.startswith("(")
        and stripped.endswith(")")
        and prev_kind in (ElementKind.CHARACTER_CUE, ElementKind.DIALOGUE)
    ):
        return ElementKind.PARENTHETICAL
    if (
        prev_kind
        in (ElementKind.CHARACTER_CUE, ElementKind.PARENTHETICAL, ElementKind.DIALOGUE)
        and indent >= dialogue_margin
    ):
        return ElementKind.DIALOGUE
    return ElementKind.ACTION


def classify_lines(
    text: str, dialogue_margin: int = DEFAULT_DIALOGUE_MARGIN
) -> list[ScriptElement]:
    """Classify every line of ``text``, threading context through the stream."""
    elements: list[ScriptElement] = []
    prev = ElementKind.BLANK
    for number, line in enumerate(text.splitlines(), start=1):
        kind = classify_line(line, prev, dialogue_margin)
        elements.append(ScriptElement(kind, line.strip(), number))
        prev = kind
    return elements


def clean_tokens(text: str) -> list[str]:
    """Lowercase ``text``, split on whitespace, strip punctuation per token."""
    tokens = (t.translate(_PUNCT_STRIP) for t in text.lower().split())
    return [t for t in tokens if t]


def split_sentences(text: str) -> list[str]:
    """Split on terminal punctuation runs; no cleaning is applied."""
    return [chunk for chunk in _SENTENCE_BREAK.split(text) if chunk.strip()]


def _scene_sentences(
    elements: list[ScriptElement], kinds: tuple[ElementKind, ...]
) -> list[str]:
    sentences = []
    for element in elements:
        if element.kind not in kinds:
            continue
        for chunk in split_sentences(element.text):
            tokens = clean_tokens(chunk)
            if tokens:
                sentences.append(" ".join(tokens))
    return sentences


def parse_script(
    text: str,
    *,
    dialogue_margin: int = DEFAULT_DIALOGUE_MARGIN,
    sentence_kinds: tuple[ElementKind, ...] = DEFAULT_SENTENCE_KINDS,
) -> list[Scene]:
    """Parse ``text`` into scenes.

    A new scene starts at every scene heading.  Elements before the first
    heading become a preamble scene (heading ``""``) only when at least one
    of them is non-blank; a run of leading blank lines alone forms no scene.
    """
    elements = classify_lines(text, dialogue_margin)
    groups: list[list[ScriptElement]] = []
    current: list[ScriptElement] = []
    for element in elements:
        if element.kind is ElementKind.SCENE_HEADING:
            groups.append(current)
            current = [element]
        else:
            current.append(element)
    groups.append(current)

    preamble, rest = groups[0], groups[1:]
    scene_groups: list[list[ScriptElement]] = []
    if any(e.kind is not ElementKind.BLANK for e in preamble):
        scene_groups.append(preamble)
    scene_groups.extend(rest)

    scenes = []
    for index, group in enumerate(scene_groups):
        is_headed = group[0].kind is ElementKind.SCENE_HEADING
        scenes.append(
            Scene(
                index=index,
                heading=group[0].text if is_headed else "",
                elements=group,
                sentences=_scene_sentences(group, sentence_kinds),
            )
        )
    return scenes


def extract_meaningful_text(
    scene: Scene, kinds: tuple[ElementKind, ...] = DEFAULT_SENTENCE_KINDS
) -> list[str]:
    """All cleaned tokens of a scene's sentiment-source elements, in order."""
    tokens: list[str] = []
    for element in scene.elements:
        if element.kind in kinds:
            tokens.extend(clean_tokens(element.text))
    return tokens


_SERIALIZE_INDENT = {
    ElementKind.CHARACTER_CUE: 22,
    ElementKind.PARENTHETICAL: 16,
    ElementKind.DIALOGUE: 10,
}


def serialize_elements(elements: list[ScriptElement]) -> str:
    """Render elements back to text with canonical indentation.

    Reparsing the result reproduces the original kind stream, which makes
    parse -> serialize -> parse a fixed point.
    """
    lines = []
    for element in elements:
        if element.kind is ElementKind.BLANK:
            lines.append("")
        else:
            indent = _SERIALIZE_INDENT.get(element.kind, 0)
            lines.append(" " * indent + element.text)
    return "\n".join(lines)


def scenes_to_dict(scenes: list[Scene]) -> dict:
    return {"scenes": [scene.to_dict() for scene in scenes]}
