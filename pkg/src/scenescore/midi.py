"""Reading and writing Standard MIDI Files for 4/4 piano material.

Only note and tempo information is kept: type 0 and type 1 files are read
with all tracks and channels merged, and writing always emits a single-track
type 0 file.  Note-on/note-off pairing is FIFO per (channel, pitch), which
is exact for any piece without overlapping same-pitch notes (overlaps are
inherently ambiguous in SMF).  Tempo is stored as bpm; writing rounds it to
integer microseconds per quarter, so a piece that came out of read_midi
round-trips bit-exactly while a hand-built piece with a non-representable
bpm is snapped once on first write.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

DEFAULT_TEMPO_BPM = 120.0
_META_TEMPO = 0x51
_META_TIME_SIGNATURE = 0x58
_META_END_OF_TRACK = 0x2F


class MidiError(Exception):
    pass


class BadHeaderError(MidiError):
    pass


class TruncatedFileError(MidiError):
    pass


class TimeSignatureError(MidiError):
    """The file declares a time signature other than 4/4."""


@dataclass(frozen=True, order=True)
class NoteEvent:
    """One note: onset and duration in ticks, pitch/velocity as MIDI bytes."""

    onset: int
    pitch: int
    velocity: int
    duration: int

    def __post_init__(self):
        if self.onset < 0:
            raise ValueError(f"negative onset {self.onset}")
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside 0..127")
        if not 1 <= self.velocity <= 127:
            raise ValueError(f"velocity {self.velocity} outside 1..127")
        if self.duration < 1:
            raise ValueError(f"duration {self.duration} < 1 tick")


@dataclass
class MidiPiece:
    """A piece in 4/4: a tick resolution, one tempo, and sorted notes."""

    ppq: int
    tempo_bpm: float = DEFAULT_TEMPO_BPM
    notes: list[NoteEvent] = field(default_factory=list)

    def __post_init__(self):
        if self.ppq <= 0:
            raise ValueError(f"ppq must be positive, got {self.ppq}")
        if self.tempo_bpm <= 0:
            raise ValueError(f"tempo must be positive, got {self.tempo_bpm}")
        self.notes = sorted(self.notes, key=lambda n: (n.onset, n.pitch, n.duration))

    @property
    def bar_ticks(self) -> int:
        return 4 * self.ppq


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise TruncatedFileError(
                f"needed {count} bytes at offset {self.pos}, "
                f"file has {len(self.data)}"
            )
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk

    def read_u8(self) -> int:
        return self.read(1)[0]

    def read_u16(self) -> int:
        return int.from_bytes(self.read(2), "big")

    def read_u32(self) -> int:
        return int.from_bytes(self.read(4), "big")

    def read_vlq(self) -> int:
        value = 0
        for _ in range(4):
            byte = self.read_u8()
            value = (value << 7) | (byte & 0x7F)
            if not byte & 0x80:
                return value
        raise BadHeaderError("variable-length quantity longer than 4 bytes")

    def peek_u8(self) -> int:
        if self.pos >= len(self.data):
            raise TruncatedFileError(f"unexpected end of file at offset {self.pos}")
        return self.data[self.pos]


def encode_vlq(value: int) -> bytes:
    if value < 0:
        raise ValueError("cannot encode negative delta time")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def _check_time_signature(payload: bytes) -> None:
    if len(payload) < 2:
        raise BadHeaderError("short time-signature event")
    numerator, denom_pow = payload[0], payload[1]
    if (numerator, 1 << denom_pow) != (4, 4):
        raise TimeSignatureError(
            f"only 4/4 material is supported, file declares "
            f"{numerator}/{1 << denom_pow}"
        )


def _read_track(reader: _Reader, notes: list[NoteEvent], tempos: list[float]) -> None:
    magic = reader.read(4)
    if magic != b"MTrk":
        raise BadHeaderError(f"expected MTrk chunk, got {magic!r}")
    length = reader.read_u32()
    end = reader.pos + length
    if end > len(reader.data):
        raise TruncatedFileError("track length exceeds file size")

    time = 0
    running: int | None = None
    open_notes: dict[tuple[int, int], deque[tuple[int, int]]] = {}

    def close(channel: int, pitch: int, at: int) -> None:
        pending = open_notes.get((channel, pitch))
        if not pending:
            return  # stray note-off
        onset, velocity = pending.popleft()
        notes.append(NoteEvent(onset, pitch, velocity, max(1, at - onset)))

    while reader.pos < end:
        time += reader.read_vlq()
        first = reader.peek_u8()
        if first & 0x80:
            status = reader.read_u8()
        elif running is None:
            raise BadHeaderError(f"data byte {first:#x} without running status")
        else:
            status = running

        if status == 0xFF:
            running = None
            meta = reader.read_u8()
            payload = reader.read(reader.read_vlq())
            if meta == _META_TEMPO and len(payload) == 3:
                tempos.append(60_000_000 / int.from_bytes(payload, "big"))
            elif meta == _META_TIME_SIGNATURE:
                _check_time_signature(payload)
            elif meta == _META_END_OF_TRACK:
                break
        elif status in (0xF0, 0xF7):
            running = None
            reader.read(reader.read_vlq())
        else:
            running = status
            kind, channel = status & 0xF0, status & 0x0F
            if kind == 0x90:
                pitch, velocity = reader.read_u8(), reader.read_u8()
                if velocity:
                    open_notes.setdefault((channel, pitch), deque()).append(
                        (time, velocity)
                    )
                else:
                    close(channel, pitch, time)
            elif kind == 0x80:
                pitch, _velocity = reader.read_u8(), reader.read_u8()
                close(channel, pitch, time)
            elif kind in (0xA0, 0xB0, 0xE0):
                reader.read(2)
            elif kind in (0xC0, 0xD0):
                reader.read(1)
            else:
                raise BadHeaderError(f"unsupported status byte {status:#x}")

    for (channel, pitch), pending in open_notes.items():
        for onset, velocity in pending:
            log.warning(
                "note-on without note-off (channel %d, pitch %d); "
                "closing at end of track",
                channel,
                pitch,
            )
            notes.append(NoteEvent(onset, pitch, velocity, max(1, time - onset)))
    reader.pos = end


def read_midi(data: bytes) -> MidiPiece:
    """Parse SMF bytes into a MidiPiece.

    Raises BadHeaderError for structural problems, TruncatedFileError when
    the data ends early, and TimeSignatureError for non-4/4 files.  The
    first tempo event encountered wins; a file without one gets 120 bpm.
    """
    reader = _Reader(data)
    if reader.read(4) != b"MThd":
        raise BadHeaderError("missing MThd header")
    header_length = reader.read_u32()
    if header_length < 6:
        raise BadHeaderError(f"header chunk too short ({header_length} bytes)")
    fmt = reader.read_u16()
    n_tracks = reader.read_u16()
    division = reader.read_u16()
    reader.read(header_length - 6)
    if fmt not in (0, 1):
        raise BadHeaderError(f"unsupported SMF format {fmt}")
    if division & 0x8000:
        raise BadHeaderError("SMPTE time division is not supported")
    if division == 0:
        raise BadHeaderError("time division of zero")

    notes: list[NoteEvent] = []
    tempos: list[float] = []
    for _ in range(n_tracks):
        _read_track(reader, notes, tempos)

    tempo = tempos[0] if tempos else DEFAULT_TEMPO_BPM
    return MidiPiece(ppq=division, tempo_bpm=tempo, notes=notes)


def write_midi(piece: MidiPiece) -> bytes:
    """Serialize a piece as a single-track type 0 SMF."""
    mpq = round(60_000_000 / piece.tempo_bpm)
    events: list[tuple[int, int, bytes]] = [
        (0, 0, bytes([0xFF, _META_TIME_SIGNATURE, 4, 4, 2, 24, 8])),
        (0, 1, bytes([0xFF, _META_TEMPO, 3]) + mpq.to_bytes(3, "big")),
    ]
    for note in piece.notes:
        # note-offs sort ahead of note-ons at the same tick, so that back to
        # back same-pitch notes pair FIFO on the way back in
        events.append((note.onset + note.duration, 2, bytes([0x80, note.pitch, 0x40])))
        events.append((note.onset, 3, bytes([0x90, note.pitch, note.velocity])))
    events.sort(key=lambda e: (e[0], e[1]))

    track = bytearray()
    previous = 0
    for time, _, payload in events:
        track += encode_vlq(time - previous)
        track += payload
        previous = time
    track += encode_vlq(0) + bytes([0xFF, _META_END_OF_TRACK, 0])

    header = b"MThd" + (6).to_bytes(4, "big")
    header += (0).to_bytes(2, "big") + (1).to_bytes(2, "big")
    header += piece.ppq.to_bytes(2, "big")
    return header + b"MTrk" + len(track).to_bytes(4, "big") + bytes(track)


def note_density(piece: MidiPiece) -> float:
    """Mean number of note onsets per bar over the bars the piece spans."""
    if not piece.notes:
        return 0.0
    last_bar = max(note.onset for note in piece.notes) // piece.bar_ticks
    return len(piece.notes) / (last_bar + 1)
