"""Content-addressed on-disk store shared by the CLI and the HTTP service.

Scripts, generated artifacts, and uploaded inspiration pieces live under
one root as plain files keyed by a content hash, so identical inputs
dedupe to identical ids and a service restart loses nothing.  The model
checkpoint and attribute vectors live at fixed names under the same root.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .latent import AttributeVectors, ModelBundle
from .remi import Vocabulary
from .vae import atomic_write_bytes, checkpoint_hash, load_checkpoint


def content_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


class ProjectStore:
    def __init__(
        self,
        root: str | Path,
        *,
        lexicon_path: str | Path | None = None,
        checkpoint_path: str | Path | None = None,
        attrs_path: str | Path | None = None,
    ):
        self.root = Path(root)
        self.scripts_dir = self.root / "scripts"
        self.artifacts_dir = self.root / "artifacts"
        self.inspirations_dir = self.root / "inspirations"
        for directory in (self.scripts_dir, self.artifacts_dir, self.inspirations_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self.lexicon_path = Path(lexicon_path) if lexicon_path else self.root / "lexicon.tsv"
        self.checkpoint_path = (
            Path(checkpoint_path) if checkpoint_path else self.root / "checkpoint.json"
        )
        self.attrs_path = Path(attrs_path) if attrs_path else self.root / "attrs.json"

    # -- scripts ----------------------------------------------------------

    def save_script(self, text: str, scenes: list[dict]) -> str:
        script_id = content_id(text.encode())
        document = {"id": script_id, "text": text, "scenes": scenes}
        atomic_write_bytes(
            self.scripts_dir / f"{script_id}.json",
            json.dumps(document, sort_keys=True).encode(),
        )
        return script_id

    def load_script(self, script_id: str) -> dict | None:
        path = self.scripts_dir / f"{script_id}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text())

    # -- artifacts ---------------------------------------------------------

    def save_artifact(self, midi_bytes: bytes, metadata: dict) -> str:
        artifact_id = content_id(midi_bytes)
        atomic_write_bytes(self.artifacts_dir / f"{artifact_id}.mid", midi_bytes)
        document = {"id": artifact_id, **metadata}
        atomic_write_bytes(
            self.artifacts_dir / f"{artifact_id}.json",
            json.dumps(document, sort_keys=True).encode(),
        )
        return artifact_id

    def artifact_bytes(self, artifact_id: str) -> bytes | None:
        path = self.artifacts_dir / f"{artifact_id}.mid"
        return path.read_bytes() if path.is_file() else None

    def artifact_metadata(self, artifact_id: str) -> dict | None:
        path = self.artifacts_dir / f"{artifact_id}.json"
        return json.loads(path.read_text()) if path.is_file() else None

    # -- inspirations -------------------------------------------------------

    def save_inspiration(self, midi_bytes: bytes) -> str:
        inspiration_id = content_id(midi_bytes)
        atomic_write_bytes(
            self.inspirations_dir / f"{inspiration_id}.mid", midi_bytes
        )
        return inspiration_id

    def inspiration_bytes(self, inspiration_id: str) -> bytes | None:
        path = self.inspirations_dir / f"{inspiration_id}.mid"
        return path.read_bytes() if path.is_file() else None

    # -- model -------------------------------------------------------------

    def load_model(self) -> ModelBundle | None:
        """Checkpoint plus (optional) attribute vectors, or None if absent."""
        if not self.checkpoint_path.is_file():
            return None
        checkpoint = load_checkpoint(self.checkpoint_path)
        attrs = None
        if self.attrs_path.is_file():
            attrs = AttributeVectors.from_json(self.attrs_path.read_text())
        return ModelBundle(
            params=checkpoint.params,
            config=checkpoint.config,
            vocab=Vocabulary(checkpoint.vocab),
            attrs=attrs,
            model_hash=checkpoint_hash(self.checkpoint_path),
        )
