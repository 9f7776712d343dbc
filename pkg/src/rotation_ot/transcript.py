"""One-JSON-document-per-session transcripts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .protocol import (
    BobOutcome,
    CipherState,
    OpeningMessage,
    SessionParams,
    outcome_from_dict,
)

TRANSCRIPT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SessionTranscript:
    params: Optional[SessionParams]
    cipher: CipherState
    opening: OpeningMessage
    outcome: BobOutcome
    seed: int
    kind: str = "bit-string-ot"
    extra: Optional[dict] = None

    def to_dict(self) -> dict:
        doc = {
            "schema_version": TRANSCRIPT_SCHEMA_VERSION,
            "kind": self.kind,
            "seed": self.seed,
            "params": self.params.to_dict() if self.params else None,
            "cipher": self.cipher.to_list(),
            "opening": self.opening.to_dict(),
            "outcome": self.outcome.to_dict(),
        }
        if self.extra:
            doc["extra"] = self.extra
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SessionTranscript":
        if doc.get("schema_version") != TRANSCRIPT_SCHEMA_VERSION:
            raise ValueError(f"unsupported transcript schema {doc.get('schema_version')!r}")
        return cls(
            params=SessionParams.from_dict(doc["params"]) if doc["params"] else None,
            cipher=CipherState.from_list(doc["cipher"]),
            opening=OpeningMessage.from_dict(doc["opening"]),
            outcome=outcome_from_dict(doc["outcome"]),
            seed=int(doc["seed"]),
            kind=doc.get("kind", "bit-string-ot"),
            extra=doc.get("extra"),
        )

    def dumps(self) -> str:
        # float repr is the shortest string that round-trips exactly (<= 17 digits)
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def loads(cls, text: str) -> "SessionTranscript":
        return cls.from_dict(json.loads(text))


def write_transcript(directory: Path, index: int, transcript: SessionTranscript) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"session-{index:07d}.json"
    path.write_text(transcript.dumps())
    return path


def read_transcript(path: Path) -> SessionTranscript:
    return SessionTranscript.loads(Path(path).read_text())
