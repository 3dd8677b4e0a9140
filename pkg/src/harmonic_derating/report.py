"""Versioned JSON report written by the command-line tool."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "harmonic-derating report",
    "type": "object",
    "required": ["schema_version", "tool_version", "command", "input_digest", "metrics", "plots"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "command": {"enum": ["analyze", "scenarios"]},
        "input_digest": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "generated_at": {"type": "string"},
        "metrics": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "thd", "f_hl", "eddy_loss_w", "eddy_loss_pu", "derating"],
            },
        },
        "plots": {"type": "object"},
    },
    "additionalProperties": False,
}


def digest(chunks: Iterable[bytes]) -> str:
    """sha256 over length-prefixed chunks, so chunk boundaries count too."""
    h = hashlib.sha256()
    for c in chunks:
        h.update(len(c).to_bytes(8, "big"))
        h.update(c)
    return "sha256:" + h.hexdigest()


@dataclass
class ReportDocument:
    tool_version: str
    command: str
    input_digest: str
    metrics: list[dict] = field(default_factory=list)
    plots: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    generated_at: str | None = None

    def to_dict(self) -> dict:
        doc = asdict(self)
        if doc["generated_at"] is None:
            del doc["generated_at"]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "ReportDocument":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {doc.get('schema_version')!r}")
        return cls(
            tool_version=doc["tool_version"],
            command=doc["command"],
            input_digest=doc["input_digest"],
            metrics=doc.get("metrics", []),
            plots=doc.get("plots", {}),
            schema_version=doc["schema_version"],
            generated_at=doc.get("generated_at"),
        )

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))
