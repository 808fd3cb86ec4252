"""Application config: artifact paths plus per-module tuning knobs.

A single JSON file; command-line flags override file values. The file format
round-trips (load -> save -> load is identity).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .pipelines.agentic import ChunkingConfig
from .pipelines.base import RetrievalConfig
from .rdf_store import FlattenConfig


@dataclass
class AppConfig:
    paths: dict[str, str] = field(default_factory=dict)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)
    flatten: FlattenConfig = field(default_factory=FlattenConfig)
    provider: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "paths": self.paths,
                "retrieval": asdict(self.retrieval),
                "chunking": asdict(self.chunking),
                "flatten": asdict(self.flatten),
                "provider": self.provider,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "AppConfig":
        data = json.loads(text)
        return cls(
            paths=data.get("paths", {}),
            retrieval=RetrievalConfig(**data.get("retrieval", {})),
            chunking=ChunkingConfig(**data.get("chunking", {})),
            flatten=FlattenConfig(**data.get("flatten", {})),
            provider=data.get("provider", {}),
        )

    @classmethod
    def load(cls, path: str | Path) -> "AppConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    def path(self, key: str) -> Path:
        if key not in self.paths:
            raise FileNotFoundError(f"config has no path for {key!r}")
        p = Path(self.paths[key])
        if not p.exists():
            raise FileNotFoundError(f"configured {key} path does not exist: {p}")
        return p
