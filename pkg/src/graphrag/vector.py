"""Embedding providers, exact cosine top-k index, and reranking.

The fallback embedder is fully offline and deterministic: character 3-grams
signed-hashed into 1024 buckets, then L2-normalized. A remote provider with
the same 1024-d contract can be swapped in through the ``Embedder`` handle;
search stays exact (paper-scale corpora do not need ANN structures).
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import DimensionMismatchError, ProviderUnavailableError

EMBED_DIM = 1024

_gram_cache: dict[str, tuple[int, float]] = {}


def _gram_bucket(gram: str) -> tuple[int, float]:
    hit = _gram_cache.get(gram)
    if hit is None:
        h = zlib.crc32(gram.encode("utf-8"))
        hit = (h % EMBED_DIM, 1.0 if (h >> 10) & 1 else -1.0)
        _gram_cache[gram] = hit
    return hit


class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[np.ndarray]: ...


class FallbackEmbedder:
    """Deterministic signed-hash 3-gram embedder (unit-norm f32 vectors)."""

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self._one(t) for t in texts]

    def _one(self, text: str) -> np.ndarray:
        vec = np.zeros(EMBED_DIM, dtype=np.float64)
        padded = f"##{text.lower()}##"
        for i in range(len(padded) - 2):
            bucket, sign = _gram_bucket(padded[i : i + 3])
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return (vec / norm).astype(np.float32)


class RemoteEmbedder:
    """OpenAI-compatible embeddings endpoint; configured via
    GRAPHRAG_EMBED_URL / GRAPHRAG_EMBED_KEY / GRAPHRAG_EMBED_MODEL."""

    def __init__(self, url: str | None = None, api_key: str | None = None,
                 model: str | None = None):
        self.url = url or os.environ.get("GRAPHRAG_EMBED_URL")
        self.api_key = api_key or os.environ.get("GRAPHRAG_EMBED_KEY", "")
        self.model = model or os.environ.get("GRAPHRAG_EMBED_MODEL", "bge-m3")
        if not self.url:
            raise ProviderUnavailableError("no embedding endpoint configured")

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        import requests

        try:
            resp = requests.post(
                self.url,
                json={"model": self.model, "input": list(texts)},
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=60,
            )
            resp.raise_for_status()
            payload = resp.json()
        except Exception as exc:  # noqa: BLE001 - network failures collapse here
            raise ProviderUnavailableError(str(exc)) from exc
        out = []
        for row in payload["data"]:
            vec = np.asarray(row["embedding"], dtype=np.float32)
            if vec.shape != (EMBED_DIM,):
                raise DimensionMismatchError(EMBED_DIM, int(vec.shape[0]))
            norm = float(np.linalg.norm(vec))
            out.append(vec / norm if norm else vec)
        return out


@dataclass
class IndexEntry:
    item_id: str
    vector: np.ndarray
    payload: str


class VectorIndex:
    """Exact-search index over unit vectors; item ids are unique."""

    def __init__(self, entries: Iterable[IndexEntry] = ()):
        self.entries: list[IndexEntry] = []
        self._ids: set[str] = set()
        self._matrix: np.ndarray | None = None
        for e in entries:
            self.add(e.item_id, e.vector, e.payload)

    def add(self, item_id: str, vector: np.ndarray, payload: str = "") -> None:
        if item_id in self._ids:
            raise ValueError(f"duplicate item id {item_id!r}")
        if vector.shape != (EMBED_DIM,):
            raise DimensionMismatchError(EMBED_DIM, int(vector.shape[0]))
        self._ids.add(item_id)
        self.entries.append(IndexEntry(item_id, vector.astype(np.float32), payload))
        self._matrix = None

    def __len__(self) -> int:
        return len(self.entries)

    def payload(self, item_id: str) -> str:
        for e in self.entries:
            if e.item_id == item_id:
                return e.payload
        raise KeyError(item_id)

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if not self.entries:
                self._matrix = np.zeros((0, EMBED_DIM), dtype=np.float32)
            else:
                self._matrix = np.stack([e.vector for e in self.entries])
        return self._matrix

    def restrict(self, item_ids: set[str]) -> "VectorIndex":
        """View containing only the given ids (for category-filtered search)."""
        return VectorIndex(e for e in self.entries if e.item_id in item_ids)


def top_k(index: VectorIndex, query: np.ndarray, k: int) -> list[tuple[str, float]]:
    """Exact k-nearest by cosine; ties broken by item_id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not len(index):
        return []
    scores = index.matrix() @ query.astype(np.float32)
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.entries[i].item_id))
    return [(index.entries[i].item_id, float(scores[i])) for i in order[:k]]


@dataclass
class RerankResult:
    ranking: list[tuple[str, float]]

    def item_ids(self) -> list[str]:
        return [item_id for item_id, _ in self.ranking]


class Reranker(Protocol):
    def rerank(self, query: str, passages: Sequence[tuple[str, str]]) -> RerankResult: ...


def _tokens(text: str) -> set[str]:
    return {t for t in "".join(c if c.isalnum() else " " for c in text.lower()).split() if t}


class FallbackReranker:
    """Token Jaccard between query and passage; ties keep the original rank."""

    def rerank(self, query: str, passages: Sequence[tuple[str, str]]) -> RerankResult:
        q = _tokens(query)
        scored = []
        for rank, (item_id, text) in enumerate(passages):
            p = _tokens(text)
            union = q | p
            score = len(q & p) / len(union) if union else 0.0
            scored.append((rank, item_id, score))
        scored.sort(key=lambda row: (-row[2], row[0]))
        return RerankResult([(item_id, score) for _, item_id, score in scored])


def rerank(query: str, passages: Sequence[tuple[str, str]],
           model: Reranker | None = None) -> RerankResult:
    return (model or FallbackReranker()).rerank(query, passages)


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Binary little-endian f32 rows plus a JSON sidecar with the id map."""
    path = Path(path)
    matrix = index.matrix().astype("<f4")
    path.write_bytes(matrix.tobytes())
    sidecar = {
        "dim": EMBED_DIM,
        "count": len(index),
        "ids": [e.item_id for e in index.entries],
        "payloads": [e.payload for e in index.entries],
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, ensure_ascii=False), encoding="utf-8"
    )


def load_index(path: str | Path) -> VectorIndex:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text(encoding="utf-8"))
    raw = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(sidecar["count"], sidecar["dim"])
    index = VectorIndex()
    for i, item_id in enumerate(sidecar["ids"]):
        index.add(item_id, raw[i].copy(), sidecar["payloads"][i])
    return index
