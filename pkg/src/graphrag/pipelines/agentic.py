"""Embedding-baseline retrieval: triple sentences, chunking, top-K, rerank.

This is the comparison pipeline: every fund document becomes one concatenated
body of triple sentences, sliding-window chunked over whitespace tokens and
embedded into an exact-search index. Retrieval always returns min(K, index
size) chunks no matter how many funds actually answer the question, which is
precisely the failure mode the graph pipelines avoid.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import FundDocument
from ..errors import EmptyContextError
from ..predicate_nlp import predicate_to_text, triple_to_sentence
from ..rdf_store import FlattenConfig, flatten
from ..vector import Embedder, FallbackEmbedder, VectorIndex, rerank, top_k
from .base import (
    PipelineResult,
    RetrievalConfig,
    RetrievalContext,
    generate_answer,
    normalize_question,
    run_pipeline,
)


@dataclass
class Chunk:
    chunk_id: str  # "<doc_id>#<n>"
    text: str
    token_span: tuple[int, int]


@dataclass
class ChunkingConfig:
    chunk_size: int = 512
    chunk_overlap: int = 64
    rerank: bool = False

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise ValueError("chunk_overlap must be in [0, chunk_size)")


def build_fund_text(doc: FundDocument, flatten_cfg: FlattenConfig | None = None) -> str:
    """All triple sentences of one fund, joined with '. ' in flatten order."""
    sentences = [
        triple_to_sentence(t, predicate_to_text(t.predicate))
        for t in flatten(doc, flatten_cfg)
    ]
    return ". ".join(sentences)


def chunk(text: str, cfg: ChunkingConfig, doc_id: str = "doc") -> list[Chunk]:
    """Sliding window over whitespace tokens, stride = size - overlap; the
    final window may be partial, and chunking stops once a window reaches the
    last token."""
    tokens = text.split()
    if not tokens:
        return []
    stride = cfg.chunk_size - cfg.chunk_overlap
    chunks: list[Chunk] = []
    start = 0
    n = 0
    while True:
        end = min(start + cfg.chunk_size, len(tokens))
        chunks.append(Chunk(f"{doc_id}#{n}", " ".join(tokens[start:end]), (start, end)))
        if end >= len(tokens):
            break
        start += stride
        n += 1
    return chunks


def dechunk(chunks: list[Chunk], overlap: int) -> list[str]:
    """Reassemble the original token sequence (overlaps dropped)."""
    tokens: list[str] = []
    prev_end = 0
    for c in chunks:
        start, end = c.token_span
        drop = prev_end - start
        tokens.extend(c.text.split()[max(drop, 0):])
        prev_end = end
    return tokens


def build_chunk_index(docs: list[FundDocument], cfg: ChunkingConfig,
                      embedder: Embedder | None = None,
                      flatten_cfg: FlattenConfig | None = None) -> VectorIndex:
    embedder = embedder or FallbackEmbedder()
    chunks: list[Chunk] = []
    for doc in docs:
        chunks.extend(chunk(build_fund_text(doc, flatten_cfg), cfg, doc.doc_id))
    index = VectorIndex()
    vectors = embedder.embed([c.text for c in chunks])
    for c, vec in zip(chunks, vectors):
        index.add(c.chunk_id, vec, c.text)
    return index


def retrieve_agentic(question: str, index: VectorIndex, cfg: RetrievalConfig,
                     chunking: ChunkingConfig, embedder: Embedder | None = None,
                     reranker=None) -> tuple[RetrievalContext, list[dict]]:
    if not len(index):
        raise EmptyContextError("chunk index is empty")
    question = normalize_question(question)
    embedder = embedder or FallbackEmbedder()
    query_vec = embedder.embed([question])[0]
    hits = top_k(index, query_vec, cfg.top_k_docs)
    ordered = [(item_id, index.payload(item_id)) for item_id, _ in hits]
    if chunking.rerank:
        result = rerank(question, ordered, reranker)
        by_id = dict(ordered)
        ordered = [(item_id, by_id[item_id]) for item_id in result.item_ids()]
    context = RetrievalContext.from_pairs([(text, item_id) for item_id, text in ordered])
    timings = [{"stage": "top_k", "items": len(hits)}]
    return context, timings


class AgenticPipeline:
    """Fixed-K embedding retrieval over chunked fund text."""

    name = "agentic"

    def __init__(self, index: VectorIndex, cfg: RetrievalConfig | None = None,
                 chunking: ChunkingConfig | None = None, llm=None,
                 embedder: Embedder | None = None, reranker=None):
        self.index = index
        self.cfg = cfg or RetrievalConfig()
        self.chunking = chunking or ChunkingConfig()
        self.llm = llm
        self.embedder = embedder or FallbackEmbedder()
        self.reranker = reranker

    def retrieve(self, question: str) -> tuple[RetrievalContext, list[dict]]:
        return retrieve_agentic(
            question, self.index, self.cfg, self.chunking, self.embedder, self.reranker
        )

    def answer(self, question: str, context: RetrievalContext):
        return generate_answer(question, context, self.llm)

    def run(self, question: str) -> PipelineResult:
        return run_pipeline(question, self.retrieve, self.llm)
