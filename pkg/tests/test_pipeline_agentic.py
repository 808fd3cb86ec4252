from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphrag.corpus import FundDocument
from graphrag.errors import EmptyContextError
from graphrag.pipelines import RetrievalConfig
from graphrag.pipelines.agentic import (
    ChunkingConfig,
    build_chunk_index,
    build_fund_text,
    chunk,
    dechunk,
    retrieve_agentic,
)
from graphrag.rdf_store import flatten
from graphrag.vector import FallbackEmbedder, VectorIndex

from conftest import FLAT_FUND_BODY


def test_fund_text_contains_golden_sentence(flat_doc):
    text = build_fund_text(flat_doc)
    assert "AMCAP-F3 Fund Type is Growth" in text


def test_fund_text_single_sentence_no_separator():
    doc = FundDocument("X", {"abbreviatedName": "X"})
    assert build_fund_text(doc) == "X Abbreviated Name is X"


def test_sentence_count_equals_triple_count(small_corpus):
    docs, _ = small_corpus
    for doc in docs[:4]:
        text = build_fund_text(doc)
        assert len(text.split(". ")) == len(flatten(doc))


def test_chunk_small_text_single_chunk():
    chunks = chunk(" ".join(f"t{i}" for i in range(10)), ChunkingConfig())
    assert len(chunks) == 1
    assert chunks[0].chunk_id == "doc#0"
    assert chunks[0].token_span == (0, 10)


def test_chunk_stride_arithmetic():
    text = " ".join(f"t{i}" for i in range(1000))
    chunks = chunk(text, ChunkingConfig(chunk_size=512, chunk_overlap=64))
    assert [c.token_span[0] for c in chunks] == [0, 448, 896]
    assert chunks[-1].token_span == (896, 1000)


def test_chunk_exact_multiple_stops_at_end():
    text = " ".join(f"t{i}" for i in range(512))
    chunks = chunk(text, ChunkingConfig(chunk_size=512, chunk_overlap=64))
    assert len(chunks) == 1


def test_chunk_zero_overlap_partitions():
    tokens = [f"t{i}" for i in range(100)]
    chunks = chunk(" ".join(tokens), ChunkingConfig(chunk_size=30, chunk_overlap=0))
    rebuilt = [tok for c in chunks for tok in c.text.split()]
    assert rebuilt == tokens


def test_consecutive_chunks_overlap_exactly():
    cfg = ChunkingConfig(chunk_size=50, chunk_overlap=7)
    chunks = chunk(" ".join(f"t{i}" for i in range(300)), cfg)
    for a, b in zip(chunks, chunks[1:]):
        assert a.token_span[1] - b.token_span[0] == 7


@settings(max_examples=150, deadline=None)
@given(
    st.integers(min_value=0, max_value=400),
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=0, max_value=59),
)
def test_dechunk_round_trip(n_tokens, size, overlap):
    overlap = min(overlap, size - 1)
    tokens = [f"w{i}" for i in range(n_tokens)]
    cfg = ChunkingConfig(chunk_size=size, chunk_overlap=overlap)
    assert dechunk(chunk(" ".join(tokens), cfg), overlap) == tokens


def test_chunking_config_validation():
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_size=0)
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_size=10, chunk_overlap=10)


def test_retrieve_all_chunks_when_k_exceeds_index(small_corpus):
    docs, _ = small_corpus
    index = build_chunk_index(docs[:2], ChunkingConfig())
    cfg = RetrievalConfig(top_k_docs=1000)
    context, _ = retrieve_agentic("anything", index, cfg, ChunkingConfig())
    assert len(context.items) == len(index)


def test_retrieve_context_size_is_min_k_index(small_corpus):
    docs, _ = small_corpus
    index = build_chunk_index(docs, ChunkingConfig())
    for k in (1, 3, 8):
        cfg = RetrievalConfig(top_k_docs=k)
        context, _ = retrieve_agentic("growth", index, cfg, ChunkingConfig())
        assert len(context.items) == min(k, len(index))


def test_retrieve_empty_index_raises():
    with pytest.raises(EmptyContextError):
        retrieve_agentic("q", VectorIndex(), RetrievalConfig(), ChunkingConfig())


def test_rerank_permutes_same_item_set(small_corpus):
    docs, _ = small_corpus
    index = build_chunk_index(docs, ChunkingConfig())
    cfg = RetrievalConfig(top_k_docs=5)
    plain, _ = retrieve_agentic("benchmark", index, cfg, ChunkingConfig(rerank=False))
    ranked, _ = retrieve_agentic("benchmark", index, cfg, ChunkingConfig(rerank=True))
    assert sorted(plain.provenance) == sorted(ranked.provenance)


def test_manager_chunk_reachable_by_similarity(small_corpus):
    docs, _ = small_corpus
    target = docs[0]
    index = build_chunk_index(docs, ChunkingConfig())
    cfg = RetrievalConfig(top_k_docs=8)
    question = f"{target.doc_id} portfolio managers"
    context, _ = retrieve_agentic(question, index, cfg, ChunkingConfig())
    manager = target.body["portfolioManagers"][0]
    assert any(manager in item for item in context.items)


def test_chunk_ids_carry_doc_and_ordinal(small_corpus):
    docs, _ = small_corpus
    index = build_chunk_index(docs[:1], ChunkingConfig(chunk_size=64, chunk_overlap=8))
    ids = [e.item_id for e in index.entries]
    assert ids == [f"{docs[0].doc_id}#{i}" for i in range(len(ids))]
