"""Triple-store retrieval: node selection, relationship selection, traversal.

Node selection pairs an LLM mention extractor with deterministic resolution
against fund metadata; relationship selection narrows candidates by category,
then unions an embedding top-k leg with an LLM selection leg. The selected
(nodes x relationships) become triples via either the exact pattern selection
or the breadth-first traversal, rendered as sentences for answer generation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..corpus import FundMetadata
from ..errors import EmptyContextError, GraphRagError, MalformedStructuredOutputError
from ..llm import ChatRequest, complete, parse_structured
from ..predicate_nlp import categorize_predicate, predicate_to_text, triple_to_sentence
from ..rdf_store import TripleStore, memgraph_traverse, sparql_select
from ..vector import FallbackEmbedder, VectorIndex, top_k
from .base import (
    PipelineResult,
    RetrievalConfig,
    RetrievalContext,
    generate_answer,
    normalize_question,
    run_pipeline,
)


@dataclass
class NodeSelection:
    fund_nodes: set[str] = field(default_factory=set)
    extraction: dict = field(default_factory=dict)


@dataclass
class RelationshipSelection:
    embedding_hits: list[str] = field(default_factory=list)
    llm_hits: list[str] = field(default_factory=list)
    degraded: bool = False

    @property
    def final(self) -> set[str]:
        return set(self.embedding_hits) | set(self.llm_hits)


def metadata_digest(metadata: list[FundMetadata]) -> str:
    lines = [
        f"{m.abbreviated_name} | {m.original_name} | class {m.share_class or '-'}"
        f" | {m.product_type} | {m.fund_type}"
        for m in sorted(metadata, key=lambda m: m.abbreviated_name)
    ]
    return "\n".join(lines)


def build_node_extraction_request(question: str, metadata: list[FundMetadata]) -> ChatRequest:
    user = (
        "Known funds (abbreviation | name | share class | product type | fund type):\n"
        f"{metadata_digest(metadata)}\n\n"
        f"Question: {question}\n\n"
        'Extract every mention as JSON: {"funds": [...], "fund_types": [...],'
        ' "asset_classes": [...]}. Use exact abbreviations where possible.'
    )
    return ChatRequest(
        system="You extract fund names, abbreviations, fund types, and asset classes from questions.",
        user=user,
        tag="node_extraction",
    )


_PUNCT = re.compile(r"[^a-z0-9]+")


def _normalize_mention(text: str) -> str:
    return _PUNCT.sub("", text.lower())


def select_nodes(question: str, metadata: list[FundMetadata], store: TripleStore,
                 llm) -> NodeSelection:
    """LLM mention extraction plus deterministic resolution to store subjects."""
    if not metadata:
        raise ValueError("metadata must be non-empty")
    response = complete(build_node_extraction_request(question, metadata), llm)
    try:
        extraction = parse_structured(response, "fund-mentions")
    except MalformedStructuredOutputError:
        extraction = {"funds": [], "fund_types": [], "asset_classes": []}

    by_abbrev = {m.abbreviated_name: m for m in metadata}
    by_norm: dict[str, set[str]] = {}
    for m in metadata:
        by_norm.setdefault(_normalize_mention(m.abbreviated_name), set()).add(m.abbreviated_name)
        by_norm.setdefault(_normalize_mention(m.original_name), set()).add(m.abbreviated_name)

    resolved: set[str] = set()
    for mention in extraction["funds"]:
        if mention in by_abbrev:
            resolved.add(mention)
            continue
        resolved |= by_norm.get(_normalize_mention(mention), set())
    for mention in extraction["fund_types"] + extraction["asset_classes"]:
        lowered = mention.lower()
        for m in metadata:
            if m.fund_type.lower() == lowered or m.product_type.lower() == lowered:
                resolved.add(m.abbreviated_name)

    subjects = set(store.by_subject)
    fund_nodes = resolved & subjects
    if not fund_nodes:
        fund_nodes = subjects  # search-intent fallback: scan every fund
    return NodeSelection(fund_nodes=fund_nodes, extraction=extraction)


def build_predicate_index(store: TripleStore, embedder=None) -> VectorIndex:
    """Vector index over the store's predicates, keyed by predicate path and
    embedded through the rule verbalization."""
    embedder = embedder or FallbackEmbedder()
    predicates = sorted(store.predicates)
    texts = [predicate_to_text(p) for p in predicates]
    index = VectorIndex()
    for predicate, vec, text in zip(predicates, embedder.embed(texts), texts):
        index.add(predicate, vec, text)
    return index


def build_relationship_request(question: str, grouped: dict[str, list[str]],
                               cap: int) -> ChatRequest:
    sections = []
    for category in sorted(grouped):
        listing = "\n".join(f"  {p}" for p in grouped[category])
        sections.append(f"[{category}]\n{listing}")
    user = (
        "Candidate relationships by category:\n"
        + "\n".join(sections)
        + f"\n\nQuestion: {question}\n\n"
        f"Return a JSON array of at most {cap} relationship paths relevant to the question."
    )
    return ChatRequest(
        system="You select graph relationships relevant to a question.",
        user=user,
        tag="relationship_selection",
    )


def select_relationships(question: str, store: TripleStore, cfg: RetrievalConfig,
                         index: VectorIndex, llm, classifier=None,
                         embedder=None) -> RelationshipSelection:
    embedder = embedder or FallbackEmbedder()
    predicates = sorted(store.predicates)
    query_categories = categorize_predicate(question, classifier) if question else {"generic"}
    by_category: dict[str, set[str]] = {}
    candidates = []
    for predicate in predicates:
        cats = categorize_predicate(predicate, classifier)
        for cat in cats:
            by_category.setdefault(cat, set()).add(predicate)
        if cats & query_categories:
            candidates.append(predicate)
    if not candidates:
        candidates = predicates  # empty intersection: fall back to everything

    sub_index = index.restrict(set(candidates))
    query_vec = embedder.embed([question])[0]
    embedding_hits = [p for p, _ in top_k(sub_index, query_vec, cfg.k_embed)]

    grouped = {
        cat: sorted(members & set(candidates))
        for cat, members in by_category.items()
        if members & set(candidates)
    }
    selection = RelationshipSelection(embedding_hits=embedding_hits)
    try:
        response = complete(build_relationship_request(question, grouped, cfg.k_llm_cap), llm)
        raw = parse_structured(response, "relationship-list")
        known = set(predicates)
        selection.llm_hits = [p for p in raw if p in known][: cfg.k_llm_cap]
    except GraphRagError:
        selection.degraded = True  # keep the embedding leg on provider failure
    return selection


def retrieve_rdf(question: str, store: TripleStore, metadata: list[FundMetadata],
                 cfg: RetrievalConfig, llm, index: VectorIndex | None = None,
                 classifier=None) -> tuple[RetrievalContext, list[dict]]:
    question = normalize_question(question)
    index = index or build_predicate_index(store)
    nodes = select_nodes(question, metadata, store, llm)
    rels = select_relationships(question, store, cfg, index, llm, classifier)
    if cfg.traversal == "memgraph":
        triples = memgraph_traverse(store, nodes.fund_nodes, rels.final, cfg.max_hops)
    else:
        triples = sparql_select(store, nodes.fund_nodes, rels.final)
    if not triples:
        raise EmptyContextError("no triples matched the selected nodes and relationships")
    pairs = [
        (triple_to_sentence(t, predicate_to_text(t.predicate)), json.dumps(list(t)))
        for t in triples
    ]
    context = RetrievalContext.from_pairs(pairs)
    timings = [
        {"stage": "select_nodes", "llm_calls": 1, "items": len(nodes.fund_nodes)},
        {"stage": "select_relationships", "llm_calls": 0 if rels.degraded else 1,
         "items": len(rels.final)},
        {"stage": "traverse", "items": len(triples)},
    ]
    return context, timings


class RdfPipeline:
    """End-to-end question answering over the triple store."""

    name = "rdf"

    def __init__(self, store: TripleStore, metadata: list[FundMetadata],
                 cfg: RetrievalConfig | None = None, llm=None, classifier=None):
        self.store = store
        self.metadata = metadata
        self.cfg = cfg or RetrievalConfig()
        self.llm = llm
        self.classifier = classifier
        self.index = build_predicate_index(store)

    def retrieve(self, question: str) -> tuple[RetrievalContext, list[dict]]:
        return retrieve_rdf(
            question, self.store, self.metadata, self.cfg, self.llm,
            index=self.index, classifier=self.classifier,
        )

    def answer(self, question: str, context: RetrievalContext):
        return generate_answer(question, context, self.llm)

    def run(self, question: str) -> PipelineResult:
        return run_pipeline(question, self.retrieve, self.llm)
