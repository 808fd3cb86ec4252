"""Shared retrieval plumbing: configs, evidence contexts, answer generation."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from ..errors import EmptyContextError
from ..llm import ChatRequest, complete

NO_DATA_ANSWER = "No supporting data found."


@dataclass
class RetrievalConfig:
    k_embed: int = 50        # embedding leg cap for relationship selection
    k_llm_cap: int = 100     # LLM leg cap for relationship selection
    max_hops: int = 2
    top_k_docs: int = 8      # K: chunks retrieved by the agentic pipeline
    traversal: str = "sparql"  # "sparql" | "memgraph"

    def __post_init__(self):
        for name in ("k_embed", "k_llm_cap", "max_hops", "top_k_docs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.traversal not in ("sparql", "memgraph"):
            raise ValueError("traversal must be 'sparql' or 'memgraph'")


@dataclass
class RetrievalContext:
    """Ordered, deduplicated evidence with one provenance tag per item."""

    items: list[str] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.items) != len(self.provenance):
            raise ValueError("provenance must align with items")

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]]) -> "RetrievalContext":
        items, provenance, seen = [], [], set()
        for item, source in pairs:
            if item in seen:
                continue
            seen.add(item)
            items.append(item)
            provenance.append(source)
        return cls(items, provenance)


@dataclass
class AnswerResult:
    text: str
    provenance: list[str] = field(default_factory=list)


@dataclass
class PipelineResult:
    answer: str
    context: list[str]
    provenance: list[str]
    timings: list[dict] = field(default_factory=list)


def normalize_question(question: str) -> str:
    """Trim, unicode-NFC, and strip a trailing question mark."""
    text = unicodedata.normalize("NFC", question.strip())
    return text[:-1].rstrip() if text.endswith("?") else text


ANSWER_SYSTEM = (
    "You answer questions about investment funds. Use only the evidence "
    "provided; do not invent facts. If the evidence is insufficient, say so."
)


def build_answer_request(question: str, context: RetrievalContext) -> ChatRequest:
    evidence = "\n".join(f"- {item}" for item in context.items)
    user = f"Evidence:\n{evidence}\n\nQuestion: {question}\nAnswer:"
    return ChatRequest(system=ANSWER_SYSTEM, user=user, tag="answer")


def generate_answer(question: str, context: RetrievalContext, llm) -> AnswerResult:
    """One LLM call with the fixed answer template; empty context short-circuits."""
    if not context.items:
        return AnswerResult(NO_DATA_ANSWER, [])
    text = complete(build_answer_request(question, context), llm)
    return AnswerResult(text, list(context.provenance))


def run_pipeline(question: str, retrieve, llm) -> PipelineResult:
    """Retrieve + answer with the shared empty-context fallback."""
    try:
        context, timings = retrieve(question)
    except EmptyContextError:
        return PipelineResult(NO_DATA_ANSWER, [], [], [{"stage": "retrieve", "items": 0}])
    answer = generate_answer(question, context, llm)
    timings = timings + [{"stage": "answer", "llm_calls": 1}]
    return PipelineResult(answer.text, list(context.items), answer.provenance, timings)
