from .agentic import AgenticPipeline, Chunk, ChunkingConfig, build_fund_text, chunk, dechunk
from .base import (
    NO_DATA_ANSWER,
    AnswerResult,
    PipelineResult,
    RetrievalConfig,
    RetrievalContext,
    generate_answer,
    normalize_question,
)
from .lpg import LpgPipeline, Text2CypherResult, render_schema_prompt, retrieve_lpg, text_to_cypher
from .rdf import (
    NodeSelection,
    RdfPipeline,
    RelationshipSelection,
    build_predicate_index,
    retrieve_rdf,
    select_nodes,
    select_relationships,
)

__all__ = [
    "AgenticPipeline",
    "Chunk",
    "ChunkingConfig",
    "build_fund_text",
    "chunk",
    "dechunk",
    "NO_DATA_ANSWER",
    "AnswerResult",
    "PipelineResult",
    "RetrievalConfig",
    "RetrievalContext",
    "generate_answer",
    "normalize_question",
    "LpgPipeline",
    "Text2CypherResult",
    "render_schema_prompt",
    "retrieve_lpg",
    "text_to_cypher",
    "NodeSelection",
    "RdfPipeline",
    "RelationshipSelection",
    "build_predicate_index",
    "retrieve_rdf",
    "select_nodes",
    "select_relationships",
]
