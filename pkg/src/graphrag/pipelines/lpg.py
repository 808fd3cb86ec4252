"""Text-to-Cypher retrieval: schema-augmented prompting, validated generation
with error-feedback retries, execution, and row rendering."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import FundMetadata
from ..errors import (
    CypherSyntaxError,
    EmptyContextError,
    MalformedStructuredOutputError,
    TranslationFailedError,
    TypeMismatchError,
    UnboundVariableError,
    UnsupportedFeatureError,
)
from ..llm import ChatRequest, complete, parse_structured
from ..lpg import (
    CypherQuery,
    GraphSchema,
    PropertyGraph,
    execute_cypher,
    parse_cypher,
    print_query,
    validate_query,
)
from ..lpg.cypher_ast import UpdateScript
from .base import (
    PipelineResult,
    RetrievalContext,
    generate_answer,
    normalize_question,
    run_pipeline,
)
from .rdf import metadata_digest

DEFAULT_MAX_RETRIES = 2


@dataclass
class Text2CypherPrompt:
    schema_text: str
    descriptions_text: str
    metadata_text: str
    question: str
    few_shot: str = ""

    def render(self) -> str:
        parts = ["Graph schema:", self.schema_text]
        if self.descriptions_text:
            parts += ["", "Descriptions:", self.descriptions_text]
        parts += ["", "Fund metadata:", self.metadata_text]
        if self.few_shot:
            parts += ["", "Examples:", self.few_shot]
        parts += ["", f"Question: {self.question}"]
        return "\n".join(parts)


@dataclass
class CypherAttempt:
    attempt_no: int
    generated: str
    errors: list[str] = field(default_factory=list)


@dataclass
class Text2CypherResult:
    query: CypherQuery
    attempts: list[CypherAttempt] = field(default_factory=list)


def render_schema_text(schema: GraphSchema) -> str:
    """Per-label block with sorted properties plus incoming/outgoing rel lists."""
    incoming: dict[str, set[str]] = {}
    outgoing: dict[str, set[str]] = {}
    for rel_type, pairs in schema.rel_endpoints.items():
        for from_label, to_label in pairs:
            outgoing.setdefault(from_label, set()).add(f"{rel_type} -> {to_label}")
            incoming.setdefault(to_label, set()).add(f"{from_label} -> {rel_type}")
    lines = []
    for label in schema.labels:
        lines.append(f"Label :{label}")
        props = schema.properties_per_label.get(label, [])
        lines.append("  properties: " + (", ".join(props) if props else "(none)"))
        outs = sorted(outgoing.get(label, ()))
        ins = sorted(incoming.get(label, ()))
        lines.append("  outgoing: " + ("; ".join(outs) if outs else "(none)"))
        lines.append("  incoming: " + ("; ".join(ins) if ins else "(none)"))
    lines.append("Relationship types: " + (", ".join(schema.rel_types) if schema.rel_types else "(none)"))
    return "\n".join(lines)


def render_schema_prompt(schema: GraphSchema, metadata: list[FundMetadata],
                         question: str, few_shot: str = "") -> Text2CypherPrompt:
    descriptions = "\n".join(
        f"{name}: {text}" for name, text in sorted(schema.descriptions.items())
    )
    return Text2CypherPrompt(
        schema_text=render_schema_text(schema),
        descriptions_text=descriptions,
        metadata_text=metadata_digest(metadata),
        question=question,
        few_shot=few_shot,
    )


_T2C_SYSTEM = (
    "You translate questions into Cypher for the given schema. Reply with a "
    "single query inside a ```cypher code block. Use only MATCH, WHERE, "
    "RETURN, DISTINCT, ORDER BY, LIMIT, count(*), labels(), keys(), UNWIND."
)


def build_text2cypher_request(prompt: Text2CypherPrompt,
                              feedback: str = "") -> ChatRequest:
    user = prompt.render()
    if feedback:
        user += f"\n\nYour previous attempt failed:\n{feedback}\nReturn a corrected query."
    return ChatRequest(system=_T2C_SYSTEM, user=user, tag="text2cypher")


def text_to_cypher(question: str, schema: GraphSchema, metadata: list[FundMetadata],
                   llm, max_retries: int = DEFAULT_MAX_RETRIES) -> Text2CypherResult:
    """Generate, parse, and validate a query; retry with error feedback."""
    prompt = render_schema_prompt(schema, metadata, question)
    attempts: list[CypherAttempt] = []
    feedback = ""
    for attempt_no in range(1, max_retries + 2):
        response = complete(build_text2cypher_request(prompt, feedback), llm)
        attempt = CypherAttempt(attempt_no, response)
        attempts.append(attempt)
        try:
            text = parse_structured(response, "cypher-block")
        except MalformedStructuredOutputError as exc:
            attempt.errors.append(str(exc))
            feedback = _feedback(response, attempt.errors)
            continue
        try:
            query = parse_cypher(text)
        except (CypherSyntaxError, UnboundVariableError, UnsupportedFeatureError) as exc:
            attempt.errors.append(str(exc))
            feedback = _feedback(text, attempt.errors)
            continue
        if isinstance(query, UpdateScript):
            attempt.errors.append("write queries are not allowed here")
            feedback = _feedback(text, attempt.errors)
            continue
        report = validate_query(schema, query)
        if report.ok():
            return Text2CypherResult(query, attempts)
        attempt.errors.extend(issue.render() for issue in report.issues)
        feedback = _feedback(text, attempt.errors)
    raise TranslationFailedError(attempts)


def _feedback(attempt_text: str, errors: list[str]) -> str:
    listing = "\n".join(f"- {e}" for e in errors)
    return f"```\n{attempt_text}\n```\nErrors:\n{listing}"


def retrieve_lpg(question: str, graph: PropertyGraph, schema: GraphSchema,
                 metadata: list[FundMetadata], llm,
                 max_retries: int = DEFAULT_MAX_RETRIES) -> tuple[RetrievalContext, list[dict]]:
    question = normalize_question(question)
    result = text_to_cypher(question, schema, metadata, llm, max_retries)
    query_text = print_query(result.query)
    try:
        table = execute_cypher(graph, result.query)
    except TypeMismatchError as exc:
        raise TranslationFailedError(
            result.attempts + [CypherAttempt(len(result.attempts) + 1, query_text, [str(exc)])]
        ) from exc
    if not table.rows:
        raise EmptyContextError(f"query returned no rows: {query_text}")
    lines = table.render_rows()
    context = RetrievalContext.from_pairs([(line, query_text) for line in lines])
    timings = [
        {"stage": "text_to_cypher", "llm_calls": len(result.attempts)},
        {"stage": "execute", "items": len(table.rows)},
    ]
    return context, timings


class LpgPipeline:
    """End-to-end question answering over the property graph."""

    name = "lpg"

    def __init__(self, graph: PropertyGraph, schema: GraphSchema,
                 metadata: list[FundMetadata], llm=None,
                 max_retries: int = DEFAULT_MAX_RETRIES):
        self.graph = graph
        self.schema = schema
        self.metadata = metadata
        self.llm = llm
        self.max_retries = max_retries

    def retrieve(self, question: str) -> tuple[RetrievalContext, list[dict]]:
        return retrieve_lpg(
            question, self.graph, self.schema, self.metadata, self.llm, self.max_retries
        )

    def answer(self, question: str, context: RetrievalContext):
        return generate_answer(question, context, self.llm)

    def run(self, question: str) -> PipelineResult:
        return run_pipeline(question, self.retrieve, self.llm)
