"""Labeled property graph: storage, Cypher subset, loader, and validation."""

from .cypher_ast import CypherQuery, UpdateScript, print_query
from .cypher_exec import ResultTable, execute_cypher, render_value
from .cypher_parser import parse_cypher
from .graph import (
    GraphEdge,
    GraphNode,
    GraphSchema,
    PropertyGraph,
    extract_schema,
    load_fund,
    load_graph,
    load_graph_from_docs,
    save_graph,
)
from .validate import ValidationIssue, ValidationReport, validate_query

__all__ = [
    "CypherQuery",
    "UpdateScript",
    "print_query",
    "ResultTable",
    "execute_cypher",
    "render_value",
    "parse_cypher",
    "GraphEdge",
    "GraphNode",
    "GraphSchema",
    "PropertyGraph",
    "extract_schema",
    "load_fund",
    "load_graph",
    "load_graph_from_docs",
    "save_graph",
    "ValidationIssue",
    "ValidationReport",
    "validate_query",
]
