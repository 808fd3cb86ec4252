"""Labeled property graph: storage, MERGE-style loading, schema extraction.

Nodes carry labels and scalar properties; edges carry an uppercase rel type.
Loading follows MERGE semantics keyed on (label, canonical key property), so
shared attributes (product types, benchmarks, managers, regions, holdings)
become one node reused across funds, and reloading a document is a no-op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import FundDocument, FundMetadata

Scalar = str | int | float | bool


@dataclass
class GraphNode:
    node_id: str
    labels: set[str]
    properties: dict[str, Scalar] = field(default_factory=dict)


@dataclass
class GraphEdge:
    edge_id: str
    rel_type: str
    from_id: str
    to_id: str
    properties: dict[str, Scalar] = field(default_factory=dict)


class PropertyGraph:
    def __init__(self):
        self.nodes: dict[str, GraphNode] = {}
        self.edges: dict[str, GraphEdge] = {}
        self.out_edges: dict[str, list[str]] = {}
        self.in_edges: dict[str, list[str]] = {}
        self._merge_index: dict[tuple, str] = {}
        self._edge_index: dict[tuple[str, str, str], str] = {}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PropertyGraph)
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def merge_node(self, label: str, key_props: dict[str, Scalar]) -> GraphNode:
        """Find-or-create a node by (label, key property map)."""
        if not label:
            raise ValueError("nodes require a label")
        key = (label, tuple(sorted(key_props.items())))
        node_id = self._merge_index.get(key)
        if node_id is not None:
            return self.nodes[node_id]
        node_id = f"n{len(self.nodes)}"
        node = GraphNode(node_id, {label}, dict(key_props))
        self.nodes[node_id] = node
        self.out_edges[node_id] = []
        self.in_edges[node_id] = []
        self._merge_index[key] = node_id
        return node

    def merge_edge(self, rel_type: str, from_id: str, to_id: str,
                   properties: dict[str, Scalar] | None = None) -> GraphEdge:
        if from_id not in self.nodes or to_id not in self.nodes:
            raise KeyError("edge endpoints must exist")
        key = (rel_type, from_id, to_id)
        edge_id = self._edge_index.get(key)
        if edge_id is not None:
            edge = self.edges[edge_id]
            if properties:
                edge.properties.update(properties)
            return edge
        edge_id = f"e{len(self.edges)}"
        edge = GraphEdge(edge_id, rel_type, from_id, to_id, dict(properties or {}))
        self.edges[edge_id] = edge
        self.out_edges[from_id].append(edge_id)
        self.in_edges[to_id].append(edge_id)
        self._edge_index[key] = edge_id
        return edge

    def set_properties(self, node: GraphNode, props: dict[str, Scalar]) -> None:
        node.properties.update(props)

    def nodes_with_label(self, label: str) -> list[GraphNode]:
        return [n for n in self.nodes.values() if label in n.labels]


# --- fund loading ----------------------------------------------------------

FUND_LABEL = "Fund"

# (body key, target label, key property, rel type) for scalar attributes that
# become shared nodes instead of fund properties
_ATTRIBUTE_NODES = (
    ("productType", "ProductType", "type", "HAS_PRODUCT_TYPE"),
    ("fundType", "FundType", "type", "HAS_FUND_TYPE"),
    ("benchmarkName", "Benchmark", "name", "HAS_BENCHMARK"),
    ("shareClass", "ShareClass", "name", "HAS_SHARE_CLASS"),
)

_HANDLED_KEYS = {
    "abbreviatedName", "portfolioManagers", "successMetrics", "returns",
    "geographicBreakdown", "topHoldings", "fees",
} | {key for key, *_ in _ATTRIBUTE_NODES}


def _is_scalar(value: object) -> bool:
    return isinstance(value, (str, int, float, bool))


def load_fund(graph: PropertyGraph, doc: FundDocument,
              metadata: FundMetadata | None = None) -> None:
    """Merge one fund document into the graph (idempotent)."""
    body = doc.body
    fund = graph.merge_node(FUND_LABEL, {"name": doc.doc_id})

    scalars = {
        k: v for k, v in body.items() if _is_scalar(v) and k not in _HANDLED_KEYS
    }
    graph.set_properties(fund, scalars)

    for key, label, prop, rel in _ATTRIBUTE_NODES:
        value = body.get(key)
        if _is_scalar(value):
            target = graph.merge_node(label, {prop: value})
            graph.merge_edge(rel, fund.node_id, target.node_id)

    if "shareClass" not in body and metadata and metadata.share_class:
        target = graph.merge_node("ShareClass", {"name": metadata.share_class})
        graph.merge_edge("HAS_SHARE_CLASS", fund.node_id, target.node_id)

    for manager in body.get("portfolioManagers") or []:
        name = manager.get("name") if isinstance(manager, dict) else manager
        if isinstance(name, str) and name:
            target = graph.merge_node("PortfolioManager", {"name": name})
            graph.merge_edge("MANAGED_BY", fund.node_id, target.node_id)

    fees = body.get("fees")
    if isinstance(fees, dict):
        node = graph.merge_node("FeeStructure", {"key": doc.doc_id})
        graph.set_properties(node, {k: v for k, v in fees.items() if _is_scalar(v)})
        graph.merge_edge("HAS_FEES", fund.node_id, node.node_id)

    _load_by_years(graph, fund, doc.doc_id, body.get("successMetrics"),
                   "SuccessMetric", "HAS_SUCCESS_METRIC")
    _load_by_years(graph, fund, doc.doc_id, body.get("returns"),
                   "AnnualReturn", "HAS_RETURN")

    geo = body.get("geographicBreakdown")
    if isinstance(geo, dict):
        for region in geo.get("regions") or []:
            if not isinstance(region, dict) or not isinstance(region.get("name"), str):
                continue
            target = graph.merge_node("Region", {"name": region["name"]})
            values = region.get("values")
            props = {k: v for k, v in values.items() if _is_scalar(v)} if isinstance(values, dict) else {}
            graph.merge_edge("HAS_REGION_ALLOCATION", fund.node_id, target.node_id, props)

    for holding in body.get("topHoldings") or []:
        if not isinstance(holding, dict) or not isinstance(holding.get("name"), str):
            continue
        target = graph.merge_node("Holding", {"name": holding["name"]})
        props = {k: v for k, v in holding.items() if k != "name" and _is_scalar(v)}
        graph.merge_edge("HAS_HOLDING", fund.node_id, target.node_id, props)


def _load_by_years(graph: PropertyGraph, fund: GraphNode, doc_id: str,
                   section: object, label: str, rel_type: str) -> None:
    if not isinstance(section, dict):
        return
    as_of = section.get("asOfDate")
    for entry in section.get("byYears") or []:
        if not isinstance(entry, dict) or "year" not in entry:
            continue
        node = graph.merge_node(label, {"key": f"{doc_id}|{entry['year']}"})
        props = {k: v for k, v in entry.items() if _is_scalar(v)}
        if _is_scalar(as_of):
            props["asOfDate"] = as_of
        graph.set_properties(node, props)
        graph.merge_edge(rel_type, fund.node_id, node.node_id)


def load_graph_from_docs(docs: list[FundDocument],
                         metadata: list[FundMetadata] | None = None) -> PropertyGraph:
    graph = PropertyGraph()
    meta_by_id = {m.abbreviated_name: m for m in metadata or []}
    for doc in docs:
        load_fund(graph, doc, meta_by_id.get(doc.doc_id))
    return graph


# --- schema ------------------------------------------------------------------

@dataclass
class GraphSchema:
    labels: list[str] = field(default_factory=list)
    properties_per_label: dict[str, list[str]] = field(default_factory=dict)
    rel_types: list[str] = field(default_factory=list)
    rel_endpoints: dict[str, set[tuple[str, str]]] = field(default_factory=dict)
    descriptions: dict[str, str] = field(default_factory=dict)


def extract_schema(graph: PropertyGraph,
                   descriptions: dict[str, str] | str | Path | None = None) -> GraphSchema:
    schema = GraphSchema()
    props: dict[str, set[str]] = {}
    for node in graph.nodes.values():
        for label in node.labels:
            props.setdefault(label, set()).update(node.properties)
    schema.labels = sorted(props)
    schema.properties_per_label = {lbl: sorted(keys) for lbl, keys in sorted(props.items())}
    endpoints: dict[str, set[tuple[str, str]]] = {}
    for edge in graph.edges.values():
        pairs = endpoints.setdefault(edge.rel_type, set())
        for from_label in graph.nodes[edge.from_id].labels:
            for to_label in graph.nodes[edge.to_id].labels:
                pairs.add((from_label, to_label))
    schema.rel_types = sorted(endpoints)
    schema.rel_endpoints = endpoints
    if descriptions is not None:
        if isinstance(descriptions, (str, Path)):
            if Path(descriptions).exists():
                schema.descriptions = json.loads(Path(descriptions).read_text(encoding="utf-8"))
        else:
            schema.descriptions = dict(descriptions)
    return schema


# --- persistence -------------------------------------------------------------

def save_graph(graph: PropertyGraph, directory: str | Path) -> None:
    """Two JSON-lines snapshots: nodes.jsonl and edges.jsonl."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "nodes.jsonl", "w", encoding="utf-8") as fh:
        for node in graph.nodes.values():
            fh.write(json.dumps(
                {"id": node.node_id, "labels": sorted(node.labels), "properties": node.properties},
                ensure_ascii=False, sort_keys=True,
            ) + "\n")
    with open(directory / "edges.jsonl", "w", encoding="utf-8") as fh:
        for edge in graph.edges.values():
            fh.write(json.dumps(
                {"id": edge.edge_id, "type": edge.rel_type, "from": edge.from_id,
                 "to": edge.to_id, "properties": edge.properties},
                ensure_ascii=False, sort_keys=True,
            ) + "\n")


def load_graph(directory: str | Path) -> PropertyGraph:
    directory = Path(directory)
    graph = PropertyGraph()
    for line in (directory / "nodes.jsonl").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        node = GraphNode(row["id"], set(row["labels"]), row["properties"])
        graph.nodes[node.node_id] = node
        graph.out_edges[node.node_id] = []
        graph.in_edges[node.node_id] = []
    edges_file = directory / "edges.jsonl"
    if edges_file.exists():
        for line in edges_file.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            edge = GraphEdge(row["id"], row["type"], row["from"], row["to"], row["properties"])
            graph.edges[edge.edge_id] = edge
            graph.out_edges[edge.from_id].append(edge.edge_id)
            graph.in_edges[edge.to_id].append(edge.edge_id)
            graph._edge_index[(edge.rel_type, edge.from_id, edge.to_id)] = edge.edge_id
    for node in graph.nodes.values():
        for label in node.labels:
            key_props = {k: node.properties[k] for k in ("name", "type", "key") if k in node.properties}
            graph._merge_index.setdefault((label, tuple(sorted(key_props.items()))), node.node_id)
    return graph
