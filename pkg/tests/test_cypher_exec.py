from __future__ import annotations

import random

import pytest

from graphrag.corpus import FundDocument
from graphrag.errors import TypeMismatchError
from graphrag.lpg import (
    PropertyGraph,
    execute_cypher,
    load_fund,
    load_graph_from_docs,
    parse_cypher,
)

from conftest import MINIMAL_FUND_BODY

LOADER_SCRIPT = """
MERGE (f:Fund {fundFamily: $fundFamily})
SET f.name = $name,
    f.originalName = $originalName,
    f.inceptionDate = $inceptionDate

MERGE (pt:ProductType {type: $productType})
MERGE (ft:FundType {type: $fundType})

MERGE (f)-[:HAS_PRODUCT_TYPE]->(pt)
MERGE (f)-[:HAS_FUND_TYPE]->(ft)
"""

LOADER_PARAMS = {
    "fundFamily": "AMCAP",
    "name": "AMCAP-F3",
    "originalName": "AMCAP Fund",
    "inceptionDate": "05/01/1967",
    "productType": "AF",
    "fundType": "Growth",
}


@pytest.fixture
def minimal_graph(minimal_doc) -> PropertyGraph:
    graph = PropertyGraph()
    load_fund(graph, minimal_doc)
    return graph


def run(graph, text, params=None):
    return execute_cypher(graph, parse_cypher(text), params)


def test_label_listing_golden(minimal_graph):
    table = run(minimal_graph, "MATCH (n) RETURN DISTINCT labels(n) AS node_labels")
    assert table.columns == ["node_labels"]
    assert table.values("node_labels") == [["Fund"], ["FundType"], ["ProductType"]]


def test_property_listing_golden(minimal_graph):
    table = run(
        minimal_graph,
        "MATCH (n:Fund) UNWIND keys(n) AS prop RETURN DISTINCT prop ORDER BY prop",
    )
    props = table.values("prop")
    assert props == sorted(props)
    assert {"inceptionDate", "name", "originalName"} <= set(props)


def test_any_query_on_empty_graph():
    table = run(PropertyGraph(), "MATCH (n:Fund) RETURN n.name")
    assert table.rows == []


def test_unknown_label_matches_nothing(minimal_graph):
    assert run(minimal_graph, "MATCH (n:Nothing) RETURN n.name").rows == []


def test_relationship_traversal(minimal_graph):
    table = run(
        minimal_graph,
        "MATCH (f:Fund)-[:HAS_FUND_TYPE]->(t) RETURN f.name, t.type",
    )
    assert table.rows == [{"f.name": "AMCAP-F3", "t.type": "Growth"}]


def test_direction_honored(minimal_graph):
    out = run(minimal_graph, "MATCH (t:FundType)-[:HAS_FUND_TYPE]->(f) RETURN f.name")
    assert out.rows == []
    rev = run(minimal_graph, "MATCH (t:FundType)<-[:HAS_FUND_TYPE]-(f) RETURN f.name")
    assert rev.rows == [{"f.name": "AMCAP-F3"}]


def test_property_map_filter(minimal_graph):
    hit = run(minimal_graph, "MATCH (t:FundType {type: 'Growth'}) RETURN t.type")
    assert hit.rows == [{"t.type": "Growth"}]
    miss = run(minimal_graph, "MATCH (t:FundType {type: 'Bond'}) RETURN t.type")
    assert miss.rows == []


def test_count_star(minimal_graph):
    assert run(minimal_graph, "MATCH (n) RETURN count(*)").rows == [{"count(*)": 3}]
    assert run(PropertyGraph(), "MATCH (n) RETURN count(*)").rows == [{"count(*)": 0}]


def test_where_contains_and_comparisons():
    graph = PropertyGraph()
    for i, nav in enumerate([5, 12.5, 30]):
        node = graph.merge_node("Fund", {"name": f"FUND00{i}-A"})
        graph.set_properties(node, {"nav": nav})
    table = run(graph, "MATCH (f:Fund) WHERE f.nav > 10 RETURN f.name ORDER BY f.name")
    assert table.values("f.name") == ["FUND001-A", "FUND002-A"]
    table = run(graph, "MATCH (f:Fund) WHERE f.name CONTAINS '2-A' RETURN f.name")
    assert table.values("f.name") == ["FUND002-A"]


def test_type_mismatch_on_ordered_comparison():
    graph = PropertyGraph()
    node = graph.merge_node("Fund", {"name": "X"})
    graph.set_properties(node, {"nav": "12.5"})  # string-typed number
    with pytest.raises(TypeMismatchError):
        run(graph, "MATCH (f:Fund) WHERE f.nav > 10 RETURN f.name")


def test_equality_across_types_is_false_not_error():
    graph = PropertyGraph()
    node = graph.merge_node("Fund", {"name": "X"})
    graph.set_properties(node, {"nav": "12.5"})
    assert run(graph, "MATCH (f:Fund) WHERE f.nav = 12.5 RETURN f.name").rows == []
    assert run(graph, "MATCH (f:Fund) WHERE f.nav <> 12.5 RETURN f.name").rows == [
        {"f.name": "X"}
    ]


def test_missing_property_never_matches(minimal_graph):
    assert run(minimal_graph, "MATCH (f:Fund) WHERE f.nothing = 'x' RETURN f.name").rows == []
    assert run(minimal_graph, "MATCH (f:Fund) WHERE f.nothing <> 'x' RETURN f.name").rows == []


def test_order_by_limit_desc():
    graph = PropertyGraph()
    for name in ["B", "A", "C"]:
        graph.merge_node("Fund", {"name": name})
    table = run(graph, "MATCH (f:Fund) RETURN f.name ORDER BY f.name DESC LIMIT 2")
    assert table.values("f.name") == ["C", "B"]


def test_default_order_is_lexicographic_over_values():
    graph = PropertyGraph()
    for name in ["beta", "alpha", "gamma"]:
        graph.merge_node("Fund", {"name": name})
    table = run(graph, "MATCH (f:Fund) RETURN f.name")
    assert table.values("f.name") == ["alpha", "beta", "gamma"]


def test_returning_whole_node_renders(minimal_graph):
    table = run(minimal_graph, "MATCH (t:FundType) RETURN t")
    assert len(table.rows) == 1
    rendered = table.render_rows()[0]
    assert rendered.startswith("t=(:FundType")
    assert "type: Growth" in rendered


def test_multi_pattern_cross_join(minimal_graph):
    table = run(minimal_graph, "MATCH (f:Fund), (t:FundType) RETURN f.name, t.type")
    assert table.rows == [{"f.name": "AMCAP-F3", "t.type": "Growth"}]


def test_three_hop_path(small_corpus):
    docs, metadata = small_corpus
    graph = load_graph_from_docs(docs, metadata)
    table = run(
        graph,
        "MATCH (t:FundType)<-[:HAS_FUND_TYPE]-(f:Fund)-[:HAS_BENCHMARK]->(b:Benchmark) "
        "RETURN t.type, f.name, b.name ORDER BY f.name",
    )
    assert len(table.rows) == len(docs)


def test_edge_uniqueness_within_path(minimal_graph):
    # the same edge cannot be used twice within one path match
    table = run(
        minimal_graph,
        "MATCH (f:Fund)-[:HAS_FUND_TYPE]-(t)-[:HAS_FUND_TYPE]-(g) RETURN f.name, g.name",
    )
    assert table.rows == []


def test_update_script_builds_loader_graph(minimal_doc):
    via_loader = PropertyGraph()
    load_fund(via_loader, minimal_doc)
    via_script = PropertyGraph()
    execute_cypher(via_script, parse_cypher(LOADER_SCRIPT), params=LOADER_PARAMS)
    labels = {l for n in via_script.nodes.values() for l in n.labels}
    assert labels == {"Fund", "ProductType", "FundType"}
    assert len(via_script.nodes) == 3 and len(via_script.edges) == 2
    # rerunning the script leaves the graph unchanged (MERGE semantics)
    execute_cypher(via_script, parse_cypher(LOADER_SCRIPT), params=LOADER_PARAMS)
    assert len(via_script.nodes) == 3 and len(via_script.edges) == 2


def test_update_script_missing_param():
    with pytest.raises(ValueError):
        execute_cypher(PropertyGraph(), parse_cypher("MERGE (f:Fund {name: $nope})"), params={})


# --- brute-force oracle over random graphs -------------------------------------

def _random_graph(rng: random.Random) -> PropertyGraph:
    graph = PropertyGraph()
    labels = ["Fund", "Benchmark", "Holding"]
    for i in range(rng.randint(1, 12)):
        node = graph.merge_node(rng.choice(labels), {"name": f"n{i}"})
        graph.set_properties(
            node, {"group": rng.randint(0, 3), "flag": rng.random() < 0.5}
        )
    return graph


def _brute_force(graph, label, props):
    out = []
    for node in graph.nodes.values():
        if label is not None and label not in node.labels:
            continue
        if all(node.properties.get(k) == v for k, v in props.items()):
            out.append(node.properties.get("name"))
    return sorted(out)


def test_single_pattern_matches_brute_force_1000_cases():
    rng = random.Random(99)
    for _ in range(1000):
        graph = _random_graph(rng)
        label = rng.choice([None, "Fund", "Benchmark", "Missing"])
        props = {}
        if rng.random() < 0.5:
            props["group"] = rng.randint(0, 4)
        label_part = f":{label}" if label else ""
        props_part = f" {{group: {props['group']}}}" if props else ""
        table = run(graph, f"MATCH (x{label_part}{props_part}) RETURN x.name")
        assert table.values("x.name") == _brute_force(graph, label, props)
