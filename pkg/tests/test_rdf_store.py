from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphrag.corpus import CorpusConfig, FundDocument, generate_corpus
from graphrag.errors import CorruptStoreFileError, DiscriminatorMissingError, DuplicateDocIdError
from graphrag.rdf_store import (
    FlattenConfig,
    Triple,
    TripleStore,
    build_store,
    flatten,
    load_store,
    memgraph_traverse,
    save_store,
    sparql_select,
)

from conftest import FLAT_FUND_TRIPLES


# --- flatten -----------------------------------------------------------------

def test_flatten_five_attribute_golden(flat_doc):
    assert flatten(flat_doc) == [Triple(*t) for t in FLAT_FUND_TRIPLES]


def test_flatten_single_key():
    doc = FundDocument("X", {"abbreviatedName": "X"})
    assert flatten(doc) == [Triple("X", "abbreviatedName", "X")]


def test_flatten_success_metrics_57(success_metrics):
    doc = FundDocument("X", success_metrics)
    triples = flatten(doc)
    assert len(triples) == 57
    by_pred = {t.predicate: t.object for t in triples}
    assert by_pred["successMetrics.byYears.year1YR.successRate"] == "51.5"
    assert by_pred["successMetrics.asOfDate"] == "09/30/2025"
    assert by_pred["successMetrics.byYears.year20YR.periodCompositeLaggedIndex"] == "74"


def test_flatten_as_of_suffix_on_scalar_siblings():
    doc = FundDocument("X", {
        "values": {"benchmarkPercent": "10.1", "fundPercent": "12.0", "asOfDate": "2025-09-30"},
    })
    preds = {t.predicate for t in flatten(doc)}
    assert preds == {
        "values.benchmarkPercent.asOfDate2025-09-30",
        "values.fundPercent.asOfDate2025-09-30",
        "values.asOfDate",
    }


def test_flatten_as_of_does_not_cross_containers(success_metrics):
    # byYears entries have no asOfDate sibling, so their leaves get no suffix
    doc = FundDocument("X", success_metrics)
    for t in flatten(doc):
        if "byYears" in t.predicate:
            assert "asOfDate" not in t.predicate


def test_flatten_discriminator_name_beats_year():
    doc = FundDocument("X", {"rows": [{"name": "Alpha", "year": "1YR", "v": "1"}]})
    preds = {t.predicate for t in flatten(doc)}
    assert "rows.nameAlpha.v" in preds


def test_flatten_discriminator_value_camels_words():
    doc = FundDocument("X", {
        "descriptions": [{"name": "Holdings Outside The US", "description": "d"}],
    })
    preds = {t.predicate for t in flatten(doc)}
    assert "descriptions.nameHoldingsOutsideTheUS.description" in preds


def test_flatten_scalar_array_indexes():
    doc = FundDocument("X", {"portfolioManagers": ["Jane", "Omar"]})
    assert flatten(doc) == [
        Triple("X", "portfolioManagers.0", "Jane"),
        Triple("X", "portfolioManagers.1", "Omar"),
    ]


def test_flatten_object_array_index_fallback():
    doc = FundDocument("X", {"rows": [{"v": "1"}, {"v": "2"}]})
    preds = {t.predicate for t in flatten(doc)}
    assert preds == {"rows.0.v", "rows.1.v"}


def test_flatten_discriminator_missing_raises_without_fallback():
    cfg = FlattenConfig(index_fallback=False)
    doc = FundDocument("X", {"rows": [{"v": "1"}]})
    with pytest.raises(DiscriminatorMissingError):
        flatten(doc, cfg)


def test_flatten_without_discriminator_leaf(success_metrics):
    cfg = FlattenConfig(emit_discriminator_leaf=False)
    doc = FundDocument("X", success_metrics)
    triples = flatten(doc, cfg)
    # drops the 7 per-entry "year" leaves and the asOfDate leaf
    assert len(triples) == 57 - 7 - 1
    assert not any(t.predicate.endswith(".year") for t in triples)


def test_flatten_scalar_stringification():
    doc = FundDocument("X", {"a": 51.5, "b": 7, "c": True, "d": False, "e": None, "f": "s"})
    objects = {t.predicate: t.object for t in flatten(doc)}
    assert objects == {"a": "51.5", "b": "7", "c": "true", "d": "false", "e": "null", "f": "s"}


def test_flatten_deterministic(flat_doc):
    assert flatten(flat_doc) == flatten(flat_doc)


def _random_json(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if depth >= 3 or roll < 0.45:
        return rng.choice(["x", "y z", 12, 4.5, True, None, ""])
    if roll < 0.75:
        return {
            f"k{rng.randint(0, 5)}{i}": _random_json(rng, depth + 1)
            for i in range(rng.randint(0, 4))
        }
    arr = []
    for _ in range(rng.randint(0, 4)):
        if rng.random() < 0.5:
            arr.append({"name": f"N{rng.randint(0, 9)}", "v": _random_json(rng, depth + 2)})
        else:
            arr.append(rng.choice(["s", 3, False]))
    return arr


def _count_leaves(value) -> int:
    if isinstance(value, dict):
        return sum(_count_leaves(v) for v in value.values())
    if isinstance(value, list):
        return sum(_count_leaves(v) for v in value)
    return 1


def test_flatten_leaf_count_oracle_1000_random_trees():
    # triple count equals the scalar-leaf count under the default config
    rng = random.Random(20250809)
    for i in range(1000):
        body = {
            f"top{j}": _random_json(rng) for j in range(rng.randint(1, 4))
        }
        doc = FundDocument(f"D{i}", body)
        assert len(flatten(doc)) == _count_leaves(body)


# --- store -------------------------------------------------------------------

def test_build_store_empty():
    store = build_store([])
    assert store.stats() == {"triples": 0, "nodes": 0, "predicates": 0}


def test_build_store_duplicate_doc_id(flat_doc):
    with pytest.raises(DuplicateDocIdError):
        build_store([flat_doc, flat_doc])


def test_store_predicate_set_union():
    a = FundDocument("A", {"abbreviatedName": "A", "fundType": "Growth"})
    b = FundDocument("B", {"abbreviatedName": "B", "fundType": "Bond"})
    store = build_store([a, b])
    # shared predicates counted once
    assert store.predicates == {"abbreviatedName", "fundType"}
    assert store.stats()["predicates"] == 2


def test_store_triple_count_is_sum_of_flatten():
    docs = generate_corpus(CorpusConfig(n_funds=24, seed=99))
    store = build_store(docs)
    assert len(store) == sum(len(flatten(d)) for d in docs)


def test_store_indexes_consistent():
    docs = generate_corpus(CorpusConfig(n_funds=8, seed=4))
    store = build_store(docs)
    assert store.check_consistency()


def test_store_node_set_matches_recount():
    docs = generate_corpus(CorpusConfig(n_funds=6, seed=13))
    store = build_store(docs)
    subjects = {t.subject for t in store}
    objects = {t.object for t in store}
    assert store.nodes == subjects | objects


# --- sparql_select -----------------------------------------------------------

def _flat_store(flat_doc) -> TripleStore:
    return build_store([flat_doc])


def test_sparql_empty_predicates(flat_doc):
    store = _flat_store(flat_doc)
    assert sparql_select(store, {"AMCAP-F3"}, set()) == []


def test_sparql_golden_benchmark(flat_doc):
    store = _flat_store(flat_doc)
    out = sparql_select(store, {"AMCAP-F3"}, {"benchmarkName"})
    assert out == [Triple("AMCAP-F3", "benchmarkName", "S&P 500 Index")]


def _random_store(rng: random.Random, n: int = 500) -> TripleStore:
    triples = [
        Triple(
            f"S{rng.randint(0, 20)}",
            f"p{rng.randint(0, 30)}",
            f"v{rng.randint(0, 50)}",
        )
        for _ in range(n)
    ]
    return TripleStore(triples)


def test_sparql_matches_linear_scan_oracle():
    rng = random.Random(7)
    store = _random_store(rng)
    for _ in range(50):
        subjects = {f"S{rng.randint(0, 25)}" for _ in range(rng.randint(0, 6))}
        predicates = {f"p{rng.randint(0, 35)}" for _ in range(rng.randint(0, 8))}
        expected = sorted(
            t for t in store if t.subject in subjects and t.predicate in predicates
        )
        assert sparql_select(store, subjects, predicates) == expected


# --- memgraph_traverse ---------------------------------------------------------

def test_traverse_empty_selection(flat_doc):
    store = _flat_store(flat_doc)
    assert memgraph_traverse(store, {"AMCAP-F3"}, set(), 1) == []


def test_traverse_one_hop_equals_sparql(flat_doc):
    store = _flat_store(flat_doc)
    subjects = {"AMCAP-F3"}
    predicates = {"benchmarkName", "fundType"}
    assert memgraph_traverse(store, subjects, predicates, 1) == sparql_select(
        store, subjects, predicates
    )


def test_traverse_two_hop_chain():
    # A -p-> B -q-> C: hand-walked BFS picks up B's q-triple at hop 2
    store = TripleStore([Triple("A", "p", "B"), Triple("B", "q", "C")])
    out = memgraph_traverse(store, {"A"}, {"q"}, 2)
    assert out == [Triple("B", "q", "C")]
    # with max_hops=1 the q edge is never seen
    assert memgraph_traverse(store, {"A"}, {"q"}, 1) == []


def test_traverse_rejects_zero_hops(flat_doc):
    with pytest.raises(ValueError):
        memgraph_traverse(_flat_store(flat_doc), {"A"}, {"p"}, 0)


# --- save / load ---------------------------------------------------------------

def test_save_load_empty(tmp_path):
    path = tmp_path / "empty.tsv"
    save_store(TripleStore(), path)
    assert load_store(path) == TripleStore()


def test_save_load_golden_round_trip(tmp_path, flat_doc):
    store = _flat_store(flat_doc)
    path = tmp_path / "store.tsv"
    save_store(store, path)
    assert load_store(path) == store
    # byte-stable: saving the loaded store reproduces the same file
    second = tmp_path / "store2.tsv"
    save_store(load_store(path), second)
    assert path.read_bytes() == second.read_bytes()


def test_load_rejects_missing_header(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("a\tb\tc\n")
    with pytest.raises(CorruptStoreFileError):
        load_store(path)


def test_load_rejects_wrong_field_count(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("#graphrag-triples v1\na\tb\n")
    with pytest.raises(CorruptStoreFileError) as err:
        load_store(path)
    assert err.value.line_no == 2


text_fields = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=40
)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(text_fields, text_fields, text_fields), max_size=20))
def test_save_load_round_trip_arbitrary_strings(tmp_path_factory, rows):
    store = TripleStore(Triple(*row) for row in rows)
    path = tmp_path_factory.mktemp("io") / "store.tsv"
    save_store(store, path)
    assert load_store(path) == store


def test_escapes_round_trip(tmp_path):
    nasty = Triple("s\tu", "p\nq", "o\\r\\n")
    path = tmp_path / "store.tsv"
    save_store(TripleStore([nasty]), path)
    assert load_store(path).triples == (nasty,)
