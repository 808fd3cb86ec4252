from __future__ import annotations

import json
from pathlib import Path

import pytest

from graphrag.corpus import CorpusConfig, FundDocument, extract_metadata, generate_corpus

DATA_DIR = Path(__file__).parent / "data"

# the documented five-attribute fund sample and its triple rendering
FLAT_FUND_BODY = {
    "originalName": "AMCAP Fund",
    "abbreviatedName": "AMCAP-F3",
    "productType": "AF",
    "benchmarkName": "S&P 500 Index",
    "fundType": "Growth",
}

FLAT_FUND_TRIPLES = [
    ("AMCAP-F3", "originalName", "AMCAP Fund"),
    ("AMCAP-F3", "abbreviatedName", "AMCAP-F3"),
    ("AMCAP-F3", "productType", "AF"),
    ("AMCAP-F3", "benchmarkName", "S&P 500 Index"),
    ("AMCAP-F3", "fundType", "Growth"),
]

# four-attribute sample whose loader output is three nodes and two edges
MINIMAL_FUND_BODY = {
    "originalName": "AMCAP Fund",
    "productType": "AF",
    "fundType": "Growth",
    "inceptionDate": "05/01/1967",
}


@pytest.fixture
def flat_doc() -> FundDocument:
    return FundDocument("AMCAP-F3", dict(FLAT_FUND_BODY))


@pytest.fixture
def minimal_doc() -> FundDocument:
    return FundDocument("AMCAP-F3", dict(MINIMAL_FUND_BODY))


@pytest.fixture(scope="session")
def success_metrics() -> dict:
    return json.loads((DATA_DIR / "success_metrics_nested.json").read_text())


@pytest.fixture(scope="session")
def small_corpus():
    docs = generate_corpus(CorpusConfig(n_funds=12, seed=7))
    return docs, extract_metadata(docs)
