"""Synthetic fund corpus: generation, disk round-trip, and metadata extraction.

Documents are nested JSON objects keyed by a unique ``abbreviatedName``
(``FUND007-R6`` style: family number plus share-class suffix). The generator
is a pure function of its config, so every downstream store and pipeline test
is reproducible from a seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateDocIdError, MalformedJsonError, MissingSubjectKeyError

PRODUCT_TYPES = ("AF", "ETF", "PPS")

DEFAULT_YEARS = ["1YR", "3YR", "5YR", "7YR", "10YR", "15YR", "20YR"]
DEFAULT_SHARE_CLASSES = ["A", "F2", "F3", "R6"]

SUCCESS_METRIC_FIELDS = (
    "successRate",
    "avgRollingCompositReturn",
    "avgRollingIndexReturn",
    "avgRollingOutpacedReturn",
    "periodCompositeOutpacedIndex",
    "periodCompositeLaggedIndex",
)

FUND_TYPES = ["Growth", "Balanced", "Growth and Income", "Bond", "International"]

BENCHMARKS = {
    "Growth": "S&P 500 Index",
    "Balanced": "Bloomberg U.S. Aggregate Index",
    "Growth and Income": "S&P 500 Index",
    "Bond": "Bloomberg U.S. Aggregate Index",
    "International": "MSCI EAFE Index",
}
EXTRA_BENCHMARKS = ["Russell 2000 Index", "MSCI ACWI Index"]

_NAME_FIRST = [
    "Summit", "Harbor", "Pinnacle", "Meridian", "Cascade", "Granite", "Beacon",
    "Sterling", "Atlas", "Crescent", "Lakeview", "Northgate", "Redwood",
    "Silverline", "Vanguardia", "Westbrook", "Ironwood", "Clearfield",
    "Bluepeak", "Stonebridge",
]
_NAME_SECOND = [
    "Capital", "Equity", "Income", "Horizon", "Advantage", "Heritage",
    "Frontier", "Strategic", "Select", "Premier", "Allocation", "Opportunity",
]

_MANAGER_FIRST = [
    "Ava", "Noah", "Mia", "Liam", "Zoe", "Ethan", "Ruth", "Omar", "Ines",
    "Hugo", "Lena", "Marcus", "Nadia", "Felix", "Clara", "Dmitri",
]
_MANAGER_LAST = [
    "Calloway", "Brandt", "Okafor", "Lindqvist", "Moreau", "Tanaka",
    "Reiner", "Vasquez", "Hollis", "Abernathy", "Kovacs", "Ferraro",
]

_HOLDINGS = [
    "Nortia", "Quellum", "Zentara", "Vexcor", "Altrix", "Bramwell",
    "Corvex Industrial", "Dynavia", "Elmspring", "Faraday Grid",
    "Glenmoor", "Hexatron", "Ivywood", "Juniper Rail", "Kestrel Motors",
    "Lumenara", "Mistral Freight", "Novabright", "Orchard Microsystems",
    "Pellucid", "Quarry Lane", "Rivena", "Solquist", "Tarn Logistics",
    "Umbra Dynamics",
]

_REGIONS = [
    "Eurozone", "North America", "Asia Pacific", "Emerging Markets",
    "United Kingdom", "Japan",
]

_OBJECTIVES = {
    "Growth": "Seeks long-term growth of capital by investing primarily in common stocks of companies with strong earnings momentum.",
    "Balanced": "Seeks conservation of capital, current income, and long-term growth through a balanced portfolio of stocks and bonds.",
    "Growth and Income": "Seeks long-term growth of capital and income by investing in dividend-paying equities.",
    "Bond": "Seeks a high level of current income consistent with preservation of capital through investment-grade bonds.",
    "International": "Seeks long-term growth of capital by investing in companies domiciled outside the United States.",
}

_STRATEGIES = {
    "Growth": "The fund employs a bottom-up selection process favoring established companies with durable competitive positions.",
    "Balanced": "The fund rebalances between equities and fixed income within policy bands set by the investment committee.",
    "Growth and Income": "The fund blends dividend growers and value equities, harvesting income while seeking appreciation.",
    "Bond": "The fund ladders investment-grade corporate and government debt across intermediate maturities.",
    "International": "The fund allocates across developed and emerging markets with currency exposure partially hedged.",
}


@dataclass
class FundDocument:
    """One fund share class: ``doc_id`` equals the body's abbreviatedName."""

    doc_id: str
    body: dict


@dataclass
class FundMetadata:
    abbreviated_name: str
    original_name: str
    share_class: str
    cusip: str
    product_type: str
    fund_type: str


@dataclass
class CorpusConfig:
    n_funds: int = 0
    seed: int = 0
    share_classes: list[str] = field(default_factory=lambda: list(DEFAULT_SHARE_CLASSES))
    max_depth: int = 6
    years_list: list[str] = field(default_factory=lambda: list(DEFAULT_YEARS))

    def __post_init__(self):
        if self.n_funds < 0:
            raise ValueError("n_funds must be >= 0")
        if not self.share_classes:
            raise ValueError("share_classes must be non-empty")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")


def _rng(seed: int, *parts: object) -> random.Random:
    # str seeds hash through SHA-512 inside random.Random: stable across runs.
    return random.Random("|".join([str(seed), *map(str, parts)]))


def _pct(rng: random.Random, lo: float, hi: float) -> str:
    return f"{rng.uniform(lo, hi):.2f}"


def _cusip(rng: random.Random) -> str:
    alphabet = "0123456789ABCDEFGHJKLMNPQRSTUVWXYZ"
    return "".join(rng.choice(alphabet) for _ in range(9))


def _success_metrics(rng: random.Random, years: list[str]) -> dict:
    by_years = []
    rate = rng.uniform(45.0, 55.0)
    for year in years:
        entry = {"year": year, "successRate": f"{rate:.1f}"}
        for fld in SUCCESS_METRIC_FIELDS[1:4]:
            entry[fld] = _pct(rng, 1.5, 14.0)
        for fld in SUCCESS_METRIC_FIELDS[4:]:
            entry[fld] = str(rng.randint(60, 410))
        entry["frequency"] = "quarterly"
        by_years.append(entry)
        rate += rng.uniform(0.0, 7.0)  # longer windows beat the index more often
    return {"asOfDate": "09/30/2025", "byYears": by_years}


def _returns(rng: random.Random, years: list[str]) -> dict:
    by_years = []
    for year in years:
        by_years.append(
            {
                "year": year,
                "fundReturn": _pct(rng, -2.0, 18.0),
                "indexReturn": _pct(rng, -2.0, 15.0),
            }
        )
    return {"asOfDate": "09/30/2025", "byYears": by_years}


def _geographic(rng: random.Random) -> dict:
    picks = rng.sample(_REGIONS, 3)
    regions = []
    for region in picks:
        regions.append(
            {
                "name": region,
                "values": {
                    "fundPercent": _pct(rng, 1.0, 40.0),
                    "benchmarkPercent": _pct(rng, 1.0, 40.0),
                    "asOfDate": "2025-09-30",
                },
            }
        )
    return {"regions": regions}


def _holdings(rng: random.Random) -> list[dict]:
    picks = rng.sample(_HOLDINGS, 5)
    return [{"name": name, "percent": _pct(rng, 0.5, 6.0)} for name in picks]


def generate_corpus(config: CorpusConfig) -> list[FundDocument]:
    """Generate ``n_funds`` documents; doc i is share class i mod |classes| of
    family i div |classes|, so families carry several comparable classes."""
    docs: list[FundDocument] = []
    n_classes = len(config.share_classes)
    for i in range(config.n_funds):
        family = i // n_classes
        share_class = config.share_classes[i % n_classes]
        fam_rng = _rng(config.seed, "family", family)
        doc_rng = _rng(config.seed, "doc", i)

        fund_type = fam_rng.choice(FUND_TYPES)
        benchmark = BENCHMARKS[fund_type]
        if fam_rng.random() < 0.2:
            benchmark = fam_rng.choice(EXTRA_BENCHMARKS)
        first = _NAME_FIRST[family % len(_NAME_FIRST)]
        second = _NAME_SECOND[(family // len(_NAME_FIRST)) % len(_NAME_SECOND)]
        original_name = f"{first} {second} Fund"
        family_code = f"FUND{family:03d}"
        abbreviated = f"{family_code}-{share_class}"
        n_managers = fam_rng.randint(2, 4)
        managers = []
        while len(managers) < n_managers:
            name = f"{fam_rng.choice(_MANAGER_FIRST)} {fam_rng.choice(_MANAGER_LAST)}"
            if name not in managers:
                managers.append(name)
        month = fam_rng.randint(1, 12)
        day = fam_rng.randint(1, 28)
        year = fam_rng.randint(1955, 2018)

        body = {
            "originalName": original_name,
            "abbreviatedName": abbreviated,
            "shareClass": share_class,
            "productType": fam_rng.choices(PRODUCT_TYPES, weights=[6, 3, 1])[0],
            "benchmarkName": benchmark,
            "fundType": fund_type,
            "inceptionDate": f"{month:02d}/{day:02d}/{year}",
            "cusip": _cusip(doc_rng),
            "fundFamily": family_code,
            "objective": _OBJECTIVES[fund_type],
            "strategy": _STRATEGIES[fund_type],
            "nav": round(doc_rng.uniform(8.0, 90.0), 2),
            "fees": {
                "expenseRatio": _pct(doc_rng, 0.2, 1.4),
                "managementFee": _pct(doc_rng, 0.1, 0.8),
                "asOfDate": "2025-09-30",
            },
            "portfolioManagers": managers,
            "successMetrics": _success_metrics(doc_rng, config.years_list),
            "returns": _returns(doc_rng, config.years_list),
            "geographicBreakdown": _geographic(doc_rng),
            "topHoldings": _holdings(doc_rng),
        }
        validate_document(FundDocument(abbreviated, body), max_depth=config.max_depth)
        docs.append(FundDocument(abbreviated, body))
    return docs


def document_depth(value: object, depth: int = 0) -> int:
    """Nesting depth counted in containers below the root object."""
    if isinstance(value, dict):
        return max([depth] + [document_depth(v, depth + 1) for v in value.values()])
    if isinstance(value, list):
        return max([depth] + [document_depth(v, depth + 1) for v in value])
    return depth


def validate_document(doc: FundDocument, max_depth: int = 6) -> None:
    subject = doc.body.get("abbreviatedName")
    if not isinstance(subject, str) or not subject:
        raise MissingSubjectKeyError(doc.doc_id)
    if subject != doc.doc_id:
        raise ValueError(f"doc_id {doc.doc_id!r} != abbreviatedName {subject!r}")
    if document_depth(doc.body) > max_depth:
        raise ValueError(f"document {doc.doc_id} exceeds max depth {max_depth}")


def dump_document(doc: FundDocument) -> str:
    return json.dumps(doc.body, indent=2, ensure_ascii=False) + "\n"


def write_corpus(docs: list[FundDocument], out_dir: str | Path) -> list[Path]:
    """One UTF-8 file per fund, named ``<abbreviatedName>.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for doc in docs:
        path = out / f"{doc.doc_id}.json"
        path.write_text(dump_document(doc), encoding="utf-8")
        paths.append(path)
    return paths


def load_corpus(path: str | Path) -> list[FundDocument]:
    docs: list[FundDocument] = []
    seen: set[str] = set()
    for file in sorted(Path(path).glob("*.json")):
        try:
            body = json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedJsonError(str(file), str(exc)) from exc
        if not isinstance(body, dict):
            raise MalformedJsonError(str(file), "top level is not an object")
        subject = body.get("abbreviatedName")
        if not isinstance(subject, str) or not subject:
            raise MissingSubjectKeyError(str(file))
        if subject in seen:
            raise DuplicateDocIdError(subject)
        seen.add(subject)
        docs.append(FundDocument(subject, body))
    return docs


def parse_share_class(abbreviated_name: str) -> str:
    """Suffix after the final hyphen ("AMCAP-F3" -> "F3"); empty if none."""
    if "-" not in abbreviated_name:
        return ""
    return abbreviated_name.rsplit("-", 1)[1]


def extract_metadata(docs: list[FundDocument]) -> list[FundMetadata]:
    out = []
    for doc in docs:
        body = doc.body
        out.append(
            FundMetadata(
                abbreviated_name=doc.doc_id,
                original_name=str(body.get("originalName", "")),
                share_class=parse_share_class(doc.doc_id),
                cusip=str(body.get("cusip", "") or ""),
                product_type=str(body.get("productType", "")),
                fund_type=str(body.get("fundType", "")),
            )
        )
    return out
