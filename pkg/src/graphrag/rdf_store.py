"""Deterministic JSON-to-triple flattening plus an in-memory triple store.

Flattening maps every scalar leaf of a fund document to one
``(abbreviatedName, dotted.predicate.path, value)`` triple:

* object keys join with ``.``;
* an object inside an array is labeled ``<discKey><DiscValue>`` using the
  first discriminator key present on the element (``nameEurozone``,
  ``year1YR``); scalar array elements are labeled by 0-based index;
* when an object carries a scalar ``asOfDate`` sibling, each scalar sibling's
  predicate gains a final ``asOfDate<value>`` segment
  (``values.benchmarkPercent.asOfDate2025-09-30``);
* values stringify verbatim: numbers as JSON writes them, booleans
  ``true``/``false``, null ``null``.

The store offers two equivalent retrieval routes: an exact pattern selection
(``sparql_select``) and a bounded breadth-first traversal
(``memgraph_traverse``); on fund-rooted data with one hop they return the
same triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .corpus import FundDocument
from .errors import CorruptStoreFileError, DiscriminatorMissingError, DuplicateDocIdError

STORE_HEADER = "#graphrag-triples v1"

Scalar = str | int | float | bool | None


class Triple(NamedTuple):
    subject: str
    predicate: str
    object: str


@dataclass
class FlattenConfig:
    discriminator_keys: list[str] = field(default_factory=lambda: ["name", "year"])
    as_of_suffix: bool = True
    emit_discriminator_leaf: bool = True
    # When False, an object array element without a discriminator key raises
    # DiscriminatorMissingError instead of falling back to its index.
    index_fallback: bool = True

    def __post_init__(self):
        if not self.discriminator_keys:
            raise ValueError("discriminator_keys must be non-empty")


def _is_scalar(value: object) -> bool:
    return value is None or isinstance(value, (str, int, float, bool))


def stringify_scalar(value: Scalar) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return json.dumps(value)


def camel_segment(value: Scalar) -> str:
    """Discriminator value as a path segment: whitespace removed, each word's
    first letter raised ("Holdings Outside The US" -> "HoldingsOutsideTheUS")."""
    text = stringify_scalar(value)
    return "".join(w[0].upper() + w[1:] for w in text.split() if w)


def flatten(doc: FundDocument, cfg: FlattenConfig | None = None) -> list[Triple]:
    cfg = cfg or FlattenConfig()
    out: list[Triple] = []
    _walk_object(doc.doc_id, doc.body, [], cfg, out)
    return out


def _walk_object(subject: str, obj: dict, path: list[str], cfg: FlattenConfig,
                 out: list[Triple], skip_key: str | None = None) -> None:
    as_of = obj.get("asOfDate")
    suffixing = cfg.as_of_suffix and "asOfDate" in obj and _is_scalar(as_of)
    for key, value in obj.items():
        if key == skip_key:
            continue
        if key == "asOfDate" and suffixing:
            if cfg.emit_discriminator_leaf:
                out.append(Triple(subject, _join(path, key), stringify_scalar(value)))
            continue
        if _is_scalar(value):
            pred = _join(path, key)
            if suffixing:
                pred = f"{pred}.asOfDate{camel_segment(as_of)}"
            out.append(Triple(subject, pred, stringify_scalar(value)))
        elif isinstance(value, dict):
            _walk_object(subject, value, path + [key], cfg, out)
        elif isinstance(value, list):
            _walk_array(subject, value, path + [key], cfg, out)


def _walk_array(subject: str, arr: list, path: list[str], cfg: FlattenConfig,
                out: list[Triple]) -> None:
    for idx, elem in enumerate(arr):
        if isinstance(elem, dict):
            disc = next(
                (k for k in cfg.discriminator_keys if _is_scalar(elem.get(k)) and k in elem),
                None,
            )
            if disc is not None:
                seg = f"{disc}{camel_segment(elem[disc])}"
                skip = None if cfg.emit_discriminator_leaf else disc
                _walk_object(subject, elem, path + [seg], cfg, out, skip_key=skip)
            elif cfg.index_fallback:
                _walk_object(subject, elem, path + [str(idx)], cfg, out)
            else:
                raise DiscriminatorMissingError(".".join(path))
        elif isinstance(elem, list):
            _walk_array(subject, elem, path + [str(idx)], cfg, out)
        else:
            out.append(Triple(subject, _join(path, str(idx)), stringify_scalar(elem)))


def _join(path: list[str], leaf: str) -> str:
    return ".".join(path + [leaf])


class TripleStore:
    """Immutable triple set with subject/predicate indexes."""

    def __init__(self, triples: Iterable[Triple] = ()):
        self.triples: tuple[Triple, ...] = tuple(sorted(set(triples)))
        self.by_subject: dict[str, list[Triple]] = {}
        self.by_predicate: dict[str, list[Triple]] = {}
        for t in self.triples:
            self.by_subject.setdefault(t.subject, []).append(t)
            self.by_predicate.setdefault(t.predicate, []).append(t)
        self.nodes = frozenset(t.subject for t in self.triples) | frozenset(
            t.object for t in self.triples
        )
        self.predicates = frozenset(self.by_predicate)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __eq__(self, other) -> bool:
        return isinstance(other, TripleStore) and self.triples == other.triples

    def stats(self) -> dict[str, int]:
        return {
            "triples": len(self.triples),
            "nodes": len(self.nodes),
            "predicates": len(self.predicates),
        }

    def check_consistency(self) -> bool:
        """Rebuild indexes and node/predicate sets from the raw triples."""
        rebuilt = TripleStore(self.triples)
        return (
            rebuilt.by_subject == self.by_subject
            and rebuilt.by_predicate == self.by_predicate
            and rebuilt.nodes == self.nodes
            and rebuilt.predicates == self.predicates
        )

    def fund_subjects(self) -> list[str]:
        return sorted(self.by_subject)


def build_store(docs: list[FundDocument], cfg: FlattenConfig | None = None) -> TripleStore:
    cfg = cfg or FlattenConfig()
    seen: set[str] = set()
    triples: list[Triple] = []
    for doc in docs:
        if doc.doc_id in seen:
            raise DuplicateDocIdError(doc.doc_id)
        seen.add(doc.doc_id)
        triples.extend(flatten(doc, cfg))
    return TripleStore(triples)


def sparql_select(store: TripleStore, subjects: set[str], predicates: set[str]) -> list[Triple]:
    """All triples with subject in ``subjects`` and predicate in ``predicates``,
    ordered by (subject, predicate, object). Equivalent to the SPARQL form
    ``SELECT ?s ?p ?o WHERE { VALUES ?s {...} VALUES ?p {...} ?s ?p ?o }``."""
    hits = [
        t
        for s in subjects
        for t in store.by_subject.get(s, ())
        if t.predicate in predicates
    ]
    return sorted(hits)


def memgraph_traverse(store: TripleStore, start_nodes: set[str],
                      selected_predicates: set[str], max_hops: int = 2) -> list[Triple]:
    """BFS from ``start_nodes`` up to ``max_hops``, objects as adjacent nodes;
    returns triples whose subject is reachable and whose predicate is both
    reachable and selected."""
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    reachable = set(start_nodes)
    frontier = set(start_nodes)
    seen_predicates: set[str] = set()
    for _ in range(max_hops):
        next_frontier: set[str] = set()
        for node in frontier:
            for t in store.by_subject.get(node, ()):
                seen_predicates.add(t.predicate)
                if t.object not in reachable:
                    next_frontier.add(t.object)
        reachable |= next_frontier
        frontier = next_frontier
        if not frontier:
            break
    selected = seen_predicates & selected_predicates
    hits = {
        t
        for node in reachable
        for t in store.by_subject.get(node, ())
        if t.predicate in selected
    }
    return sorted(hits)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str, line_no: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise CorruptStoreFileError(line_no, "dangling escape")
            nxt = text[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                raise CorruptStoreFileError(line_no, f"bad escape \\{nxt}")
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def save_store(store: TripleStore, path: str | Path) -> None:
    lines = [STORE_HEADER]
    for t in store.triples:
        lines.append("\t".join(_escape(f) for f in t))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_store(path: str | Path) -> TripleStore:
    with open(path, encoding="utf-8", newline="") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if not lines or lines[0] != STORE_HEADER:
        raise CorruptStoreFileError(1, "missing header")
    triples = []
    for line_no, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorruptStoreFileError(line_no, f"{len(fields)} fields, expected 3")
        triples.append(Triple(*(_unescape(f, line_no) for f in fields)))
    return TripleStore(triples)
