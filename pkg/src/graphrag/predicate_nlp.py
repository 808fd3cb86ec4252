"""Predicate categorization, clustering, and natural-language rendering.

Dotted predicate paths ("geographicBreakdown.regions.nameEurozone...") are
the retrieval unit of the RDF pipeline; this module groups them into a closed
taxonomy, clusters them by embedding, and renders them as readable text so
triples can be verbalized into sentences.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import KTooLargeError, UnknownCategoryError
from .rdf_store import Triple

CATEGORIES = (
    "objectives",
    "metrics",
    "returns",
    "allocation",
    "benchmark",
    "fees",
    "managers",
    "generic",
)

# Substring rules (lowercased match against the whole predicate); a predicate
# matching nothing is generic.
DEFAULT_KEYWORDS: dict[str, list[str]] = {
    "objectives": ["objective", "strategy", "goal"],
    "metrics": ["metric", "successrate", "frequency", "nav"],
    "returns": ["return", "yield"],
    "allocation": ["holding", "allocation", "region", "countr", "sector", "breakdown"],
    "benchmark": ["benchmark"],
    "fees": ["fee", "expense"],
    "managers": ["manager"],
}

ACRONYMS = ("US", "ETF", "PPS", "CUSIP", "AF")

DEFAULT_DISCRIMINATORS = ("name", "year")


def load_keyword_config(path: str | Path) -> dict[str, list[str]]:
    """Per-deployment keyword lists; unknown category names are rejected."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    for category in data:
        if category not in CATEGORIES:
            raise UnknownCategoryError(category)
    return {k: [w.lower() for w in v] for k, v in data.items()}


def categorize_predicate(predicate: str, classifier=None,
                         keywords: dict[str, list[str]] | None = None) -> set[str]:
    """Non-empty subset of the closed category set for one predicate."""
    if not predicate:
        raise ValueError("predicate must be non-empty")
    if classifier is not None:
        labels = classifier(predicate)
        out = set(labels)
        for label in out:
            if label not in CATEGORIES:
                raise UnknownCategoryError(label)
        return out or {"generic"}
    keywords = keywords or DEFAULT_KEYWORDS
    lowered = predicate.lower()
    matched = {
        category
        for category, words in keywords.items()
        if any(word in lowered for word in words)
    }
    return matched or {"generic"}


@dataclass
class ClusterAssignment:
    assignment: dict[str, int]
    centroids: np.ndarray
    inertia_history: list[float] = field(default_factory=list)


def cluster_predicates(predicates: list[str], k: int, seed: int = 0) -> ClusterAssignment:
    """Seeded k-means (k-means++ init) over fallback embeddings of the
    distinct predicates; at most 100 iterations or centroid shift < 1e-6."""
    from .vector import FallbackEmbedder

    distinct = sorted(set(predicates))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(distinct):
        raise KTooLargeError(k, len(distinct))

    vectors = np.stack(FallbackEmbedder().embed(distinct))
    rng = np.random.default_rng(seed)

    centroids = _kmeans_pp(vectors, k, rng)
    history: list[float] = []
    labels = np.zeros(len(distinct), dtype=int)
    for _ in range(100):
        dists = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = dists.argmin(axis=1)
        history.append(float(dists[np.arange(len(distinct)), labels].sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            members = vectors[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        shift = float(np.abs(new_centroids - centroids).max())
        centroids = new_centroids
        if shift < 1e-6:
            break
    return ClusterAssignment(dict(zip(distinct, labels.tolist())), centroids, history)


def _kmeans_pp(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(vectors)
    first = int(rng.integers(n))
    chosen = [first]
    for _ in range(1, k):
        d2 = np.min(
            ((vectors[:, None, :] - vectors[chosen][None, :, :]) ** 2).sum(axis=2),
            axis=1,
        )
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with a centroid; pick next unused
            remaining = [i for i in range(n) if i not in chosen]
            chosen.append(remaining[0])
            continue
        chosen.append(int(rng.choice(n, p=d2 / total)))
    return vectors[chosen].copy()


_CAMEL = re.compile(r"[0-9]+[A-Z]+(?![a-z])|[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")


def split_camel(segment: str) -> list[str]:
    return _CAMEL.findall(segment)


def _render_word(word: str) -> str:
    for acronym in ACRONYMS:
        if word.upper() == acronym:
            return acronym
    if word.isupper() or any(ch.isdigit() for ch in word):
        return word
    return word[0].upper() + word[1:]


def _disc_value(segment: str, discriminators: tuple[str, ...]) -> str | None:
    for key in discriminators:
        rest = segment[len(key):]
        if segment.startswith(key) and rest and not rest[0].islower():
            return rest
    return None


def predicate_to_text(predicate: str, mode: str = "rule", llm=None,
                      discriminators: tuple[str, ...] = DEFAULT_DISCRIMINATORS) -> str:
    """Render a dotted predicate as text.

    Rule mode is deterministic: camel-case split with title-cased words,
    discriminator segments reduced to their value, and asOfDate suffixes
    moved into a trailing "as of <date>" phrase. LLM mode delegates to the
    gateway but must keep every content word (checked by callers/tests).
    """
    if not predicate:
        raise ValueError("predicate must be non-empty")
    if mode == "llm":
        if llm is None:
            raise ValueError("llm mode requires a client")
        from .llm import ChatRequest, complete

        request = ChatRequest(
            system="You rewrite dotted data paths as short natural-language phrases. Keep every content word.",
            user=f"Path: {predicate}\nPhrase:",
            tag="predicate_text",
        )
        return complete(request, llm).strip()
    if mode != "rule":
        raise ValueError(f"unknown mode {mode!r}")

    words: list[str] = []
    as_of: list[str] = []
    for segment in predicate.split("."):
        if segment.startswith("asOfDate") and len(segment) > len("asOfDate"):
            as_of.append(segment[len("asOfDate"):])
            continue
        value = _disc_value(segment, discriminators)
        target = value if value is not None else segment
        words.extend(_render_word(w) for w in split_camel(target))
    text = " ".join(words)
    for date in as_of:
        text = f"{text} as of {date}" if text else f"as of {date}"
    return text


def content_words(predicate: str,
                  discriminators: tuple[str, ...] = DEFAULT_DISCRIMINATORS) -> list[str]:
    """Alphabetic camel tokens that any rendering must preserve (discriminator
    keys and asOfDate suffixes excluded)."""
    out: list[str] = []
    for segment in predicate.split("."):
        if segment.startswith("asOfDate") and len(segment) > len("asOfDate"):
            continue
        value = _disc_value(segment, discriminators)
        target = value if value is not None else segment
        out.extend(w for w in split_camel(target) if w.isalpha())
    return out


def triple_to_sentence(t: Triple, predicate_text: str) -> str:
    if not predicate_text:
        raise ValueError("predicate_text must be non-empty")
    return f"{t.subject} {predicate_text} is {t.object}"
