"""Schema validation for parsed queries, with near-miss suggestions.

Text-to-Cypher models routinely pick labels or relationship types that are
almost right (:Funds for :Fund, HAS_BENCHMARKS for HAS_BENCHMARK); the
report pairs every unknown name with the closest known one at
case-insensitive edit distance <= 2 so the retry prompt can self-correct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cypher_ast import CypherQuery, PropertyRef, UpdateScript
from .graph import GraphSchema

MAX_SUGGESTION_DISTANCE = 2


def edit_distance(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def suggest(name: str, known: list[str]) -> str | None:
    best: tuple[int, str] | None = None
    lowered = name.lower()
    for candidate in known:
        d = edit_distance(lowered, candidate.lower())
        if d <= MAX_SUGGESTION_DISTANCE and (best is None or (d, candidate) < best):
            best = (d, candidate)
    return best[1] if best else None


@dataclass
class ValidationIssue:
    kind: str  # "label" | "rel_type" | "property"
    name: str
    suggestion: str | None = None
    context: str | None = None

    def render(self) -> str:
        hint = f" (did you mean {self.suggestion!r}?)" if self.suggestion else ""
        where = f" on {self.context}" if self.context else ""
        return f"unknown {self.kind} {self.name!r}{where}{hint}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    def ok(self) -> bool:
        return not self.issues

    def render(self) -> str:
        return "\n".join(issue.render() for issue in self.issues)


def validate_query(schema: GraphSchema, query: CypherQuery | UpdateScript) -> ValidationReport:
    report = ValidationReport()
    if isinstance(query, UpdateScript):
        return report  # loader scripts define the schema rather than follow it

    var_labels: dict[str, str] = {}
    for path in query.patterns:
        for node in path.nodes:
            if node.label is not None:
                if node.label not in schema.labels:
                    report.issues.append(
                        ValidationIssue("label", node.label, suggest(node.label, schema.labels))
                    )
                elif node.var:
                    var_labels[node.var] = node.label
                if node.label in schema.labels:
                    for key in node.props:
                        _check_property(schema, report, node.label, key)
        for rel in path.rels:
            if rel.rel_type is not None and rel.rel_type not in schema.rel_types:
                report.issues.append(
                    ValidationIssue(
                        "rel_type", rel.rel_type, suggest(rel.rel_type, schema.rel_types)
                    )
                )

    refs: list[PropertyRef] = []
    for cond in query.where:
        refs.append(cond.left)
        if isinstance(cond.right, PropertyRef):
            refs.append(cond.right)
    for item in query.return_items:
        if isinstance(item.expr, PropertyRef):
            refs.append(item.expr)
    for item in query.order_by:
        if isinstance(item.expr, PropertyRef):
            refs.append(item.expr)

    seen: set[tuple[str, str]] = set()
    for ref in refs:
        label = var_labels.get(ref.var)
        if label is None:
            continue  # unlabeled variables are not checkable
        if (label, ref.key) in seen:
            continue
        seen.add((label, ref.key))
        _check_property(schema, report, label, ref.key)
    return report


def _check_property(schema: GraphSchema, report: ValidationReport, label: str, key: str) -> None:
    known = schema.properties_per_label.get(label, [])
    if key not in known:
        report.issues.append(
            ValidationIssue("property", key, suggest(key, known), context=f":{label}")
        )
